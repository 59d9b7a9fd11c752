//! Forecast scoring and parameter calibration.

use std::fmt::Write as _;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::events::DensitySurface;
use crate::exec::Execution;
use crate::pde::{solve, DLParams, GrowthRate, SolutionGrid, SolverConfig};
use crate::spline::InitialDensity;
use crate::{Error, Result};

/// Anything that yields a density (percent) at integer distance and hour.
pub trait DensitySource {
    fn density(&self, distance: u32, t: u32) -> Option<f64>;
}

impl DensitySource for DensitySurface {
    fn density(&self, distance: u32, t: u32) -> Option<f64> {
        self.value(distance, t)
    }
}

impl DensitySource for SolutionGrid {
    fn density(&self, distance: u32, t: u32) -> Option<f64> {
        self.predict_at(distance, t).ok()
    }
}

/// `100 * max(0, 1 - |predicted - actual| / actual)`.
///
/// The complement of the relative error, floored at zero.
pub fn accuracy(predicted: f64, actual: f64) -> Result<f64> {
    if !(actual > 0.0) || !actual.is_finite() {
        return Err(Error::invalid(format!(
            "accuracy is undefined for actual value {actual}"
        )));
    }
    if !predicted.is_finite() {
        return Err(Error::invalid("predicted value is not finite"));
    }
    Ok(100.0 * (1.0 - (predicted - actual).abs() / actual).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellAccuracy {
    pub distance: u32,
    pub t: u32,
    pub predicted: f64,
    pub actual: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    MissingPrediction,
    MissingObservation,
    ZeroActual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedCell {
    pub distance: u32,
    pub t: u32,
    pub reason: Exclusion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSummary {
    pub distance: u32,
    /// Mean accuracy over the row's scored cells.
    pub average: Option<f64>,
    pub scored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub params: DLParams,
    pub train_t: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub distances: Vec<u32>,
    pub times: Vec<u32>,
    pub cells: Vec<CellAccuracy>,
    pub excluded: Vec<ExcludedCell>,
    pub rows: Vec<RowSummary>,
    /// Mean of the row averages.
    pub overall: Option<f64>,
    pub provenance: Option<Provenance>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Scores `predicted` against `observed` on the `distances x times` cells.
pub fn evaluate<P: DensitySource + ?Sized>(
    predicted: &P,
    observed: &DensitySurface,
    distances: &[u32],
    times: &[u32],
) -> PredictionReport {
    let mut cells = Vec::new();
    let mut excluded = Vec::new();
    let mut rows = Vec::new();
    for &x in distances {
        let start = cells.len();
        for &t in times {
            let exclude = |reason| ExcludedCell { distance: x, t, reason };
            let Some(actual) = observed.density(x, t) else {
                excluded.push(exclude(Exclusion::MissingObservation));
                continue;
            };
            let Some(pred) = predicted.density(x, t) else {
                excluded.push(exclude(Exclusion::MissingPrediction));
                continue;
            };
            match accuracy(pred, actual) {
                Ok(acc) => cells.push(CellAccuracy {
                    distance: x,
                    t,
                    predicted: pred,
                    actual,
                    accuracy: acc,
                }),
                Err(_) => excluded.push(exclude(Exclusion::ZeroActual)),
            }
        }
        let row = &cells[start..];
        rows.push(RowSummary {
            distance: x,
            average: mean(row.iter().map(|c| c.accuracy)),
            scored: row.len(),
        });
    }
    let overall = mean(rows.iter().filter_map(|r| r.average));
    PredictionReport {
        distances: distances.to_vec(),
        times: times.to_vec(),
        cells,
        excluded,
        rows,
        overall,
        provenance: None,
    }
}

impl PredictionReport {
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn cell(&self, distance: u32, t: u32) -> Option<&CellAccuracy> {
        self.cells.iter().find(|c| c.distance == distance && c.t == t)
    }

    /// Aligned text table: one row per distance, columns Average and each hour.
    pub fn render_table(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |v| format!("{v:.2}%"));
        let mut header = vec!["Distance".to_owned(), "Average".to_owned()];
        header.extend(self.times.iter().map(|t| format!("t = {t}")));
        let mut table = vec![header];
        for row in &self.rows {
            let mut line = vec![row.distance.to_string(), pct(row.average)];
            line.extend(
                self.times
                    .iter()
                    .map(|&t| pct(self.cell(row.distance, t).map(|c| c.accuracy))),
            );
            table.push(line);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|j| table.iter().map(|r| r[j].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, r) in table.iter().enumerate() {
            let cols: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "| {} |", cols.join(" | "));
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "|-{}-|", rule.join("-|-"));
            }
        }
        let _ = writeln!(out, "Overall average: {}", pct(self.overall));
        if !self.excluded.is_empty() {
            let _ = writeln!(out, "Excluded cells: {}", self.excluded.len());
        }
        out
    }

    /// Long-format `distance,t,predicted,actual,accuracy`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["distance", "t", "predicted", "actual", "accuracy"])?;
        for c in &self.cells {
            w.write_record([
                c.distance.to_string(),
                c.t.to_string(),
                c.predicted.to_string(),
                c.actual.to_string(),
                c.accuracy.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }

    fn at(&self, u: f64) -> f64 {
        (self.lo + u * (self.hi - self.lo)).clamp(self.lo, self.hi)
    }

    fn unit(&self, v: f64) -> f64 {
        if self.is_fixed() {
            0.0
        } else {
            ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
        }
    }
}

/// Search box over `(d, K, a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub d: Interval,
    #[serde(rename = "K")]
    pub capacity: Interval,
    pub a: Interval,
    pub b: Interval,
    pub c: Interval,
}

impl SearchSpace {
    fn intervals(&self) -> [Interval; 5] {
        [self.d, self.capacity, self.a, self.b, self.c]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, i) in ["d", "K", "a", "b", "c"].iter().zip(self.intervals()) {
            if !(i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi) {
                return Err(Error::invalid(format!(
                    "bounds for {name} must be finite with lower <= upper, got [{}, {}]",
                    i.lo, i.hi
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &DLParams) -> bool {
        let v = [p.diffusion, p.capacity, p.growth.a, p.growth.b, p.growth.c];
        self.intervals()
            .iter()
            .zip(v)
            .all(|(i, v)| v >= i.lo && v <= i.hi)
    }

    fn params(&self, full: &[f64; 5], lower: f64, upper: f64) -> DLParams {
        DLParams {
            diffusion: full[0],
            capacity: full[1],
            growth: GrowthRate::new(full[2], full[3], full[4]),
            lower,
            upper,
        }
    }
}

/// Sum of squared residuals between a model solve and observed cells.
pub struct Objective<'a> {
    phi: &'a InitialDensity,
    cells: Vec<(u32, u32, f64)>,
    config: SolverConfig,
    excluded_zero: usize,
}

impl<'a> Objective<'a> {
    /// Cells are every observed distance inside the profile's domain crossed
    /// with `window`, minus cells whose observed value is zero.
    pub fn new(
        observed: &DensitySurface,
        phi: &'a InitialDensity,
        window: &[u32],
        dx: f64,
        dt: f64,
    ) -> Result<Self> {
        if observed.horizon() < 3 {
            return Err(Error::invalid(
                "observed surface needs at least two time columns beyond t = 1",
            ));
        }
        if window.is_empty() {
            return Err(Error::invalid("objective window is empty"));
        }
        if let Some(&t) = window.iter().find(|&&t| t < 2 || t > observed.horizon()) {
            return Err(Error::invalid(format!(
                "window hour {t} outside [2, {}]",
                observed.horizon()
            )));
        }
        let (l, u) = (phi.lower(), phi.upper());
        let mut cells = Vec::new();
        let mut excluded_zero = 0;
        for &x in observed.distances() {
            if (x as f64) < l || (x as f64) > u {
                continue;
            }
            for &t in window {
                let v = observed.value(x, t).expect("window checked against horizon");
                if v > 0.0 {
                    cells.push((x, t, v));
                } else {
                    excluded_zero += 1;
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::invalid("no observed cells with positive density"));
        }
        let t_end = *window.iter().max().unwrap();
        Ok(Objective {
            phi,
            cells,
            config: SolverConfig { dx, dt, t_end },
            excluded_zero,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Model minus observed, one entry per objective cell.
    pub fn residuals(&self, params: &DLParams) -> Result<Vec<f64>> {
        let sol = solve(params, self.phi, &self.config)?;
        self.cells
            .iter()
            .map(|&(x, t, v)| Ok(sol.predict_at(x, t)? - v))
            .collect()
    }

    pub fn evaluate(&self, params: &DLParams) -> Result<f64> {
        Ok(self.residuals(params)?.iter().map(|r| r * r).sum())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOptions {
    pub dx: f64,
    pub dt: f64,
    /// Hours entering the objective; defaults to `2..=horizon`.
    pub window: Option<Vec<u32>>,
    /// Total objective evaluations across all restarts.
    pub max_evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Optional starting point; the box centre otherwise.
    pub start: Option<DLParams>,
    /// Finish with a bounded Levenberg-Marquardt refinement of the best
    /// simplex point. Its evaluations count against `max_evaluations`.
    pub polish: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            dx: crate::pde::DEFAULT_DX,
            dt: crate::pde::DEFAULT_DT,
            window: None,
            max_evaluations: 500,
            restarts: 3,
            seed: 42,
            start: None,
            polish: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: DLParams,
    /// Sum of squared residuals over the objective cells.
    pub objective: f64,
    pub rmse: f64,
    pub cells: usize,
    pub excluded_zero_cells: usize,
    pub evaluations: usize,
    /// Candidates whose solve failed and were penalised.
    pub rejected: usize,
    pub iterations: usize,
    pub starts: usize,
    /// Accepted Levenberg-Marquardt steps.
    pub polish_steps: usize,
}

/// Nelder-Mead state in unit-box coordinates of the free parameters.
struct Search<'o, 'a> {
    objective: &'o Objective<'a>,
    space: SearchSpace,
    free: Vec<usize>,
    base: [f64; 5],
    domain: (f64, f64),
    exec: Execution,
    budget: usize,
    evaluations: usize,
    rejected: usize,
    iterations: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl Search<'_, '_> {
    fn remaining(&self) -> usize {
        self.budget - self.evaluations
    }

    fn to_params(&self, u: &[f64]) -> DLParams {
        let ivs = self.space.intervals();
        let mut full = self.base;
        for (&k, &uk) in self.free.iter().zip(u) {
            full[k] = ivs[k].at(uk);
        }
        self.space.params(&full, self.domain.0, self.domain.1)
    }

    /// Residual vectors for a batch of points, concurrently when enabled.
    /// Failed solves come back as `None`.
    fn residuals_many(&mut self, pts: &[Vec<f64>]) -> Vec<Option<Vec<f64>>> {
        let params: Vec<DLParams> = pts.iter().map(|u| self.to_params(u)).collect();
        let obj = self.objective;
        let res = self.exec.map(&params, |p| {
            obj.residuals(p)
                .ok()
                .filter(|r| r.iter().all(|v| v.is_finite()))
        });
        self.evaluations += pts.len();
        for (u, r) in pts.iter().zip(&res) {
            match r {
                None => self.rejected += 1,
                Some(r) => {
                    let f = sse(r);
                    if self.best.as_ref().is_none_or(|b| f < b.1) {
                        self.best = Some((u.clone(), f));
                    }
                }
            }
        }
        res
    }

    fn eval_many(&mut self, pts: &[Vec<f64>]) -> Vec<f64> {
        self.residuals_many(pts)
            .iter()
            .map(|r| r.as_deref().map_or(f64::INFINITY, sse))
            .collect()
    }

    fn eval(&mut self, u: Vec<f64>) -> f64 {
        self.eval_many(std::slice::from_ref(&u))[0]
    }

    /// One Nelder-Mead run from `start` with initial edge `step`.
    fn run(&mut self, start: Vec<f64>, step: f64) {
        let n = start.len();
        if self.remaining() < n + 1 {
            return;
        }
        // adaptive coefficients for the dimension
        let nf = n as f64;
        let (alpha, gamma, rho, sigma) = if n >= 2 {
            (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
        } else {
            (1.0, 2.0, 0.5, 0.5)
        };
        let project = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect() };

        let mut pts = vec![start.clone()];
        for i in 0..n {
            let mut p = start.clone();
            p[i] = if p[i] + step <= 1.0 { p[i] + step } else { p[i] - step };
            pts.push(p);
        }
        let vals = self.eval_many(&pts);
        let mut simplex: Vec<(Vec<f64>, f64)> = pts.into_iter().zip(vals).collect();

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (fb, fw) = (simplex[0].1, simplex[n].1);
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (fw.is_finite() && fw - fb <= 1e-14 * fb.abs() + 1e-300) || diameter < 1e-10 {
                return;
            }
            if self.remaining() == 0 {
                return;
            }
            self.iterations += 1;

            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / nf)
                .collect();
            let along = |coef: f64| -> Vec<f64> {
                project(
                    centroid
                        .iter()
                        .zip(&simplex[n].0)
                        .map(|(c, w)| c + coef * (c - w))
                        .collect(),
                )
            };

            let xr = along(alpha);
            let fr = self.eval(xr.clone());
            if fr < fb {
                if self.remaining() == 0 {
                    simplex[n] = (xr, fr);
                    continue;
                }
                let xe = along(alpha * gamma);
                let fe = self.eval(xe.clone());
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            if self.remaining() == 0 {
                return;
            }
            // outside or inside contraction
            let (xc, fc) = if fr < fw {
                let xc = along(alpha * rho);
                let fc = self.eval(xc.clone());
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = self.eval(xc.clone());
                (xc, fc)
            };
            if fc < fr.min(fw) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            if self.remaining() < n {
                return;
            }
            let best = simplex[0].0.clone();
            let shrunk: Vec<Vec<f64>> = simplex[1..]
                .iter()
                .map(|(p, _)| {
                    project(best.iter().zip(p).map(|(b, x)| b + sigma * (x - b)).collect())
                })
                .collect();
            let vals = self.eval_many(&shrunk);
            for (slot, (p, f)) in simplex[1..].iter_mut().zip(shrunk.into_iter().zip(vals)) {
                *slot = (p, f);
            }
        }
    }
}

impl Search<'_, '_> {
    /// Bounded Levenberg-Marquardt from the best point so far, with a
    /// forward-difference Jacobian. Returns the number of accepted steps.
    fn polish(&mut self) -> usize {
        const H: f64 = 1e-6;
        let Some((mut u, mut f)) = self.best.clone() else {
            return 0;
        };
        let n = u.len();
        let Some(mut r) = self.residuals_many(std::slice::from_ref(&u)).pop().flatten() else {
            return 0;
        };
        let mut lambda = 1e-3;
        let mut accepted = 0;
        while self.remaining() > n {
            let probes: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let mut p = u.clone();
                    p[j] += if p[j] + H <= 1.0 { H } else { -H };
                    p
                })
                .collect();
            let cols = self.residuals_many(&probes);
            let Some(cols) = cols.into_iter().collect::<Option<Vec<_>>>() else {
                return accepted;
            };
            let jac: Vec<Vec<f64>> = cols
                .iter()
                .zip(&probes)
                .enumerate()
                .map(|(j, (c, p))| {
                    let h = p[j] - u[j];
                    c.iter().zip(&r).map(|(a, b)| (a - b) / h).collect()
                })
                .collect();
            let mut jtj = vec![vec![0.0; n]; n];
            let mut jtr = vec![0.0; n];
            for a in 0..n {
                for b in 0..n {
                    jtj[a][b] = jac[a].iter().zip(&jac[b]).map(|(x, y)| x * y).sum();
                }
                jtr[a] = jac[a].iter().zip(&r).map(|(x, y)| x * y).sum();
            }
            let mut improved = false;
            while self.remaining() > 0 && lambda < 1e12 {
                let mut m = jtj.clone();
                for k in 0..n {
                    m[k][k] += lambda * jtj[k][k].max(1e-12);
                }
                let Some(step) = cholesky_solve(m, jtr.iter().map(|v| -v).collect()) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<f64> =
                    u.iter().zip(&step).map(|(a, b)| (a + b).clamp(0.0, 1.0)).collect();
                if trial == u {
                    return accepted;
                }
                let rt = self.residuals_many(std::slice::from_ref(&trial)).pop().flatten();
                match rt {
                    Some(rt) if sse(&rt) < f => {
                        let ft = sse(&rt);
                        let gain = (f - ft) / f.max(f64::MIN_POSITIVE);
                        u = trial;
                        f = ft;
                        r = rt;
                        lambda = (lambda / 3.0).max(1e-12);
                        accepted += 1;
                        improved = gain > 1e-12;
                        break;
                    }
                    _ => lambda *= 4.0,
                }
            }
            if !improved || f == 0.0 {
                return accepted;
            }
        }
        accepted
    }
}

fn sse(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Solves a small symmetric positive definite system; `None` if not SPD.
fn cholesky_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for j in 0..n {
        let d = a[j][j] - (0..j).map(|k| a[j][k] * a[j][k]).sum::<f64>();
        if !(d > 0.0) {
            return None;
        }
        a[j][j] = d.sqrt();
        for i in j + 1..n {
            a[i][j] = (a[i][j] - (0..j).map(|k| a[i][k] * a[j][k]).sum::<f64>()) / a[j][j];
        }
    }
    for i in 0..n {
        b[i] = (b[i] - (0..i).map(|k| a[i][k] * b[k]).sum::<f64>()) / a[i][i];
    }
    for i in (0..n).rev() {
        b[i] = (b[i] - (i + 1..n).map(|k| a[k][i] * b[k]).sum::<f64>()) / a[i][i];
    }
    Some(b)
}

/// Least-squares fit of `(d, K, a, b, c)` within `space`.
///
/// Each candidate is scored by a full solve from `phi`. The first start is
/// the supplied point (or the box centre); later starts jitter the best
/// point found so far. Failed solves are penalised with an infinite
/// objective. All starts share `max_evaluations`; with `polish` set, a
/// reserve of that budget goes to a final Levenberg-Marquardt refinement.
pub fn fit(
    observed: &DensitySurface,
    phi: &InitialDensity,
    space: &SearchSpace,
    options: &FitOptions,
) -> Result<FitResult> {
    space.validate()?;
    let window: Vec<u32> = options
        .window
        .clone()
        .unwrap_or_else(|| (2..=observed.horizon()).collect());
    let objective = Objective::new(observed, phi, &window, options.dx, options.dt)?;
    let ivs = space.intervals();
    let free: Vec<usize> = (0..5).filter(|&k| !ivs[k].is_fixed()).collect();
    let base = ivs.map(|i| i.lo);

    let mut search = Search {
        objective: &objective,
        space: *space,
        free: free.clone(),
        base,
        domain: (phi.lower(), phi.upper()),
        exec: options.exec,
        budget: options.max_evaluations.max(1),
        evaluations: 0,
        rejected: 0,
        iterations: 0,
        best: None,
    };

    let total = search.budget;
    let reserve = if options.polish && !free.is_empty() {
        (12 * (free.len() + 1)).min(total / 3)
    } else {
        0
    };
    search.budget = total - reserve;

    let mut starts = 0;
    if free.is_empty() {
        search.eval(Vec::new());
        starts = 1;
    } else {
        let first: Vec<f64> = match &options.start {
            Some(p) => {
                let v = [p.diffusion, p.capacity, p.growth.a, p.growth.b, p.growth.c];
                free.iter().map(|&k| ivs[k].unit(v[k])).collect()
            }
            None => vec![0.5; free.len()],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        for k in 0..options.restarts.max(1) {
            let (start, step) = if k == 0 {
                (first.clone(), 0.25)
            } else {
                let centre = search.best.as_ref().map_or(first.clone(), |b| b.0.clone());
                let jittered = centre
                    .iter()
                    .map(|c| (c + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0))
                    .collect();
                (jittered, 0.1 / k as f64)
            };
            if search.remaining() < free.len() + 1 {
                break;
            }
            search.run(start, step);
            starts += 1;
        }
    }
    search.budget = total;
    let polish_steps = if reserve > 0 { search.polish() } else { 0 };

    let Some((u, f)) = search.best.clone() else {
        return Err(Error::FitFailure(format!(
            "all {} candidate solves were rejected",
            search.evaluations
        )));
    };
    let params = search.to_params(&u);
    debug_assert!(space.contains(&params));
    Ok(FitResult {
        params,
        objective: f,
        rmse: (f / objective.cell_count() as f64).sqrt(),
        cells: objective.cell_count(),
        excluded_zero_cells: objective.excluded_zero,
        evaluations: search.evaluations,
        rejected: search.rejected,
        iterations: search.iterations,
        starts,
        polish_steps,
    })
}
