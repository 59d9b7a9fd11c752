//! Numerical solution of the diffusive logistic equation
//!
//! ```text
//! dI/dt = d d²I/dx² + r(t) I (1 - I/K),   l <= x <= L, t >= 1
//! I(x, 1) = phi(x)
//! dI/dx(l, t) = dI/dx(L, t) = 0
//! ```
//!
//! Diffusion is advanced with Crank-Nicolson on a uniform grid, closed at
//! both ends with second-order ghost points (`I[-1] = I[1]`,
//! `I[N+1] = I[N-1]`). The reaction term is explicit: a half-step predictor
//! followed by the reaction evaluated at `t + dt/2`. The resulting
//! tridiagonal system has constant coefficients and is factored once.

use serde::{Deserialize, Serialize};

use crate::events::{write_matrix, DensitySurface};
use crate::exec::Execution;
use crate::spline::InitialProfile;
use crate::{Error, Result};

pub const DEFAULT_DX: f64 = 0.05;
pub const DEFAULT_DT: f64 = 0.01;
pub const SCHEME_ID: &str = "crank-nicolson/ghost-neumann/midpoint-reaction";

/// Relative slack (in units of K) under which tiny excursions below 0 or
/// above K are clamped back as roundoff.
pub const ROUNDOFF_SLACK: f64 = 1e-9;
/// Relative band (in units of K) outside of which the solve aborts.
pub const INSTABILITY_BAND: f64 = 1e-6;

/// `r(t) = a exp(-b (t - 1)) + c` for `t >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GrowthRate {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        GrowthRate { a, b, c }
    }

    pub fn constant(c: f64) -> Self {
        GrowthRate { a: 0.0, b: 0.0, c }
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(Error::OutOfRange {
                what: "time",
                value: t,
                range: "[1, inf)".into(),
            });
        }
        Ok(self.rate_unchecked(t))
    }

    #[inline]
    fn rate_unchecked(&self, t: f64) -> f64 {
        self.a * (-self.b * (t - 1.0)).exp() + self.c
    }

    /// `∫_1^t r(s) ds`.
    pub fn cumulative(&self, t: f64) -> f64 {
        let s = t - 1.0;
        let decay = if self.b == 0.0 {
            self.a * s
        } else {
            self.a / self.b * -(-self.b * s).exp_m1()
        };
        decay + self.c * s
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!(
                    "growth-rate coefficient {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Model parameters. Serialized with the short keys `d`, `r`, `K`, `l`, `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DLParams {
    #[serde(rename = "d")]
    pub diffusion: f64,
    #[serde(rename = "r")]
    pub growth: GrowthRate,
    #[serde(rename = "K")]
    pub capacity: f64,
    #[serde(rename = "l")]
    pub lower: f64,
    #[serde(rename = "L")]
    pub upper: f64,
}

impl DLParams {
    pub fn new(
        diffusion: f64,
        growth: GrowthRate,
        capacity: f64,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let p = DLParams {
            diffusion,
            growth,
            capacity,
            lower,
            upper,
        };
        p.validate()?;
        Ok(p)
    }

    /// `d >= 0`, `0 < K <= 100` (percent), `l < L`, growth coefficients
    /// non-negative. `r ≡ 0` is allowed for pure-diffusion runs.
    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion.is_finite() && self.diffusion >= 0.0) {
            return Err(Error::invalid(format!(
                "diffusion rate must be finite and >= 0, got {}",
                self.diffusion
            )));
        }
        if !(self.capacity > 0.0 && self.capacity <= 100.0) {
            return Err(Error::invalid(format!(
                "carrying capacity must lie in (0, 100], got {}",
                self.capacity
            )));
        }
        if !(self.lower.is_finite() && self.upper.is_finite() && self.upper > self.lower) {
            return Err(Error::invalid(format!(
                "domain bounds must satisfy l < L, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        self.growth.validate()
    }

    pub fn growth_rate(&self, t: f64) -> Result<f64> {
        self.growth.rate(t)
    }
}

/// Grid resolution and horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dx: f64,
    pub dt: f64,
    /// Last whole hour to record (`>= 2`).
    pub t_end: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dx: DEFAULT_DX,
            dt: DEFAULT_DT,
            t_end: 6,
        }
    }
}

/// Thomas algorithm, in place: on return `rhs` holds the solution.
///
/// `sub[0]` and `sup[n-1]` are ignored.
pub fn thomas_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / m;
        }
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Pre-factored constant tridiagonal matrix for repeated Thomas solves.
struct Tridiagonal {
    sub: Vec<f64>,
    /// Modified super-diagonal.
    c: Vec<f64>,
    /// Reciprocal pivots.
    inv_m: Vec<f64>,
}

impl Tridiagonal {
    fn factor(sub: Vec<f64>, diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        let mut c = vec![0.0; n];
        let mut inv_m = vec![0.0; n];
        inv_m[0] = 1.0 / diag[0];
        c[0] = sup[0] * inv_m[0];
        for i in 1..n {
            inv_m[i] = 1.0 / (diag[i] - sub[i] * c[i - 1]);
            if i < n - 1 {
                c[i] = sup[i] * inv_m[i];
            }
        }
        Tridiagonal { sub, c, inv_m }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_m[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv_m[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c[i] * rhs[i + 1];
        }
    }
}

/// Numerical solution sampled at every whole hour `1..=t_end`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionGrid {
    x: Vec<f64>,
    /// `snapshots[t - 1][node]`.
    snapshots: Vec<Vec<f64>>,
    pub params: DLParams,
    pub dx: f64,
    pub dt: f64,
    pub scheme: &'static str,
}

fn grid_intervals(span: f64, dx: f64) -> Result<usize> {
    if !(dx > 0.0) {
        return Err(Error::invalid("dx must be positive"));
    }
    let n = (span / dx).round();
    if (n * dx - span).abs() > 1e-9 * span {
        return Err(Error::invalid(format!(
            "dx = {dx} does not divide the domain length {span}"
        )));
    }
    if n < 8.0 {
        return Err(Error::invalid(format!(
            "dx = {dx} gives {n} intervals; at least 8 are required"
        )));
    }
    Ok(n as usize)
}

fn steps_per_hour(dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(Error::invalid("dt must lie in (0, 1]"));
    }
    let n = (1.0 / dt).round();
    if (n * dt - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "dt = {dt} must divide one hour into a whole number of steps"
        )));
    }
    Ok(n as usize)
}

/// Advances `phi` from t = 1 to `config.t_end`.
pub fn solve<P: InitialProfile + ?Sized>(
    params: &DLParams,
    phi: &P,
    config: &SolverConfig,
) -> Result<SolutionGrid> {
    params.validate()?;
    let (l, u) = (params.lower, params.upper);
    let (pl, pu) = phi.domain();
    if (pl - l).abs() > 1e-9 || (pu - u).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "initial profile domain [{pl}, {pu}] differs from parameter domain [{l}, {u}]"
        )));
    }
    if config.t_end < 2 {
        return Err(Error::invalid("t_end must be at least 2"));
    }
    let n = grid_intervals(u - l, config.dx)?;
    let per_hour = steps_per_hour(config.dt)?;
    let dx = (u - l) / n as f64;
    let dt = 1.0 / per_hour as f64;

    let x: Vec<f64> = (0..=n)
        .map(|i| if i == n { u } else { l + i as f64 * dx })
        .collect();
    let mut cur = x
        .iter()
        .map(|&xi| phi.value(xi.clamp(pl, pu)))
        .collect::<Result<Vec<f64>>>()?;

    let k = params.capacity;
    let lam = params.diffusion * dt / (dx * dx);
    let half = 0.5 * lam;

    // (I - dt/2 d A) with ghost-point rows at both ends
    let m = n + 1;
    let mut sub = vec![-half; m];
    let diag = vec![1.0 + lam; m];
    let mut sup = vec![-half; m];
    sup[0] = -lam;
    sub[n] = -lam;
    sub[0] = 0.0;
    sup[n] = 0.0;
    let lhs = Tridiagonal::factor(sub, &diag, &sup);

    let growth = params.growth;
    let reaction = |v: f64| v * (1.0 - v / k);
    let lo_abort = -INSTABILITY_BAND * k;
    let hi_abort = k * (1.0 + INSTABILITY_BAND);
    let lo_clamp = -ROUNDOFF_SLACK * k;
    let hi_clamp = k * (1.0 + ROUNDOFF_SLACK);

    let mut snapshots = Vec::with_capacity(config.t_end as usize);
    snapshots.push(cur.clone());
    let mut rhs = vec![0.0; m];
    let total = per_hour * (config.t_end as usize - 1);
    for step in 0..total {
        let t = 1.0 + step as f64 * dt;
        let r_now = growth.rate_unchecked(t);
        let r_mid = growth.rate_unchecked(t + 0.5 * dt);
        for i in 0..m {
            let left = if i == 0 { cur[1] } else { cur[i - 1] };
            let right = if i == n { cur[n - 1] } else { cur[i + 1] };
            let lap = left - 2.0 * cur[i] + right;
            let pred = cur[i] + 0.5 * dt * r_now * reaction(cur[i]);
            rhs[i] = cur[i] + half * lap + dt * r_mid * reaction(pred);
        }
        lhs.solve(&mut rhs);
        for (i, v) in rhs.iter_mut().enumerate() {
            let bad = !v.is_finite() || *v < lo_abort || *v > hi_abort || *v < lo_clamp;
            if bad {
                return Err(Error::Instability {
                    step: step + 1,
                    time: t + dt,
                    node: i,
                    value: *v,
                });
            }
            if *v < 0.0 {
                *v = 0.0;
            } else if *v > k && *v <= hi_clamp {
                *v = k;
            }
        }
        std::mem::swap(&mut cur, &mut rhs);
        if (step + 1) % per_hour == 0 {
            snapshots.push(cur.clone());
        }
    }

    Ok(SolutionGrid {
        x,
        snapshots,
        params: *params,
        dx,
        dt,
        scheme: SCHEME_ID,
    })
}

/// Solves independent `(params, profile)` jobs, in input order.
pub fn solve_batch<P: InitialProfile>(
    jobs: &[(DLParams, P)],
    config: &SolverConfig,
    exec: Execution,
) -> Vec<Result<SolutionGrid>> {
    exec.map(jobs, |(p, phi)| solve(p, phi, config))
}

impl SolutionGrid {
    pub fn x_grid(&self) -> &[f64] {
        &self.x
    }

    pub fn t_end(&self) -> u32 {
        self.snapshots.len() as u32
    }

    /// All node values at whole hour `t`.
    pub fn at_time(&self, t: u32) -> Option<&[f64]> {
        if t == 0 {
            return None;
        }
        self.snapshots.get(t as usize - 1).map(Vec::as_slice)
    }

    fn node_for(&self, x: f64) -> usize {
        let i = ((x - self.params.lower) / self.dx).round();
        (i.max(0.0) as usize).min(self.x.len() - 1)
    }

    /// Value at the grid node nearest to distance `x` at hour `t`.
    pub fn predict_at(&self, x: u32, t: u32) -> Result<f64> {
        let xf = x as f64;
        if xf < self.params.lower - 1e-9 || xf > self.params.upper + 1e-9 {
            return Err(Error::OutOfRange {
                what: "distance",
                value: xf,
                range: format!("[{}, {}]", self.params.lower, self.params.upper),
            });
        }
        let snap = self.at_time(t).ok_or_else(|| Error::OutOfRange {
            what: "time",
            value: t as f64,
            range: format!("[1, {}]", self.t_end()),
        })?;
        Ok(snap[self.node_for(xf)])
    }

    /// Integer distances covered by the domain.
    pub fn integer_distances(&self) -> Vec<u32> {
        let lo = self.params.lower.max(0.0).ceil() as u32;
        let hi = self.params.upper.floor() as u32;
        (lo..=hi).collect()
    }

    /// Trapezoid-rule integral of `I(., t)` over `[l, L]`.
    pub fn mass(&self, t: u32) -> Option<f64> {
        let v = self.at_time(t)?;
        let inner: f64 = v[1..v.len() - 1].iter().sum();
        Some(self.dx * (inner + 0.5 * (v[0] + v[v.len() - 1])))
    }

    /// Samples at integer distances, in the density-surface matrix layout.
    pub fn to_surface(&self) -> Result<DensitySurface> {
        let xs = self.integer_distances();
        let rows = xs
            .iter()
            .map(|&x| (1..=self.t_end()).map(|t| self.predict_at(x, t)).collect())
            .collect::<Result<Vec<Vec<f64>>>>()?;
        DensitySurface::new(xs, rows)
    }

    /// Full-grid matrix `x,t1,...,tT` for plotting.
    pub fn write_grid_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let rows: Vec<Vec<f64>> = (0..self.x.len())
            .map(|i| self.snapshots.iter().map(|s| s[i]).collect())
            .collect();
        write_matrix(
            writer,
            "x",
            self.x.iter().map(|x| x.to_string()),
            self.t_end(),
            &rows,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub passed: bool,
    pub min: f64,
    pub max: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    pub held: bool,
    /// Only expected to hold when the initial profile passed the
    /// admissibility check; otherwise informational.
    pub expected: bool,
    /// Largest `I[x][t] - I[x][t+1]` observed (negative when strictly increasing).
    pub worst_decrease: f64,
    pub worst_at: Option<(f64, u32)>,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxCheck {
    pub passed: bool,
    /// Max over hours of `|(I[1] - I[0]) / dx|`; carries an `O(dx)` bias.
    pub left_first_order: f64,
    pub right_first_order: f64,
    /// Max over hours of `|(-3 I[0] + 4 I[1] - I[2]) / (2 dx)|`.
    pub left: f64,
    pub right: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub passed: bool,
    pub bounds: BoundsCheck,
    pub monotonicity: MonotonicityCheck,
    pub boundary_flux: FluxCheck,
}

/// Checks `0 <= I <= K`, temporal monotonicity and zero boundary flux.
///
/// `phi_admissible` is the verdict of the initial profile's lower-solution
/// check; monotonicity counts toward `passed` only when it is true.
pub fn verify_properties(solution: &SolutionGrid, phi_admissible: bool) -> PropertyReport {
    let k = solution.params.capacity;
    let slack = ROUNDOFF_SLACK * k;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in solution.snapshots.iter().flatten() {
        min = min.min(*v);
        max = max.max(*v);
    }
    let bounds = BoundsCheck {
        passed: min >= -slack && max <= k + slack,
        min,
        max,
        slack,
    };

    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = None;
    for (t, pair) in solution.snapshots.windows(2).enumerate() {
        for (i, (a, b)) in pair[0].iter().zip(&pair[1]).enumerate() {
            if a - b > worst {
                worst = a - b;
                worst_at = Some((solution.x[i], t as u32 + 1));
            }
        }
    }
    let monotonicity = MonotonicityCheck {
        held: worst <= slack,
        expected: phi_admissible,
        worst_decrease: worst,
        worst_at,
        slack,
    };

    let dx = solution.dx;
    let (mut lf, mut rf, mut l2, mut r2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for s in &solution.snapshots {
        let n = s.len() - 1;
        lf = lf.max(((s[1] - s[0]) / dx).abs());
        rf = rf.max(((s[n] - s[n - 1]) / dx).abs());
        l2 = l2.max(((-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dx)).abs());
        r2 = r2.max(((3.0 * s[n] - 4.0 * s[n - 1] + s[n - 2]) / (2.0 * dx)).abs());
    }
    let tolerance = FLUX_TOLERANCE * k / (solution.params.upper - solution.params.lower);
    let boundary_flux = FluxCheck {
        passed: l2 <= tolerance && r2 <= tolerance,
        left_first_order: lf,
        right_first_order: rf,
        left: l2,
        right: r2,
        tolerance,
    };

    PropertyReport {
        passed: bounds.passed && boundary_flux.passed && (monotonicity.held || !phi_admissible),
        bounds,
        monotonicity,
        boundary_flux,
    }
}

/// Boundary slope tolerance as a fraction of `K / (L - l)`.
pub const FLUX_TOLERANCE: f64 = 1e-2;
