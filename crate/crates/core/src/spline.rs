//! Initial density profiles built by clamped cubic-spline interpolation.
//!
//! The spline passes through every observed `(distance, density)` sample and
//! has zero slope at both ends, so it is C² on the whole domain and already
//! satisfies the zero-flux boundary condition of the model.

use serde::Serialize;

use crate::pde::DLParams;
use crate::{Error, Result};

/// Tolerance on `|phi'|` at the domain ends.
pub const END_SLOPE_TOLERANCE: f64 = 1e-10;

/// Default grid step (distance units) for the admissibility scan.
pub const DEFAULT_ADMISSIBILITY_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Derivatives {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// A function of distance usable as the initial condition `I(x, 1)`.
pub trait InitialProfile: Sync {
    /// `(l, L)`.
    fn domain(&self) -> (f64, f64);

    /// Value and first two derivatives; `x` must lie in the domain.
    fn derivatives(&self, x: f64) -> Result<Derivatives>;

    fn value(&self, x: f64) -> Result<f64> {
        self.derivatives(x).map(|d| d.value)
    }
}

/// Spatially uniform profile. Used for the equilibria `0` and `K` and for
/// checks against the logistic closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfile {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl InitialProfile for ConstantProfile {
    fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    fn derivatives(&self, x: f64) -> Result<Derivatives> {
        check_domain(x, self.lower, self.upper)?;
        Ok(Derivatives {
            value: self.level,
            first: 0.0,
            second: 0.0,
        })
    }
}

fn check_domain(x: f64, lower: f64, upper: f64) -> Result<()> {
    if !(lower..=upper).contains(&x) {
        return Err(Error::OutOfRange {
            what: "distance",
            value: x,
            range: format!("[{lower}, {upper}]"),
        });
    }
    Ok(())
}

/// One cubic `a + b s + c s^2 + d s^3` with `s = x - x0` on `[x0, x0 + h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicPiece {
    pub x0: f64,
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CubicPiece {
    pub fn eval(&self, s: f64) -> Derivatives {
        let Self { a, b, c, d, .. } = *self;
        Derivatives {
            value: a + s * (b + s * (c + s * d)),
            first: b + s * (2.0 * c + s * 3.0 * d),
            second: 2.0 * c + 6.0 * d * s,
        }
    }

    /// Minimum value over the piece (endpoints and interior critical points).
    fn min_value(&self) -> (f64, f64) {
        let mut best = (self.eval(0.0).value, self.x0);
        let mut consider = |s: f64| {
            if s > 0.0 && s <= self.h {
                let v = self.eval(s).value;
                if v < best.0 {
                    best = (v, self.x0 + s);
                }
            }
        };
        consider(self.h);
        // b + 2c s + 3d s^2 = 0
        let (qa, qb, qc) = (3.0 * self.d, 2.0 * self.c, self.b);
        if qa.abs() < f64::EPSILON * (qb.abs() + qc.abs()).max(1.0) {
            if qb != 0.0 {
                consider(-qc / qb);
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                consider((-qb + sq) / (2.0 * qa));
                consider((-qb - sq) / (2.0 * qa));
            }
        }
        best
    }
}

/// The initial density `phi(x)` on `[l, L]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialDensity {
    knots: Vec<(f64, f64)>,
    pieces: Vec<CubicPiece>,
}

impl InitialDensity {
    /// Clamped cubic spline with zero end slopes through `samples`.
    ///
    /// Requires at least three samples with strictly increasing abscissae,
    /// finite non-negative values, not all zero. Fails if the spline dips
    /// below zero between knots.
    pub fn build(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::invalid(format!(
                "at least 3 samples are required, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid("samples must be finite"));
        }
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid(
                "sample abscissae must be strictly increasing (no duplicates)",
            ));
        }
        if let Some(&(x, y)) = samples.iter().find(|(_, y)| *y < 0.0) {
            return Err(Error::invalid(format!("negative density {y} at x = {x}")));
        }
        if samples.iter().all(|(_, y)| *y == 0.0) {
            return Err(Error::invalid("initial density is identically zero"));
        }

        let moments = clamped_moments(samples);
        let pieces: Vec<CubicPiece> = samples
            .windows(2)
            .zip(moments.windows(2))
            .map(|(p, m)| {
                let ((x0, y0), (x1, y1)) = (p[0], p[1]);
                let h = x1 - x0;
                CubicPiece {
                    x0,
                    h,
                    a: y0,
                    b: (y1 - y0) / h - h * (2.0 * m[0] + m[1]) / 6.0,
                    c: m[0] / 2.0,
                    d: (m[1] - m[0]) / (6.0 * h),
                }
            })
            .collect();

        let phi = InitialDensity {
            knots: samples.to_vec(),
            pieces,
        };
        let scale = samples.iter().fold(0.0f64, |m, (_, y)| m.max(*y));
        let (min, at) = phi
            .pieces
            .iter()
            .map(CubicPiece::min_value)
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
        if min < -1e-12 * scale {
            return Err(Error::invalid(format!(
                "spline overshoots below zero (phi({at:.4}) = {min:.6e})"
            )));
        }
        Ok(phi)
    }

    /// Convenience for integer-distance samples.
    pub fn from_slice<'a, I>(samples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a u32, &'a f64)>,
    {
        let pts: Vec<(f64, f64)> = samples.into_iter().map(|(&x, &y)| (x as f64, y)).collect();
        Self::build(&pts)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn pieces(&self) -> &[CubicPiece] {
        &self.pieces
    }

    pub fn lower(&self) -> f64 {
        self.knots[0].0
    }

    pub fn upper(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    fn piece_index(&self, x: f64) -> usize {
        // last piece whose left end is <= x
        self.pieces
            .partition_point(|p| p.x0 <= x)
            .saturating_sub(1)
    }
}

impl InitialProfile for InitialDensity {
    fn domain(&self) -> (f64, f64) {
        (self.lower(), self.upper())
    }

    fn derivatives(&self, x: f64) -> Result<Derivatives> {
        check_domain(x, self.lower(), self.upper())?;
        let i = self.piece_index(x);
        let p = &self.pieces[i];
        let mut d = p.eval(x - p.x0);
        if x == self.upper() {
            d.value = self.knots[self.knots.len() - 1].1;
        }
        Ok(d)
    }
}

/// Second derivatives at the knots for zero end slopes.
///
/// Row 0:   2 h0 M0 + h0 M1 = 6 (y1 - y0) / h0
/// Row i:   h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (Δ_i - Δ_{i-1})
/// Row n:   h_{n-1} M_{n-1} + 2 h_{n-1} M_n = -6 Δ_{n-1}
fn clamped_moments(samples: &[(f64, f64)]) -> Vec<f64> {
    let n = samples.len();
    let h: Vec<f64> = samples.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let slope: Vec<f64> = samples
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1].1 - w[0].1) / h)
        .collect();

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0 * h[0];
    sup[0] = h[0];
    rhs[0] = 6.0 * slope[0];
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    sub[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = -6.0 * slope[n - 2];
    crate::pde::thomas_solve(&sub, &diag, &sup, &mut rhs);
    rhs
}

/// Outcome of scanning `d phi'' + r(1) phi (1 - phi/K) >= 0` over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub passed: bool,
    pub min_residual: f64,
    pub min_residual_at: f64,
    /// Grid abscissae where the residual is negative.
    pub violations: Vec<f64>,
    pub grid_step: f64,
    /// The growth rate is time-dependent; the scan uses its value at t = 1.
    pub rate_at_t1: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    pub flat_ends: bool,
}

/// Checks whether `phi` is a lower time-independent solution for `params`.
pub fn check_lower_solution<P: InitialProfile + ?Sized>(
    phi: &P,
    params: &DLParams,
    grid_step: f64,
) -> Result<AdmissibilityReport> {
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid_step must be positive"));
    }
    let (l, u) = phi.domain();
    let r = params.growth.rate(1.0)?;
    let (d, k) = (params.diffusion, params.capacity);
    let slack = 1e-12 * (r * k).max(1.0);
    let steps = ((u - l) / grid_step).ceil().max(1.0) as usize;

    let mut report = AdmissibilityReport {
        passed: true,
        min_residual: f64::INFINITY,
        min_residual_at: l,
        violations: Vec::new(),
        grid_step,
        rate_at_t1: r,
        left_slope: phi.derivatives(l)?.first,
        right_slope: phi.derivatives(u)?.first,
        flat_ends: true,
    };
    for i in 0..=steps {
        let x = if i == steps { u } else { l + i as f64 * grid_step };
        let der = phi.derivatives(x)?;
        let res = d * der.second + r * der.value * (1.0 - der.value / k);
        if res < report.min_residual {
            report.min_residual = res;
            report.min_residual_at = x;
        }
        if res < -slack {
            report.violations.push(x);
        }
    }
    report.flat_ends = report.left_slope.abs() < END_SLOPE_TOLERANCE
        && report.right_slope.abs() < END_SLOPE_TOLERANCE;
    report.passed = report.violations.is_empty() && report.flat_ends;
    Ok(report)
}
