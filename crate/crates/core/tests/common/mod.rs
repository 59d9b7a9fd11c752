//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use infodiff::spline::InitialDensity;
use rand::Rng;

/// Floyd-Warshall hop counts from `source` over followee -> follower edges.
pub fn brute_force_hops(n: usize, edges: &[(usize, usize)], source: usize) -> Vec<Option<u32>> {
    const INF: u32 = u32::MAX / 2;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    // edge (follower, followee): information flows followee -> follower
    for &(f, g) in edges {
        if f != g {
            d[g][f] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d[source].iter().map(|&v| (v < INF).then_some(v)).collect()
}

/// `1 - |a ∩ b| / |a ∪ b|` by enumerating the union explicitly.
pub fn enumerated_jaccard_distance(a: &HashSet<u32>, b: &HashSet<u32>) -> f64 {
    let union: Vec<u32> = {
        let mut u: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let inter = union.iter().filter(|x| a.contains(x) && b.contains(x)).count();
    1.0 - inter as f64 / union.len() as f64
}

/// Clamped cubic spline in slope (Hermite) form: solves for the knot slopes
/// with a dense Gaussian elimination and evaluates the Hermite basis.
pub struct SlopeSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ks: Vec<f64>,
}

impl SlopeSpline {
    pub fn new(samples: &[(f64, f64)]) -> Self {
        let n = samples.len();
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let mut a = vec![vec![0.0; n]; n];
        let mut rhs = vec![0.0; n];
        a[0][0] = 1.0;
        a[n - 1][n - 1] = 1.0;
        for i in 1..n - 1 {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            a[i][i - 1] = 1.0 / hl;
            a[i][i] = 2.0 / hl + 2.0 / hr;
            a[i][i + 1] = 1.0 / hr;
            rhs[i] = 3.0 * ((ys[i] - ys[i - 1]) / (hl * hl) + (ys[i + 1] - ys[i]) / (hr * hr));
        }
        let ks = gauss_solve(a, rhs);
        SlopeSpline { xs, ys, ks }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = match self.xs.iter().rposition(|&k| k <= x) {
            Some(i) if i == self.xs.len() - 1 => i - 1,
            Some(i) => i,
            None => 0,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ks[i] + h01 * self.ys[i + 1] + h11 * h * self.ks[i + 1]
    }
}

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Closed-form logistic with time-varying rate `a e^{-b(t-1)} + c`.
pub fn logistic_closed_form(k: f64, c0: f64, a: f64, b: f64, c: f64, t: f64) -> f64 {
    let s = t - 1.0;
    let integral = if b == 0.0 { (a + c) * s } else { a / b * (1.0 - (-b * s).exp()) + c * s };
    k / (1.0 + (k / c0 - 1.0) * (-integral).exp())
}

/// Random knots at `1..=n` with values in `[lo, hi]`, retried until the
/// spline builds (no negative overshoot).
pub fn random_profile<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> (Vec<(f64, f64)>, InitialDensity) {
    loop {
        let samples: Vec<(f64, f64)> =
            (1..=n).map(|i| (i as f64, rng.gen_range(lo..hi))).collect();
        if let Ok(phi) = InitialDensity::build(&samples) {
            return (samples, phi);
        }
    }
}

/// Random strictly increasing abscissae with non-uniform spacing.
pub fn random_samples<R: Rng>(rng: &mut R, n: usize) -> Vec<(f64, f64)> {
    let mut x = rng.gen_range(0.0..2.0);
    (0..n)
        .map(|_| {
            let p = (x, rng.gen_range(0.5..50.0));
            x += rng.gen_range(0.3..2.0);
            p
        })
        .collect()
}

pub fn count_map(xs: &[u32]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}
