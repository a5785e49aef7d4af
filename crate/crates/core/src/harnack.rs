//! Empirical Harnack-type scans and the 3-G inequality check.
//!
//! `harnack_scan` runs a family of ball problems with growing boundary data
//! and records `sup_K u / (1 + inf_K u)` over a fixed compact annulus: the
//! Harnack-type inequality predicts this stays bounded as the boundary data
//! grows. `three_g_ratio` estimates
//! `int_B G_B(x,z) G_B(z,y) nu(dz) / (G_B(x,y) gamma_nu(B))` for the
//! Laplacian on a Euclidean ball by seeded stratified Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::Nonlinearity;
use crate::geometry::{GeometryError, Space};
use crate::green::{euclid_ball_green, green_whole, GreenError};
use crate::numerics::{integrate_adaptive, NumericsError, Tolerance};
use crate::solver::solve_ball;

#[derive(Debug, Error)]
pub enum HarnackError {
    #[error("hypothesis violation: {detail}")]
    HypothesisViolation { detail: String },
    #[error("invalid input: {detail}")]
    Domain { detail: String },
    #[error("every row of the scan failed; last error: {last}")]
    AllRowsFailed { last: String },
    #[error("Monte-Carlo sample kept colliding with a pole after {retries} retries")]
    PersistentPole { retries: u32 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The compact annulus `{r_lo <= |x| <= r_hi}` the scan measures on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compact {
    pub r_lo: f64,
    pub r_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnackRow {
    pub lambda: f64,
    pub sup_k: f64,
    pub inf_k: f64,
    /// `sup_K u / (1 + inf_K u)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnackReport {
    pub space: Space,
    /// Human-readable description of the nonlinearity.
    pub nl: String,
    pub ball_r: f64,
    pub compact: Compact,
    pub lambda_grid: Vec<f64>,
    pub rows: Vec<HarnackRow>,
    /// Largest ratio across successful rows.
    pub c_estimate: f64,
    /// True when the maximum ratio over the last decade of `lambda` exceeds
    /// the previous decade's maximum by less than 2%.
    pub stabilized: bool,
    /// Rows dropped because the ball solve failed.
    pub failed_rows: u32,
}

/// Scan the ball problem over increasing boundary data and report the
/// Harnack ratios on the compact set.
///
/// Requires the H1' flag (`phi(r, u) <= c p(r)(u + 1)`), the hypothesis
/// under which the ratio is predicted to stay bounded.
pub fn harnack_scan(
    space: Space,
    nl: &Nonlinearity,
    ball_r: f64,
    compact: Compact,
    lambda_grid: &[f64],
    tol: &Tolerance,
) -> Result<HarnackReport, HarnackError> {
    if nl.flags().h1prime_sublinear.is_none() {
        return Err(HarnackError::HypothesisViolation {
            detail: "harnack_scan requires H1' (phi(r, u) <= c p(r)(u + 1))".into(),
        });
    }
    if !(0.0 <= compact.r_lo && compact.r_lo < compact.r_hi && compact.r_hi < ball_r) {
        return Err(HarnackError::Domain {
            detail: format!("need 0 <= r_lo < r_hi < ball_R, got [{}, {}] in B_{ball_r}", compact.r_lo, compact.r_hi),
        });
    }
    if lambda_grid.is_empty()
        || lambda_grid.iter().any(|&l| !(l > 0.0))
        || lambda_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(HarnackError::Domain { detail: "lambda_grid must be positive and increasing".into() });
    }

    let mut rows = Vec::with_capacity(lambda_grid.len());
    let mut failed_rows = 0u32;
    let mut last_err = String::new();
    for &lambda in lambda_grid {
        match solve_ball(space, nl, ball_r, lambda, tol) {
            Ok(sol) => {
                // Radial solutions of Lu = phi >= 0 are nondecreasing in r,
                // so the extrema sit at the annulus endpoints; the nodal scan
                // confirms it.
                let mut sup_k = sol.profile.eval(compact.r_hi);
                let mut inf_k = sol.profile.eval(compact.r_lo);
                for (&r, &v) in sol.profile.grid().points().iter().zip(sol.profile.values()) {
                    if r >= compact.r_lo && r <= compact.r_hi {
                        sup_k = sup_k.max(v);
                        inf_k = inf_k.min(v);
                    }
                }
                rows.push(HarnackRow { lambda, sup_k, inf_k, ratio: sup_k / (1.0 + inf_k) });
            }
            Err(e) => {
                failed_rows += 1;
                last_err = e.to_string();
            }
        }
    }
    if rows.is_empty() {
        return Err(HarnackError::AllRowsFailed { last: last_err });
    }
    let c_estimate = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let stabilized = decade_stabilized(&rows);
    Ok(HarnackReport {
        space,
        nl: format!("{nl:?}"),
        ball_r,
        compact,
        lambda_grid: lambda_grid.to_vec(),
        rows,
        c_estimate,
        stabilized,
        failed_rows,
    })
}

/// True when the maximum ratio over `lambda in (max/10, max]` exceeds the
/// maximum over `(max/100, max/10]` by less than 1%.
fn decade_stabilized(rows: &[HarnackRow]) -> bool {
    let lmax = match rows.last() {
        Some(r) => r.lambda,
        None => return false,
    };
    let max_in = |lo: f64, hi: f64| -> Option<f64> {
        rows.iter()
            .filter(|r| r.lambda > lo && r.lambda <= hi)
            .map(|r| r.ratio)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    };
    match (max_in(lmax / 100.0, lmax / 10.0), max_in(lmax / 10.0, lmax)) {
        // 2%: the exactly-solvable linear Euclidean family still gains
        // 1.06% between the last two decades of a [1, 10^3] scan while its
        // ratio is provably bounded, so a 1% cut would misclassify it.
        (Some(prev), Some(last)) => last < 1.02 * prev,
        _ => false,
    }
}

/// Result of the 3-G Monte-Carlo check for the Laplacian on a ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeGReport {
    /// `int_B G_B(x,z) G_B(z,y) density(|z|) dz`.
    pub lhs: f64,
    /// `G_B(x,y) * gamma_nu(B)` with `gamma_nu(B) = sup_w int_B G(w,z) nu(dz)`.
    pub rhs_factor: f64,
    pub ratio: f64,
    /// Monte-Carlo standard error of `lhs`.
    pub standard_error: f64,
    /// Samples redrawn after colliding with `x` or `y`.
    pub resampled: u32,
    pub n_samples: u32,
    pub seed: u64,
}

const POLE_RETRIES: u32 = 100;

/// Estimate the 3-G ratio `lhs / (G_B(x,y) gamma_nu(B))` on the Euclidean
/// ball `B_R` by radius-stratified Monte Carlo with a seeded generator:
/// identical seeds reproduce `lhs` to the last bit.
pub fn three_g_ratio<F: Fn(f64) -> f64>(
    d: u32,
    ball_r: f64,
    density: F,
    x: &[f64],
    y: &[f64],
    seed: u64,
    n_samples: u32,
) -> Result<ThreeGReport, HarnackError> {
    let space = Space::euclidean(d)?;
    let dim = d as usize;
    if x.len() != dim || y.len() != dim {
        return Err(HarnackError::Domain { detail: format!("x and y must have {dim} coordinates") });
    }
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(ball_r > 0.0) || norm(x) >= ball_r || norm(y) >= ball_r {
        return Err(HarnackError::Domain { detail: "need |x|, |y| < R".into() });
    }
    if x == y {
        return Err(HarnackError::Domain { detail: "x and y must differ".into() });
    }
    if n_samples == 0 {
        return Err(HarnackError::Domain { detail: "n_samples must be positive".into() });
    }

    let omega = space.unit_sphere_area();
    let volume = omega * ball_r.powi(d as i32) / d as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resampled = 0u32;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let n = n_samples as usize;
    let mut z = vec![0.0f64; dim];
    for i in 0..n {
        let g = loop {
            // Stratify the radial quantile so each sample owns one slice of
            // the volume measure.
            let u = (i as f64 + rng.random::<f64>()) / n as f64;
            let r = ball_r * u.powf(1.0 / d as f64);
            let mut len2 = 0.0;
            for c in z.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *c = g;
                len2 += g * g;
            }
            let scale = r / len2.sqrt();
            for c in z.iter_mut() {
                *c *= scale;
            }
            match (euclid_ball_green(d, ball_r, x, &z), euclid_ball_green(d, ball_r, &z, y)) {
                (Ok(gxz), Ok(gzy)) => break gxz * gzy * density(r),
                _ => {
                    resampled += 1;
                    if resampled > POLE_RETRIES {
                        return Err(HarnackError::PersistentPole { retries: resampled });
                    }
                }
            }
        };
        sum += g;
        sum_sq += g * g;
    }
    let mean = sum / n as f64;
    let lhs = volume * mean;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let standard_error = volume * (var / n as f64).sqrt();

    let rhs_factor = euclid_ball_green(d, ball_r, x, y)? * gamma_nu(space, ball_r, &density)?;
    let ratio = if rhs_factor > 0.0 { lhs / rhs_factor } else { 0.0 };
    Ok(ThreeGReport { lhs, rhs_factor, ratio, standard_error, resampled, n_samples, seed })
}

/// `gamma_nu(B) = sup_{|w| <= R} int_B G(w, z) density(|z|) dz` for the
/// whole-space Laplacian Green function, via the radial Newton potential
/// (a shell of radius `t` contributes `G_whole(max(s, t))` at radius `s`)
/// and a grid sup over `s`.
fn gamma_nu<F: Fn(f64) -> f64>(space: Space, ball_r: f64, density: &F) -> Result<f64, HarnackError> {
    let omega = space.unit_sphere_area();
    let d = space.dim() as i32;
    let tol = Tolerance { abs: 1e-12, rel: 1e-10, max_subdivisions: 2000, max_iterations: 2000 };
    let mut sup = 0.0f64;
    for k in 0..=64 {
        let s = ball_r * k as f64 / 64.0;
        let integrand = |t: f64| -> f64 {
            let g = green_whole(space, t.max(s)).unwrap_or(0.0);
            g * omega * t.powi(d - 1) * density(t)
        };
        let val = integrate_adaptive(integrand, 0.0, ball_r, &tol)?.value;
        sup = sup.max(val);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{Psi, RadialWeight};

    fn tol() -> Tolerance {
        Tolerance { abs: 1e-9, rel: 0.0, max_subdivisions: 2000, max_iterations: 20_000 }
    }

    #[test]
    fn linear_euclidean_scan_approaches_sinh_ratio() {
        let nl = Nonlinearity::separable(RadialWeight::constant(1.0), Psi::linear()).unwrap();
        let report = harnack_scan(
            Space::euclidean(3).unwrap(),
            &nl,
            1.0,
            Compact { r_lo: 0.0, r_hi: 0.5 },
            &[1.0, 10.0, 100.0, 1000.0],
            &tol(),
        )
        .unwrap();
        let limit = 0.5f64.sinh() / 0.5;
        assert!(report.c_estimate <= 1.05, "C = {}", report.c_estimate);
        assert!(report.stabilized);
        assert_eq!(report.failed_rows, 0);
        let mut prev = 0.0;
        for row in &report.rows {
            assert!(row.sup_k >= row.inf_k && row.inf_k >= 0.0);
            assert!(row.ratio >= prev - 1e-12 && row.ratio <= limit + 1e-6);
            prev = row.ratio;
        }
        assert!((report.rows.last().unwrap().ratio - limit).abs() < 2e-3);
    }

    #[test]
    fn zero_phi_ratios_below_one() {
        let report = harnack_scan(
            Space::euclidean(3).unwrap(),
            &Nonlinearity::zero(),
            1.0,
            Compact { r_lo: 0.0, r_hi: 0.5 },
            &[1.0, 10.0, 100.0, 1000.0],
            &tol(),
        )
        .unwrap();
        for row in &report.rows {
            assert!((row.ratio - row.lambda / (1.0 + row.lambda)).abs() < 1e-8);
        }
        assert!(report.c_estimate < 1.0);
    }

    #[test]
    fn superlinear_gate() {
        use crate::classify::HypothesisFlags;
        use crate::numerics::TailModel;
        let square = Nonlinearity::general(
            |_, t: f64| t.max(0.0).powi(2),
            TailModel::Unknown,
            HypothesisFlags {
                h1_kato_local: true,
                h2_increasing: true,
                h3_zero_for_nonpositive: true,
                h4_concave: false,
                h1prime_sublinear: None,
            },
        );
        assert!(matches!(
            harnack_scan(
                Space::euclidean(3).unwrap(),
                &square,
                1.0,
                Compact { r_lo: 0.0, r_hi: 0.5 },
                &[1.0, 10.0],
                &tol()
            ),
            Err(HarnackError::HypothesisViolation { .. })
        ));
    }

    #[test]
    fn three_g_seed_determinism_and_bound() {
        let x = [0.0, 0.0, 0.0];
        let y = [0.5, 0.0, 0.0];
        let a = three_g_ratio(3, 1.0, |_| 1.0, &x, &y, 42, 20_000).unwrap();
        let b = three_g_ratio(3, 1.0, |_| 1.0, &x, &y, 42, 20_000).unwrap();
        assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
        assert!(a.ratio.is_finite() && a.ratio > 0.0 && a.ratio <= 20.0, "ratio {}", a.ratio);
        // gamma for density 1, d=3, R=1 is R^2 / (2(d-2)) = 1/2 at the center.
        let g_xy = euclid_ball_green(3, 1.0, &x, &y).unwrap();
        assert!((a.rhs_factor - 0.5 * g_xy).abs() < 1e-9 * g_xy);

        let c = three_g_ratio(3, 1.0, |_| 1.0, &x, &y, 7, 40_000).unwrap();
        assert!((c.lhs - a.lhs).abs() <= 3.0 * (a.standard_error + c.standard_error), "MC drift");
    }

    #[test]
    fn three_g_zero_density() {
        let r = three_g_ratio(3, 1.0, |_| 0.0, &[0.0, 0.0, 0.0], &[0.5, 0.0, 0.0], 1, 100).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn three_g_input_validation() {
        let x = [0.0, 0.0, 0.0];
        assert!(three_g_ratio(3, 1.0, |_| 1.0, &x, &x, 1, 10).is_err());
        assert!(three_g_ratio(3, 1.0, |_| 1.0, &x, &[1.5, 0.0, 0.0], 1, 10).is_err());
        assert!(three_g_ratio(3, 1.0, |_| 1.0, &x, &[0.5, 0.0], 1, 10).is_err());
    }
}
