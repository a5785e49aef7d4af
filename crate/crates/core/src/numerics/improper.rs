//! Improper integrals over `[a, inf)` with convergence/divergence detection
//! from dyadic block sums.

use serde::{Deserialize, Serialize};

use super::quad::integrate_adaptive;
use super::{NumericsError, Tolerance};

/// Declared asymptotic behavior of an integrand for `r -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    Exponential { rate: f64 },
    Power { exponent: f64 },
    Unknown,
}

/// Outcome of an improper-integral evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConvergenceVerdict {
    Converges {
        value: f64,
        error_estimate: f64,
    },
    Diverges {
        partial_sums: Vec<f64>,
        fitted_tail_exponent: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl ConvergenceVerdict {
    pub fn is_convergent(&self) -> bool {
        matches!(self, ConvergenceVerdict::Converges { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ConvergenceVerdict::Diverges { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ConvergenceVerdict::Converges { value, .. } => Some(*value),
            _ => None,
        }
    }
}

const MAX_BLOCKS: usize = 64;
// Block-sum ratio below which the tail is summable with a clear margin:
// 2^(p+1) < 2^(-0.1), i.e. fitted exponent p < -1.1.
const CONVERGE_RATIO: f64 = 0.933;
// Fitted exponent at or above -1 (with a small guard) means the blocks fail
// to decay; the harmonic boundary case p = -1 lands here.
const DIVERGE_EXPONENT: f64 = -1.01;
const DIVERGE_STREAK: usize = 6;

/// Evaluate `int_a^inf f` by summing blocks `[a + 2^k - 1, a + 2^(k+1) - 1]`
/// of doubling width.
///
/// Convergence is declared when the block sums decay geometrically with a
/// margin and the extrapolated tail drops below the tolerance; divergence
/// when the fitted block exponent sits at or above the harmonic boundary for
/// [`DIVERGE_STREAK`] consecutive blocks. Everything else is reported as
/// inconclusive rather than guessed.
pub fn integrate_improper<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    tail: TailModel,
    tol: &Tolerance,
) -> Result<ConvergenceVerdict, NumericsError> {
    if !a.is_finite() || a < 0.0 {
        return Err(NumericsError::InvalidInput {
            detail: format!("improper integral lower bound must be finite and >= 0, got {a}"),
        });
    }
    let block_tol = Tolerance {
        abs: (tol.abs / 64.0).max(1e-300),
        rel: tol.rel.min(1e-10),
        max_subdivisions: tol.max_subdivisions,
        max_iterations: tol.max_iterations,
    };

    let mut sum = 0.0f64;
    let mut quad_err = 0.0f64;
    let mut partial_sums = Vec::with_capacity(MAX_BLOCKS);
    let mut blocks: Vec<f64> = Vec::with_capacity(MAX_BLOCKS);
    let mut diverge_streak = 0usize;
    let mut fitted_history: Vec<f64> = Vec::new();

    let mut lo = a;
    for k in 0..MAX_BLOCKS {
        let width = 2f64.powi(k as i32);
        let hi = lo + width;
        let (bv, be) = match integrate_adaptive(&f, lo, hi, &block_tol) {
            Ok(r) => (r.value, r.error),
            // Keep the best estimate; the degraded error widens the budget.
            Err(NumericsError::SubdivisionLimit { value, error }) => (value, error),
            Err(e) => return Err(e),
        };
        sum += bv;
        quad_err += be;
        blocks.push(bv);
        partial_sums.push(sum);

        let ratio = if k >= 1 && blocks[k - 1] > 0.0 { Some(bv / blocks[k - 1]) } else { None };

        // Divergence: fitted exponent log2(ratio) - 1 at or above -1.
        if let Some(r) = ratio {
            if k >= 2 && r > 0.0 {
                let fitted = r.log2() - 1.0;
                if fitted >= DIVERGE_EXPONENT {
                    diverge_streak += 1;
                    fitted_history.push(fitted);
                    if diverge_streak >= DIVERGE_STREAK {
                        let n = fitted_history.len();
                        let fitted_tail_exponent =
                            fitted_history[n - DIVERGE_STREAK..].iter().sum::<f64>() / DIVERGE_STREAK as f64;
                        return Ok(ConvergenceVerdict::Diverges { partial_sums, fitted_tail_exponent });
                    }
                } else {
                    diverge_streak = 0;
                    fitted_history.clear();
                }
            }
        }

        // Convergence: geometric extrapolation of the remaining tail.
        let min_blocks = match tail {
            TailModel::Exponential { .. } => 2,
            _ => 4,
        };
        if k + 1 >= min_blocks {
            let recent = &blocks[blocks.len().saturating_sub(3)..];
            let mut rho: f64 = 0.0;
            let mut decaying = true;
            for w in recent.windows(2) {
                if w[0] <= 0.0 {
                    decaying = w[1] <= 0.0;
                    continue;
                }
                let r = (w[1] / w[0]).max(0.0);
                rho = rho.max(r);
                if r >= CONVERGE_RATIO {
                    decaying = false;
                }
            }
            if decaying {
                let last = blocks[blocks.len() - 1].max(0.0);
                let tail_est = if rho > 0.0 { last * rho / (1.0 - rho) } else { 0.0 };
                let target = tol.target(sum);
                if tail_est <= 0.5 * target {
                    return Ok(ConvergenceVerdict::Converges {
                        value: sum + tail_est,
                        error_estimate: 0.5 * tail_est + quad_err,
                    });
                }
            }
        }

        lo = hi;
        if lo > 1e15 {
            break;
        }
    }

    Ok(ConvergenceVerdict::Inconclusive {
        reason: format!(
            "block budget exhausted at r = {lo:.3e} without a clear convergence or divergence signal"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance { abs: 1e-9, rel: 1e-9, ..Tolerance::default() }
    }

    #[test]
    fn exponential_converges_to_one() {
        let v = integrate_improper(|r| (-r).exp(), 0.0, TailModel::Exponential { rate: 1.0 }, &tol()).unwrap();
        match v {
            ConvergenceVerdict::Converges { value, error_estimate } => {
                assert!((value - 1.0).abs() <= 1e-8, "value {value}");
                assert!(error_estimate <= 1e-8);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn power_tail_converges_to_half() {
        let v = integrate_improper(|r| r * (1.0 + r).powi(-3), 0.0, TailModel::Power { exponent: -2.0 }, &tol())
            .unwrap();
        match v {
            ConvergenceVerdict::Converges { value, .. } => {
                assert!((value - 0.5).abs() <= 1e-8, "value {value}");
            }
            other => panic!("expected convergence, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_tail_diverges() {
        let v = integrate_improper(|r| (1.0 + r).recip(), 0.0, TailModel::Unknown, &tol()).unwrap();
        match v {
            ConvergenceVerdict::Diverges { partial_sums, fitted_tail_exponent } => {
                assert!(partial_sums.windows(2).all(|w| w[1] >= w[0]));
                assert!((fitted_tail_exponent + 1.0).abs() < 0.05, "fitted {fitted_tail_exponent}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn constant_integrand_diverges() {
        let v = integrate_improper(|_| 1.0, 0.0, TailModel::Unknown, &tol()).unwrap();
        assert!(v.is_divergent());
    }

    #[test]
    fn borderline_exponent_is_inconclusive() {
        // p = -1.05 sits between the divergence guard and the convergence margin.
        let v = integrate_improper(|r| (1.0 + r).powf(-1.05), 0.0, TailModel::Unknown, &tol()).unwrap();
        assert!(matches!(v, ConvergenceVerdict::Inconclusive { .. }), "got {v:?}");
    }

    #[test]
    fn agrees_with_truncated_adaptive_for_exponentials() {
        for kappa in [0.5, 1.0, 2.0] {
            let t = tol();
            let improper =
                integrate_improper(|r| (-kappa * r).exp(), 0.0, TailModel::Exponential { rate: kappa }, &t)
                    .unwrap()
                    .value()
                    .unwrap();
            let big = 800.0 / kappa;
            let truncated = integrate_adaptive(|r| (-kappa * r).exp(), 0.0, big.min(700.0), &t).unwrap();
            assert!((improper - truncated.value).abs() <= 2e-9, "kappa={kappa}");
        }
    }
}
