//! Bisection on a monotone predicate.

use super::{NumericsError, Tolerance};

/// Find the threshold of a monotone predicate on `[lo, hi]`.
///
/// Requires `pred(lo) == false` and `pred(hi) == true`; returns the upper end
/// of the final bracket, whose width is at most `tol.abs`. The returned point
/// therefore satisfies the predicate.
pub fn bisect<P: Fn(f64) -> bool>(
    pred: P,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64, NumericsError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::BadBracket { lo, hi });
    }
    if pred(lo) || !pred(hi) {
        return Err(NumericsError::BadBracket { lo, hi });
    }
    let mut lo = lo;
    let mut hi = hi;
    for _ in 0..tol.max_iterations {
        if hi - lo <= tol.abs {
            return Ok(hi);
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(hi); // bracket at floating-point resolution
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let tol = Tolerance { abs: 1e-12, ..Tolerance::default() };
        let x = bisect(|x| x * x >= 2.0, 0.0, 2.0, &tol).unwrap();
        assert!((x - 2.0f64.sqrt()).abs() <= 1e-12);
        assert!(x * x >= 2.0);
    }

    #[test]
    fn bad_bracket_is_reported() {
        let tol = Tolerance::default();
        assert!(matches!(
            bisect(|x| x > 0.0, 1.0, 2.0, &tol),
            Err(NumericsError::BadBracket { .. })
        ));
        assert!(matches!(
            bisect(|x| x > 10.0, 1.0, 2.0, &tol),
            Err(NumericsError::BadBracket { .. })
        ));
    }
}
