//! Adaptive Gauss-Kronrod quadrature with interval bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{NumericsError, Tolerance};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Value and error estimate of a quadrature run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Endpoint-singularity declaration: the integrand behaves like
/// `(x - a)^p` near `a` (left) or `(b - x)^p` near `b` (right),
/// with an integrable exponent `p > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularityHint {
    None,
    LeftPower(f64),
    RightPower(f64),
}

/// Single G7-K15 panel; returns (kronrod, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    if !fc.is_finite() {
        return Err(NumericsError::NonFinite { x: center });
    }
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = WGK[7] * fc.abs();

    let mut samples = [0.0f64; 15];
    samples[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let x1 = center - dx;
        let x2 = center + dx;
        let f1 = f(x1);
        if !f1.is_finite() {
            return Err(NumericsError::NonFinite { x: x1 });
        }
        let f2 = f(x2);
        if !f2.is_finite() {
            return Err(NumericsError::NonFinite { x: x2 });
        }
        samples[j] = f1;
        samples[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (samples[7] - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // QUADPACK error rescaling.
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * 1.0_f64.min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    order: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.order == other.order
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; insertion order breaks ties deterministically.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
///
/// The endpoints are never evaluated, so integrable endpoint singularities
/// are tolerated; declare them through [`integrate_adaptive_hinted`] when
/// fast convergence matters.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<QuadResult, NumericsError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInput {
            detail: format!("integration bounds must satisfy a < b finite, got [{a}, {b}]"),
        });
    }
    let (value, error) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error, order: 0 });
    let mut total_value = value;
    let mut total_error = error;
    let mut order = 1u64;

    for _ in 0..tol.max_subdivisions {
        if total_error <= tol.target(total_value) {
            return Ok(QuadResult { value: total_value, error: total_error });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; keep its estimate.
            total_error = total_error.min(tol.target(total_value));
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, order });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, order: order + 1 });
        order += 2;
    }
    if total_error <= tol.target(total_value) {
        Ok(QuadResult { value: total_value, error: total_error })
    } else {
        Err(NumericsError::SubdivisionLimit { value: total_value, error: total_error })
    }
}

/// Integrate with a declared endpoint power singularity removed by the
/// substitution `x = a + u^m` (or mirrored), `m = 1/(1+p)`.
pub fn integrate_adaptive_hinted<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    hint: SingularityHint,
    tol: &Tolerance,
) -> Result<QuadResult, NumericsError> {
    match hint {
        SingularityHint::None => integrate_adaptive(f, a, b, tol),
        SingularityHint::LeftPower(p) => {
            if p <= -1.0 {
                return Err(NumericsError::InvalidInput {
                    detail: format!("left singularity exponent {p} is not integrable"),
                });
            }
            let m = 1.0 / (1.0 + p);
            let upper = (b - a).powf(1.0 / m);
            integrate_adaptive(|u| f(a + u.powf(m)) * m * u.powf(m - 1.0), 0.0, upper, tol)
        }
        SingularityHint::RightPower(p) => {
            if p <= -1.0 {
                return Err(NumericsError::InvalidInput {
                    detail: format!("right singularity exponent {p} is not integrable"),
                });
            }
            let m = 1.0 / (1.0 + p);
            let upper = (b - a).powf(1.0 / m);
            integrate_adaptive(|u| f(b - u.powf(m)) * m * u.powf(m - 1.0), 0.0, upper, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn constant_integrand() {
        let r = integrate_adaptive(|_| 1.0, 0.0, 1.0, &tol()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn inverse_sqrt_with_hint() {
        let r = integrate_adaptive_hinted(
            |x| x.powf(-0.5),
            0.0,
            1.0,
            SingularityHint::LeftPower(-0.5),
            &tol(),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() <= 1e-10, "got {}", r.value);
    }

    #[test]
    fn inverse_sqrt_without_hint_still_converges() {
        let loose = Tolerance::new(1e-9, 1e-9, 20000, 1).unwrap();
        let r = integrate_adaptive(|x| x.powf(-0.5), 0.0, 1.0, &loose).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-8, "got {}", r.value);
    }

    #[test]
    fn exponential() {
        let r = integrate_adaptive(|x| (-x).exp(), 0.0, 10.0, &tol()).unwrap();
        let exact = 1.0 - (-10.0f64).exp();
        assert!((r.value - exact).abs() <= 1e-10);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let e = integrate_adaptive(|x| if x > 0.4 && x < 0.6 { f64::NAN } else { 1.0 }, 0.0, 1.0, &tol());
        assert!(matches!(e, Err(NumericsError::NonFinite { .. })));
    }

    #[test]
    fn subdivision_limit_is_reported() {
        let tiny = Tolerance::new(1e-15, 0.0, 2, 1).unwrap();
        let e = integrate_adaptive(|x| (50.0 * x).sin() * x.powf(-0.3), 1e-12, 1.0, &tiny);
        assert!(matches!(e, Err(NumericsError::SubdivisionLimit { .. })));
    }

    #[test]
    fn linearity_on_a_fixed_family() {
        let t = tol();
        let f = |x: f64| (1.0 + x * x).recip();
        let g = |x: f64| (-x).exp() * x;
        let (alpha, beta) = (2.5, -0.75);
        let lhs = integrate_adaptive(|x| alpha * f(x) + beta * g(x), 0.0, 3.0, &t).unwrap();
        let rf = integrate_adaptive(f, 0.0, 3.0, &t).unwrap();
        let rg = integrate_adaptive(g, 0.0, 3.0, &t).unwrap();
        let combo = alpha * rf.value + beta * rg.value;
        assert!((lhs.value - combo).abs() <= 2.0 * (t.target(lhs.value) + t.target(combo)));
    }
}
