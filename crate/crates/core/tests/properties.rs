//! Property-based invariants for the numerical kernels and geometry.

use proptest::prelude::*;
use radiant::geometry::Space;
use radiant::numerics::{bisect, integrate_adaptive, Interpolation, RadialFunction, RadialGrid, Tolerance};

fn tol() -> Tolerance {
    Tolerance { abs: 1e-10, rel: 1e-10, max_subdivisions: 2000, max_iterations: 10_000 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adaptive quadrature is exact (to tolerance) on cubics.
    #[test]
    fn quadrature_matches_cubic_closed_form(
        c in prop::array::uniform4(-10.0f64..10.0),
        a in -5.0f64..5.0,
        len in 0.1f64..10.0,
    ) {
        let b = a + len;
        let exact = |x: f64| ((c[3] / 4.0 * x + c[2] / 3.0) * x + c[1] / 2.0) * x * x + c[0] * x;
        let q = integrate_adaptive(
            |x| ((c[3] * x + c[2]) * x + c[1]) * x + c[0],
            a,
            b,
            &tol(),
        ).unwrap();
        let scale = 1.0 + exact(b).abs() + exact(a).abs();
        prop_assert!((q.value - (exact(b) - exact(a))).abs() <= 1e-8 * scale);
    }

    /// Monotone cubic interpolation of monotone data stays monotone and
    /// inside the data range between every pair of nodes.
    #[test]
    fn monotone_interpolation_preserves_shape(
        mut increments in prop::collection::vec(0.0f64..1.0, 8..24),
        start in -5.0f64..5.0,
    ) {
        increments.insert(0, 0.0);
        let mut acc = start;
        let values: Vec<f64> = increments.iter().map(|d| { acc += d; acc }).collect();
        let grid = RadialGrid::uniform(0.0, 1.0, values.len()).unwrap();
        let f = RadialFunction::new(grid, values.clone(), Interpolation::MonotoneCubic).unwrap();
        let lo = values[0] - 1e-12;
        let hi = values[values.len() - 1] + 1e-12;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=300 {
            let r = i as f64 / 300.0;
            let v = f.eval(r);
            prop_assert!(v >= lo && v <= hi, "overshoot at r={r}: {v}");
            prop_assert!(v >= prev - 1e-9, "not monotone at r={r}");
            prev = v;
        }
    }

    /// Both closed forms of the Damek-Ricci drift agree, and the drift is
    /// the logarithmic derivative of the volume density.
    #[test]
    fn damek_ricci_drift_identities(p in 1u32..12, q in 0u32..12, r in 0.05f64..20.0) {
        prop_assume!(p % 2 == 0 || q > 0); // Heisenberg-type parity constraint
        let space = match Space::damek_ricci(p, q) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let (pf, qf) = (p as f64, q as f64);
        let alt = pf / 2.0 / (r / 2.0).tanh() + if q == 0 { 0.0 } else { qf / r.tanh() };
        prop_assert!((space.radial_drift(r) - alt).abs() <= 1e-10 * (1.0 + alt.abs()));
        let h = 1e-6 * r.max(1.0);
        let fd = (space.log_volume_density(r + h) - space.log_volume_density(r - h)) / (2.0 * h);
        prop_assert!((fd - space.radial_drift(r)).abs() <= 1e-4);
    }

    /// The volume density grows like e^{Qr}: log A(r) - Qr is bounded and
    /// decreasing corrections only.
    #[test]
    fn volume_density_exponential_envelope(p in 1u32..10, q in 0u32..10, r in 1.0f64..30.0) {
        prop_assume!(p % 2 == 0 || q > 0);
        let space = match Space::damek_ricci(p, q) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let excess = space.log_volume_density(r) - space.homogeneous_dim() * r;
        // log A = Q r - q log 2 + log(1 - e^-r)^... corrections; the excess
        // must lie in [-(p+2q) log 2, 0].
        prop_assert!(excess <= 1e-12);
        prop_assert!(excess >= -((p + 2 * q) as f64) * std::f64::consts::LN_2 - 1e-12);
    }

    /// Bisection finds the threshold of any monotone predicate to tolerance.
    #[test]
    fn bisection_finds_threshold(root in -100.0f64..100.0, pad in 0.1f64..50.0) {
        let x = bisect(|x| x >= root, root - pad, root + pad,
            &Tolerance { abs: 1e-9, rel: 0.0, max_subdivisions: 200, max_iterations: 200 }).unwrap();
        prop_assert!((x - root).abs() <= 1e-8 * (1.0 + root.abs()));
    }
}
