//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)) with
//! cubic Hermite dense output.

use super::{NumericsError, Tolerance};

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_ATTEMPTS: u64 = 10_000_000;

/// Accepted nodes of an IVP solve, with the state derivative at each node so
/// the solution can be evaluated anywhere in between (cubic Hermite).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub dys: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("trajectory has at least one node")
    }

    pub fn y_end(&self) -> &[f64] {
        self.ys.last().expect("trajectory has at least one node")
    }

    /// Evaluate component `comp` at `t`, clamped to the covered interval.
    pub fn eval(&self, t: f64, comp: usize) -> f64 {
        let ts = &self.ts;
        if t <= ts[0] {
            return self.ys[0][comp];
        }
        if t >= *ts.last().unwrap() {
            return self.ys.last().unwrap()[comp];
        }
        let i = ts.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (ts[i], ts[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (y0, y1) = (self.ys[i][comp], self.ys[i + 1][comp]);
        let (d0, d1) = (self.dys[i][comp] * h, self.dys[i + 1][comp] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1
    }
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` to `t_end > t0`.
///
/// Steps adapt to keep the embedded error below `tol.abs + tol.rel * |y|`
/// per component; a step underflow (relentless rejection, typically a
/// finite-time blow-up) is reported as [`NumericsError::StepUnderflow`] with
/// the abscissa reached.
pub fn solve_ivp<F: Fn(f64, &[f64], &mut [f64])>(
    f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: &Tolerance,
) -> Result<Trajectory, NumericsError> {
    if !(t0 < t_end) || !t0.is_finite() || !t_end.is_finite() || y0.is_empty() {
        return Err(NumericsError::InvalidInput {
            detail: format!("need finite t0 < t_end and a nonempty state, got [{t0}, {t_end}]"),
        });
    }
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0f64; n]; 7];
    f(t, &y, &mut k[0]);
    if k[0].iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite { x: t0 });
    }

    let mut traj = Trajectory { ts: vec![t], ys: vec![y.clone()], dys: vec![k[0].clone()] };

    // Initial step from the magnitude of y and y'.
    let scale0: f64 = y
        .iter()
        .zip(&k[0])
        .map(|(yi, di)| (di.abs() / (tol.abs + tol.rel * yi.abs())).max(1e-30))
        .fold(0.0, f64::max);
    let mut h = ((t_end - t0) * 1e-3).min(0.1 / scale0).max(1e-10);

    let mut y_new = vec![0.0f64; n];
    let mut stage = vec![0.0f64; n];
    for _ in 0..MAX_ATTEMPTS {
        if t >= t_end {
            return Ok(traj);
        }
        h = h.min(t_end - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(NumericsError::StepUnderflow { reached: t });
        }

        let mut nonfinite = false;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + C[s] * h, &stage, &mut tail[0]);
            if tail[0].iter().any(|v| !v.is_finite()) {
                nonfinite = true;
                break;
            }
        }
        if nonfinite {
            h *= 0.25;
            continue;
        }
        // 5th-order solution is stage 7 (FSAL): y_new = y + h * sum A[6][j] k_j.
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            y_new[i] = y[i] + h * acc;
        }
        f(t + h, &y_new, &mut k[6]);
        if k[6].iter().any(|v| !v.is_finite()) || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            continue;
        }

        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6); // FSAL: last stage derivative becomes the first of the next step
            traj.ts.push(t);
            traj.ys.push(y.clone());
            traj.dys.push(k[0].clone());
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(NumericsError::StepUnderflow { reached: t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn exponential_growth() {
        let traj = solve_ivp(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], 1.0, &tol()).unwrap();
        assert!((traj.y_end()[0] - 1.0f64.exp()).abs() <= 1e-8);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let traj = solve_ivp(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            20.0,
            &tol(),
        )
        .unwrap();
        let y = traj.y_end();
        let energy = y[0] * y[0] + y[1] * y[1];
        assert!((energy - 1.0).abs() <= 1e-7, "energy drift {energy}");
        assert!((y[0] - 20.0f64.cos()).abs() <= 1e-6);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let traj = solve_ivp(|t, _, dy| dy[0] = t.cos(), 0.0, &[0.0], 6.0, &tol()).unwrap();
        // The cubic Hermite dense output is only fourth order in the step,
        // well short of the integrator's accuracy at the nodes.
        for i in 0..=60 {
            let t = 0.1 * i as f64;
            let err = (traj.eval(t, 0) - t.sin()).abs();
            assert!(err <= 1e-4, "t={t}: err={err:.3e}");
        }
        for &t in &traj.ts {
            assert!((traj.eval(t, 0) - t.sin()).abs() <= 1e-8, "node t={t}");
        }
    }

    #[test]
    fn blow_up_reports_step_underflow() {
        // y' = y^2 blows up at t = 1.
        let e = solve_ivp(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], 2.0, &tol());
        match e {
            Err(NumericsError::StepUnderflow { reached }) => {
                assert!((reached - 1.0).abs() < 1e-2, "reached {reached}");
            }
            other => panic!("expected StepUnderflow, got {other:?}"),
        }
    }

    #[test]
    fn second_order_blow_up() {
        // u'' = u^2, u(0) = 3, u'(0) = 0 blows up before t = 2.
        let e = solve_ivp(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = y[0] * y[0];
            },
            0.0,
            &[3.0, 0.0],
            5.0,
            &tol(),
        );
        match e {
            Err(NumericsError::StepUnderflow { reached }) => {
                assert!(reached < 2.0, "reached {reached}");
            }
            other => panic!("expected StepUnderflow, got {other:?}"),
        }
    }

    #[test]
    fn rejects_degenerate_interval() {
        let e = solve_ivp(|_, y, dy| dy[0] = y[0], 1.0, &[1.0], 1.0, &tol());
        assert!(matches!(e, Err(NumericsError::InvalidInput { .. })));
    }
}
