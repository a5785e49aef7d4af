//! Radial Green functions and Green operators.
//!
//! On both space families the radial Green function with pole at the origin
//! reduces to the Sturm-Liouville formula
//! `G(r) = (1/omega_{n-1}) int_r^inf ds / A(s)`, and the Dirichlet version on
//! the ball `B_R` truncates the integral at `R`. The Green operator on the
//! ball is the double integral
//! `v(r) = int_r^R (1/A(s)) int_0^s A(t) f(t) dt ds`.

use std::f64::consts::PI;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::geometry::{GeometryError, Space};
use crate::numerics::{
    integrate_adaptive, integrate_improper, ConvergenceVerdict, Interpolation, NumericsError,
    RadialFunction, RadialGrid, TailModel, Tolerance,
};

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("domain error: {detail}")]
    Domain { detail: String },
    #[error("evaluation at the pole x = y")]
    Pole,
    #[error("unsupported space: {detail}")]
    UnsupportedSpace { detail: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Quadrature accuracy used internally for Green-function integrals.
fn quad_tol() -> Tolerance {
    Tolerance { abs: 1e-14, rel: 1e-12, max_subdivisions: 4000, max_iterations: 2000 }
}

/// `int_r^R ds / A(s)` for a Damek-Ricci space, `0 < r < R` finite.
fn dr_density_integral(space: Space, r: f64, upper: f64) -> Result<f64, GreenError> {
    if upper <= r {
        return Ok(0.0);
    }
    let v = integrate_adaptive(|s| (-space.log_volume_density(s)).exp(), r, upper, &quad_tol())?;
    Ok(v.value)
}

/// `int_r^inf ds / A(s)` for a Damek-Ricci space: adaptive quadrature up to
/// `T = max(r, 1) + 45/Q`, then the analytic tail `2^q e^{-QT} / Q`
/// (relative error `O(e^{-T})`).
fn dr_density_tail_integral(space: Space, r: f64) -> Result<f64, GreenError> {
    let Space::DamekRicci { q, .. } = space else {
        return Err(GreenError::UnsupportedSpace { detail: "density tail integral is Damek-Ricci only".into() });
    };
    let big_q = space.homogeneous_dim();
    let t_cut = r.max(1.0) + (45.0 / big_q).max(45.0);
    let head = dr_density_integral(space, r, t_cut)?;
    let tail = 2f64.powi(q as i32) * (-big_q * t_cut).exp() / big_q;
    Ok(head + tail)
}

/// Whole-space radial Green function `G(r)`, `r > 0`.
pub fn green_whole(space: Space, r: f64) -> Result<f64, GreenError> {
    if !(r > 0.0) {
        return Err(GreenError::Domain { detail: format!("green_whole needs r > 0, got {r}") });
    }
    let omega = space.unit_sphere_area();
    match space {
        Space::Euclidean { d } => {
            let d = d as f64;
            Ok(r.powf(2.0 - d) / ((d - 2.0) * omega))
        }
        Space::DamekRicci { .. } => Ok(dr_density_tail_integral(space, r)? / omega),
    }
}

/// Radial Dirichlet Green function of the ball `B_R` with pole at the
/// origin, `0 < r < R`.
pub fn green_ball(space: Space, ball_r: f64, r: f64) -> Result<f64, GreenError> {
    if !(r > 0.0 && r < ball_r) {
        return Err(GreenError::Domain { detail: format!("green_ball needs 0 < r < R, got r={r}, R={ball_r}") });
    }
    let omega = space.unit_sphere_area();
    match space {
        Space::Euclidean { d } => {
            let d = d as f64;
            Ok((r.powf(2.0 - d) - ball_r.powf(2.0 - d)) / ((d - 2.0) * omega))
        }
        Space::DamekRicci { .. } => Ok(dr_density_integral(space, r, ball_r)? / omega),
    }
}

// 5-point Gauss-Legendre rule on [-1, 1].
const GL_X: [f64; 5] = [
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
];
const GL_W: [f64; 5] = [
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
];

/// Inverse of the 5x5 Vandermonde matrix at the Gauss-Legendre nodes, so
/// that `coeffs = VINV * values` are the monomial coefficients of the
/// degree-4 interpolant.
static VINV: Lazy<[[f64; 5]; 5]> = Lazy::new(|| {
    let mut m = [[0.0f64; 10]; 5];
    for (j, &x) in GL_X.iter().enumerate() {
        let mut p = 1.0;
        for k in 0..5 {
            m[j][k] = p;
            p *= x;
        }
        m[j][5 + j] = 1.0;
    }
    // Gauss-Jordan with partial pivoting on the 5x10 augmented matrix.
    for col in 0..5 {
        let piv = (col..5).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for row in 0..5 {
            if row != col {
                let f = m[row][col];
                for k in 0..10 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut inv = [[0.0f64; 5]; 5];
    for (j, row) in m.iter().enumerate() {
        inv[j].copy_from_slice(&row[5..]);
    }
    // inv currently maps values -> ? : we solved V^T? Check: m[j][k] = x_j^k is
    // V with rows indexed by node; solving V c = g gives c = V^{-1} g, which
    // is what we stored.
    inv
});

/// Antiderivative of the degree-4 polynomial with monomial coefficients `c`,
/// evaluated from `-1` to `u`.
fn poly_cumulative(c: &[f64; 5], u: f64) -> f64 {
    let at = |x: f64| {
        let x2 = x * x;
        c[0] * x + c[1] * x2 / 2.0 + c[2] * x2 * x / 3.0 + c[3] * x2 * x2 / 4.0 + c[4] * x2 * x2 * x / 5.0
    };
    at(u) - at(-1.0)
}

/// The ball Green operator on a fixed grid covering `[0, R]` (the grid's
/// last node is `R`), with the geometry precomputed so repeated applications
/// (Picard iterations) only pay for source evaluations.
///
/// `apply` returns the nodal values of `v(r) = int_r^R F(s)/A(s) ds` with
/// `F(s) = int_0^s A f dt`. Per cell, `A f` is replaced by its degree-4
/// interpolant at Gauss-Legendre nodes, which makes the cumulative inner
/// integral `F` available exactly at the outer quadrature nodes; both layers
/// share the same five evaluations.
pub struct BallGreenOperator {
    grid: RadialGrid,
    cells: Vec<Cell>,
}

struct Cell {
    xs: [f64; 5],
    dens: [f64; 5],
    half: f64,
}

impl BallGreenOperator {
    pub fn new(space: Space, grid: RadialGrid) -> Self {
        let pts = grid.points();
        let mut cells = Vec::with_capacity(pts.len() - 1);
        for w in pts.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[0] + w[1]);
            let mut xs = [0.0f64; 5];
            let mut dens = [0.0f64; 5];
            for (j, &u) in GL_X.iter().enumerate() {
                xs[j] = mid + half * u;
                dens[j] = space.volume_density(xs[j]);
            }
            cells.push(Cell { xs, dens, half });
        }
        Self { grid, cells }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        let n = self.grid.len();
        let vinv = &*VINV;

        // Forward pass: per-cell outer integrals and the running inner integral.
        let mut outer = vec![0.0f64; n - 1];
        let mut f_start = 0.0f64; // F at the left edge of the current cell
        for (i, cell) in self.cells.iter().enumerate() {
            let mut g = [0.0f64; 5]; // (A f) at the nodes
            for j in 0..5 {
                g[j] = cell.dens[j] * f(cell.xs[j]);
            }
            let mut c = [0.0f64; 5];
            for (k, ck) in c.iter_mut().enumerate() {
                for j in 0..5 {
                    *ck += vinv[k][j] * g[j];
                }
            }
            let mut o = 0.0;
            for (j, &u) in GL_X.iter().enumerate() {
                let f_here = f_start + cell.half * poly_cumulative(&c, u);
                o += GL_W[j] * f_here / cell.dens[j];
            }
            outer[i] = cell.half * o;
            f_start += cell.half * poly_cumulative(&c, 1.0);
        }

        // Backward cumulative sum: v(r_i) = sum of outer integrals from i to R.
        let mut v = vec![0.0f64; n];
        for i in (0..n - 1).rev() {
            v[i] = v[i + 1] + outer[i];
        }
        v
    }
}

pub(crate) fn apply_ball_green<F: Fn(f64) -> f64>(space: Space, grid: &RadialGrid, f: F) -> Vec<f64> {
    BallGreenOperator::new(space, grid.clone()).apply(f)
}

const BALL_GRID_NODES: usize = 513;

/// Green operator of the ball: `v = G_B f` with `v(R) = 0`, evaluated on a
/// uniform grid of the ball radius taken from `f`'s domain end.
pub fn green_op_ball(space: Space, ball_r: f64, f: &RadialFunction) -> Result<RadialFunction, GreenError> {
    if !(ball_r > 0.0) || !ball_r.is_finite() {
        return Err(GreenError::Domain { detail: format!("green_op_ball needs finite R > 0, got {ball_r}") });
    }
    let grid = RadialGrid::uniform(0.0, ball_r, BALL_GRID_NODES)?;
    let values = apply_ball_green(space, &grid, |r| f.eval(r));
    Ok(RadialFunction::new(grid, values, Interpolation::MonotoneCubic)?)
}

/// Outcome of a whole-space Green potential.
#[derive(Debug, Clone)]
pub enum GreenPotential {
    /// `Gf` is finite; the profile covers `[0, r_max]` of the input data.
    Converges { profile: RadialFunction, value_at_origin: f64 },
    Diverges { partial_sums: Vec<f64>, fitted_tail_exponent: f64 },
    Inconclusive { reason: String },
}

/// Extend a tabulated profile beyond its grid by its declared tail model.
fn tail_extend(f: &RadialFunction, tail: TailModel, r: f64) -> f64 {
    let last = f.grid().last();
    if r <= last {
        return f.eval(r);
    }
    let edge = f.eval(last);
    match tail {
        TailModel::Exponential { rate } => edge * (-rate * (r - last)).exp(),
        TailModel::Power { exponent } => edge * ((1.0 + r) / (1.0 + last)).powf(exponent),
        TailModel::Unknown => edge,
    }
}

/// Whole-space Green potential `Gf(r)` of a nonnegative radial source with a
/// declared tail.
///
/// Convergence of `Gf(0) = int_0^inf A(t) f(t) [omega G(t)] dt` is decided by
/// the improper-integral rules; on convergence the profile follows from
/// `Gf(r) = Gf(0) - int_0^r F(s)/A(s) ds`.
pub fn green_potential_whole(
    space: Space,
    f: &RadialFunction,
    tail: TailModel,
    tol: &Tolerance,
) -> Result<GreenPotential, GreenError> {
    // omega * A(t) * G(t) in a form that is stable for both families.
    let weight: Box<dyn Fn(f64) -> f64> = match space {
        Space::Euclidean { d } => {
            let d = d as f64;
            Box::new(move |t: f64| t / (d - 2.0))
        }
        Space::DamekRicci { .. } => {
            let table = dr_green_weight_table(space)?;
            Box::new(move |t: f64| table.eval(t))
        }
    };
    // The weight is ~ t (Euclidean) or ~ const (Damek-Ricci) at infinity.
    let integrand_tail = match (space, tail) {
        (Space::Euclidean { .. }, TailModel::Power { exponent }) => TailModel::Power { exponent: exponent + 1.0 },
        (_, t) => t,
    };
    let verdict = integrate_improper(
        |t| tail_extend(f, tail, t) * weight(t),
        0.0,
        integrand_tail,
        tol,
    )?;
    let u0 = match verdict {
        ConvergenceVerdict::Converges { value, .. } => value,
        ConvergenceVerdict::Diverges { partial_sums, fitted_tail_exponent } => {
            return Ok(GreenPotential::Diverges { partial_sums, fitted_tail_exponent });
        }
        ConvergenceVerdict::Inconclusive { reason } => return Ok(GreenPotential::Inconclusive { reason }),
    };

    // w(r) = int_r^{r_max} F/A ds, then Gf(r) = w(r) + (Gf(0) - w(0)).
    let r_max = f.grid().last();
    let grid = RadialGrid::uniform(0.0, r_max, 257)?;
    let w = apply_ball_green(space, &grid, |r| f.eval(r));
    let shift = u0 - w[0];
    let values: Vec<f64> = w.iter().map(|&x| x + shift).collect();
    let profile = RadialFunction::new(grid, values, Interpolation::MonotoneCubic)?;
    Ok(GreenPotential::Converges { profile, value_at_origin: u0 })
}

/// Table of `omega * A(t) * G(t)` for a Damek-Ricci space, built once per
/// call from the backward cumulative density integral.
struct GreenWeight {
    table: RadialFunction,
    space: Space,
    t_hi: f64,
    q: u32,
}

impl GreenWeight {
    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.t_hi {
            // A(t) I(t) -> 1/Q with relative error O(e^{-t}).
            let big_q = self.space.homogeneous_dim();
            let log_a = self.space.log_volume_density(t);
            let i_tail = 2f64.powi(self.q as i32) * (-big_q * t).exp() / big_q;
            return (log_a + i_tail.ln()).exp();
        }
        self.table.eval(t)
    }
}

fn dr_green_weight_table(space: Space) -> Result<GreenWeight, GreenError> {
    let Space::DamekRicci { q, .. } = space else {
        return Err(GreenError::UnsupportedSpace { detail: "green weight table is Damek-Ricci only".into() });
    };
    let big_q = space.homogeneous_dim();
    let t_hi = 1.0_f64.max(50.0 / big_q) + 45.0;
    // Graded nodes resolve the t^{1-n} steepness of 1/A near 0; A*I itself is
    // ~ t/n there, so the product stays tame.
    let grid = RadialGrid::graded(0.0, t_hi, 400, 2.0)?;
    let pts = grid.points().to_vec();
    // Backward accumulation of I(t) = int_t^inf ds/A.
    let mut i_vals = vec![0.0f64; pts.len()];
    let tail = 2f64.powi(q as i32) * (-big_q * t_hi).exp() / big_q;
    i_vals[pts.len() - 1] = tail;
    for k in (1..pts.len()).rev() {
        let lo = pts[k - 1].max(1e-300);
        let seg = if k == 1 {
            // Leave I(0) = +inf out of the table; node 0 gets weight 0 via A(0)=0.
            0.0
        } else {
            dr_density_integral(space, lo, pts[k])?
        };
        i_vals[k - 1] = i_vals[k] + seg;
    }
    let mut w_vals = vec![0.0f64; pts.len()];
    for k in 1..pts.len() {
        w_vals[k] = space.volume_density(pts[k]) * i_vals[k];
    }
    // A(t) I(t) -> 0 like t/n as t -> 0; keep the exact limit at the node 0.
    w_vals[0] = 0.0;
    let table = RadialFunction::new(grid, w_vals, Interpolation::MonotoneCubic)?;
    Ok(GreenWeight { table, space, t_hi, q })
}

/// `int_0^inf t^{-nu} e^{-a t - b / t} dt` for `a, b > 0`, via the
/// substitution `t = e^x` and adaptive quadrature around the analytic peak
/// `a u^2 + (nu - 1) u - b = 0`, `u = e^{x*}`.
pub fn laplace_tail_integral(nu: f64, a: f64, b: f64) -> Result<f64, GreenError> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(GreenError::Domain { detail: format!("laplace_tail_integral needs a, b > 0, got a={a}, b={b}") });
    }
    let m = nu - 1.0;
    let u_peak = (-m + (m * m + 4.0 * a * b).sqrt()) / (2.0 * a);
    let x_peak = u_peak.ln();
    let psi = |x: f64| -m * x - a * x.exp() - b * (-x).exp();
    let psi_peak = psi(x_peak);
    // Walk out until the integrand has dropped by e^{-60} on both sides.
    let w_right = (60.0 / (a * u_peak)).ln_1p();
    let w_left = (60.0 * u_peak / b).ln_1p();
    let v = integrate_adaptive(
        |x| (psi(x) - psi_peak).exp(),
        x_peak - w_left,
        x_peak + w_right,
        &quad_tol(),
    )?;
    Ok(v.value * psi_peak.exp())
}

/// Yukawa Green function `g_{n,lambda}(r)`: the fundamental solution of
/// `Delta - lambda` in `R^n`.
///
/// `g_{n,lambda}(r) = lambda^{(n-2)/2} g_{n,1}(sqrt(lambda) r)`; for `n = 3`
/// the closed form `e^{-r}/(4 pi r)` is used, and for `n > 3` the
/// subordination integral `(4 pi)^{-n/2} int_0^inf t^{-n/2} e^{-t - r^2/(4t)} dt`.
pub fn yukawa_green(n: u32, lambda: f64, r: f64) -> Result<f64, GreenError> {
    if n < 3 || !(lambda > 0.0) || !(r > 0.0) {
        return Err(GreenError::Domain {
            detail: format!("yukawa_green needs n >= 3, lambda > 0, r > 0; got n={n}, lambda={lambda}, r={r}"),
        });
    }
    let nf = n as f64;
    let scale = lambda.powf((nf - 2.0) / 2.0);
    let s = lambda.sqrt() * r;
    let g1 = if n == 3 {
        (-s).exp() / (4.0 * PI * s)
    } else {
        laplace_tail_integral(nf / 2.0, 1.0, s * s / 4.0)? / (4.0 * PI).powf(nf / 2.0)
    };
    Ok(scale * g1)
}

/// Green function of the ball `B_R` in `R^d` for the Laplacian, by the image
/// method:
/// `G_B(x, y) = a_d (|x-y|^{2-d} - rho^{2-d})` with
/// `rho^2 = |x|^2 |y|^2 / R^2 - 2 x.y + R^2` (symmetric in `x, y`) and
/// `a_d = Gamma(d/2 - 1) / (4 pi^{d/2})`.
pub fn euclid_ball_green(d: u32, ball_r: f64, x: &[f64], y: &[f64]) -> Result<f64, GreenError> {
    if d < 3 || x.len() != d as usize || y.len() != d as usize || !(ball_r > 0.0) {
        return Err(GreenError::Domain {
            detail: format!("need d >= 3, R > 0, points of dimension d; got d={d}, R={ball_r}"),
        });
    }
    let df = d as f64;
    let nx2: f64 = x.iter().map(|v| v * v).sum();
    let ny2: f64 = y.iter().map(|v| v * v).sum();
    if nx2.sqrt() >= ball_r || ny2.sqrt() >= ball_r {
        return Err(GreenError::Domain { detail: "both points must lie strictly inside the ball".into() });
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let diff2 = nx2 - 2.0 * dot + ny2;
    if diff2 <= 0.0 {
        return Err(GreenError::Pole);
    }
    let rho2 = nx2 * ny2 / (ball_r * ball_r) - 2.0 * dot + ball_r * ball_r;
    let a_d = gamma(df / 2.0 - 1.0) / (4.0 * PI.powf(df / 2.0));
    let pow = (2.0 - df) / 2.0;
    Ok(a_d * (diff2.powf(pow) - rho2.powf(pow)))
}

/// Which asymptotic regime a Green-estimate check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenRegime {
    /// `G(r) =~ e^{-Qr}` for `r >= 1`.
    LargeR,
    /// `G(r) =~ r^{2-n}` for `r <= 1`.
    SmallR,
}

/// Measured flatness of `G(r) e^{Qr}` (large radii) or `G(r) r^{n-2}` (small
/// radii) over a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GreenEstimateReport {
    pub space: Space,
    pub regime: GreenRegime,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

/// Evaluate the two-sided Green estimates on a Damek-Ricci space over a
/// radius grid inside the declared regime.
pub fn verify_green_estimates(
    space: Space,
    regime: GreenRegime,
    radii: &RadialGrid,
) -> Result<GreenEstimateReport, GreenError> {
    let Space::DamekRicci { .. } = space else {
        return Err(GreenError::UnsupportedSpace {
            detail: "the two-sided Green estimates are stated for Damek-Ricci spaces".into(),
        });
    };
    match regime {
        GreenRegime::LargeR if radii.first() < 1.0 => {
            return Err(GreenError::Domain { detail: "large-r regime requires radii >= 1".into() });
        }
        GreenRegime::SmallR if !(radii.first() > 0.0 && radii.last() <= 1.0) => {
            return Err(GreenError::Domain { detail: "small-r regime requires radii in (0, 1]".into() });
        }
        _ => {}
    }
    let big_q = space.homogeneous_dim();
    let n = space.dim() as f64;
    let mut ratios = Vec::with_capacity(radii.len());
    for &r in radii.points() {
        let g = green_whole(space, r)?;
        let ratio = match regime {
            GreenRegime::LargeR => g * (big_q * r).exp(),
            GreenRegime::SmallR => g * r.powf(n - 2.0),
        };
        ratios.push(ratio);
    }
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(GreenEstimateReport {
        space,
        regime,
        radii: radii.points().to_vec(),
        ratios,
        ratio_min,
        ratio_max,
    })
}
