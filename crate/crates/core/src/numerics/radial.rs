//! Radial grids and tabulated radial profiles with shape-preserving
//! interpolation.

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// A strictly increasing set of radii `0 <= r_0 < r_1 < ... < r_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    points: Vec<f64>,
}

impl RadialGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, NumericsError> {
        if points.len() < 2 {
            return Err(NumericsError::InvalidGrid { detail: "need at least two points".into() });
        }
        if points.iter().any(|p| !p.is_finite()) || points[0] < 0.0 {
            return Err(NumericsError::InvalidGrid {
                detail: "points must be finite and nonnegative".into(),
            });
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NumericsError::InvalidGrid { detail: "points must be strictly increasing".into() });
        }
        Ok(Self { points })
    }

    /// `n` equally spaced points covering `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self, NumericsError> {
        if n < 2 || !(a < b) {
            return Err(NumericsError::InvalidGrid {
                detail: format!("uniform grid needs n >= 2 and a < b, got n={n}, [{a}, {b}]"),
            });
        }
        let step = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
        points[n - 1] = b;
        Self::new(points)
    }

    /// `n` points on `[a, b]` clustered near `a`: `r_i = a + (b-a) (i/(n-1))^power`.
    pub fn graded(a: f64, b: f64, n: usize, power: f64) -> Result<Self, NumericsError> {
        if n < 2 || !(a < b) || !(power > 0.0) {
            return Err(NumericsError::InvalidGrid {
                detail: format!("graded grid needs n >= 2, a < b, power > 0; got n={n}, [{a}, {b}], power={power}"),
            });
        }
        let mut points: Vec<f64> =
            (0..n).map(|i| a + (b - a) * (i as f64 / (n - 1) as f64).powf(power)).collect();
        points[n - 1] = b;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid grid always has >= 2 points
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Index of the cell `[r_i, r_{i+1}]` containing `r` (clamped to the ends).
    fn cell(&self, r: f64) -> usize {
        let n = self.points.len();
        if r <= self.points[0] {
            return 0;
        }
        if r >= self.points[n - 1] {
            return n - 2;
        }
        self.points.partition_point(|&p| p <= r) - 1
    }
}

/// Interpolation rule used by [`RadialFunction::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    /// Fritsch-Carlson monotone cubic (PCHIP): C^1, no overshoot, preserves
    /// local monotonicity of the data.
    MonotoneCubic,
}

/// A radial profile tabulated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    grid: RadialGrid,
    values: Vec<f64>,
    interpolation: Interpolation,
    slopes: Vec<f64>,
}

impl RadialFunction {
    pub fn new(
        grid: RadialGrid,
        values: Vec<f64>,
        interpolation: Interpolation,
    ) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::InvalidRadialFunction {
                detail: format!("{} values for a {}-point grid", values.len(), grid.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::InvalidRadialFunction { detail: "values must be finite".into() });
        }
        let slopes = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::MonotoneCubic => pchip_slopes(grid.points(), &values),
        };
        Ok(Self { grid, values, interpolation, slopes })
    }

    /// Tabulate `f` on `grid`.
    pub fn sample<F: Fn(f64) -> f64>(
        grid: RadialGrid,
        f: F,
        interpolation: Interpolation,
    ) -> Result<Self, NumericsError> {
        let values: Vec<f64> = grid.points().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, interpolation)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Evaluate at `r`, clamping outside `[r_0, r_{n-1}]` to the endpoint
    /// values.
    pub fn eval(&self, r: f64) -> f64 {
        let pts = self.grid.points();
        let n = pts.len();
        if r <= pts[0] {
            return self.values[0];
        }
        if r >= pts[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.cell(r);
        let h = pts[i + 1] - pts[i];
        let s = (r - pts[i]) / h;
        match self.interpolation {
            Interpolation::Linear => self.values[i] + s * (self.values[i + 1] - self.values[i]),
            Interpolation::MonotoneCubic => {
                let (y0, y1) = (self.values[i], self.values[i + 1]);
                let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                    + (s3 - 2.0 * s2 + s) * d0
                    + (-2.0 * s3 + 3.0 * s2) * y1
                    + (s3 - s2) * d1
            }
        }
    }

    /// Largest nodal value.
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest nodal value.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sup of `|self - other|` over this function's nodes that fall inside
    /// `[0, r_cap]`.
    pub fn sup_distance(&self, other: &RadialFunction, r_cap: f64) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .filter(|(&r, _)| r <= r_cap)
            .map(|(&r, &v)| (v - other.eval(r)).abs())
            .fold(0.0, f64::max)
    }
}

/// Fritsch-Carlson slopes for shape-preserving cubic interpolation.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0f64; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }
    for i in 1..n - 1 {
        let (d0, d1) = (delta[i - 1], delta[i]);
        if d0 * d1 > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    m[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

/// Three-point one-sided slope with the standard monotonicity clamps.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = RadialGrid::uniform(0.0, 5.0, 11).unwrap();
        assert_eq!(g.first(), 0.0);
        assert_eq!(g.last(), 5.0);
        assert_eq!(g.len(), 11);
    }

    #[test]
    fn rejects_unsorted_points() {
        assert!(RadialGrid::new(vec![0.0, 2.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![0.0, 0.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = RadialGrid::uniform(0.0, 3.0, 7).unwrap();
        let f = RadialFunction::sample(g.clone(), |r| (r - 1.5).powi(2), Interpolation::MonotoneCubic).unwrap();
        for &r in g.points() {
            assert!((f.eval(r) - (r - 1.5f64).powi(2)).abs() <= 1e-14);
        }
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        // Data with a sharp knee, the classic case where plain cubic splines
        // overshoot.
        let g = RadialGrid::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let vals = vec![0.0, 0.01, 0.02, 5.0, 9.9, 10.0];
        let f = RadialFunction::new(g, vals, Interpolation::MonotoneCubic).unwrap();
        let mut prev = f.eval(0.0);
        for i in 1..=500 {
            let r = 5.0 * i as f64 / 500.0;
            let v = f.eval(r);
            assert!(v >= prev - 1e-12, "non-monotone at r={r}");
            assert!((0.0..=10.0).contains(&v), "overshoot at r={r}: {v}");
            prev = v;
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let g = RadialGrid::uniform(0.0, 2.0, 101).unwrap();
        let f = RadialFunction::sample(g, |r| (r * 1.3).sin(), Interpolation::MonotoneCubic).unwrap();
        // Shape-preserving slopes cost accuracy near extrema, where the
        // limiter zeroes the slope and the scheme drops to second order.
        for i in 0..=200 {
            let r = i as f64 * 0.01;
            let err = (f.eval(r) - (r * 1.3).sin()).abs();
            assert!(err <= 2e-4, "r={r}: err={err:.3e}");
        }
    }

    #[test]
    fn eval_clamps_outside_domain() {
        let g = RadialGrid::uniform(1.0, 2.0, 3).unwrap();
        let f = RadialFunction::sample(g, |r| r, Interpolation::Linear).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(3.0), 2.0);
    }
}
