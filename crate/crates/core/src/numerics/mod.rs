//! Deterministic numerical kernels: adaptive quadrature, improper integrals
//! with dyadic tail analysis, an adaptive Runge-Kutta IVP integrator,
//! bisection, and radial grids with interpolation.
//!
//! Everything here is a pure function of its inputs; identical inputs give
//! bit-identical outputs.

mod bisect;
mod improper;
mod ode;
mod quad;
mod radial;

pub use bisect::bisect;
pub use improper::{integrate_improper, ConvergenceVerdict, TailModel};
pub use ode::{solve_ivp, Trajectory};
pub use quad::{integrate_adaptive, integrate_adaptive_hinted, QuadResult, SingularityHint};
pub use radial::{Interpolation, RadialFunction, RadialGrid};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Accuracy and work budget shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute error target (>= 0).
    pub abs: f64,
    /// Relative error target (>= 0). `abs + rel` must be positive.
    pub rel: f64,
    /// Interval-split budget for adaptive quadrature.
    pub max_subdivisions: u32,
    /// Iteration budget for fixed-point loops and ODE steps.
    pub max_iterations: u32,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_subdivisions: u32, max_iterations: u32) -> Result<Self, NumericsError> {
        if !(abs >= 0.0) || !(rel >= 0.0) || abs + rel <= 0.0 {
            return Err(NumericsError::InvalidTolerance {
                detail: format!("abs={abs}, rel={rel}: need abs,rel >= 0 and abs+rel > 0"),
            });
        }
        if max_subdivisions == 0 || max_iterations == 0 {
            return Err(NumericsError::InvalidTolerance {
                detail: "max_subdivisions and max_iterations must be >= 1".into(),
            });
        }
        Ok(Self { abs, rel, max_subdivisions, max_iterations })
    }

    /// Error target for a result of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    /// Copy with a different absolute target.
    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-10, max_subdivisions: 2000, max_iterations: 2000 }
    }
}

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("invalid tolerance: {detail}")]
    InvalidTolerance { detail: String },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("subdivision limit reached: best value {value} with error estimate {error}")]
    SubdivisionLimit { value: f64, error: f64 },
    #[error("step size underflow at r = {reached} (possible blow-up or stiffness)")]
    StepUnderflow { reached: f64 },
    #[error("bad bracket: pred(lo) must be false and pred(hi) true on [{lo}, {hi}]")]
    BadBracket { lo: f64, hi: f64 },
    #[error("invalid grid: {detail}")]
    InvalidGrid { detail: String },
    #[error("invalid radial function: {detail}")]
    InvalidRadialFunction { detail: String },
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
}
