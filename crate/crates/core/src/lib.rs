//! Radial semilinear elliptic problems `Lu = phi(r, u)` on Euclidean space
//! and on Damek-Ricci (harmonic NA) spaces.
//!
//! The crate computes radial Green functions and Green potentials, classifies
//! existence of bounded versus large entire solutions through integral
//! criteria, constructs those solutions by fixed-point iteration on expanding
//! balls, and verifies Green-function asymptotics, a Harnack-type inequality
//! and the 3-G inequality numerically.
//!
//! Module layout:
//! * [`numerics`] - quadrature, improper integrals with tail analysis,
//!   adaptive ODE integration, bisection, radial grids and interpolation.
//! * [`geometry`] - the two space families and their radial quantities
//!   (volume density, drift, sphere area, heat-kernel bound).
//! * [`green`] - whole-space and Dirichlet-ball Green functions and
//!   operators, Yukawa Green functions, estimate verification.
//! * [`classify`] - nonlinearities with hypothesis flags, the `I phi`
//!   integral criterion, Keller-Osserman check, bounded/large verdicts.
//! * [`solver`] - ball solver (damped Picard on `u = c - G_B(phi(.,u))`),
//!   shooting solver, the `z(lambda)` profile, and the expanding-ball
//!   constructions of bounded and large entire solutions.
//! * [`harnack`] - empirical Harnack scans and the Monte-Carlo 3-G check.
//! * [`config`] / [`report`] - CLI configuration and machine-readable
//!   reports.

pub mod classify;
pub mod config;
pub mod geometry;
pub mod green;
pub mod harnack;
pub mod numerics;
pub mod report;
pub mod solver;

pub use classify::{Classification, HypothesisFlags, Nonlinearity, Psi, RadialWeight};
pub use geometry::Space;
pub use numerics::{ConvergenceVerdict, RadialFunction, RadialGrid, TailModel, Tolerance};
pub use solver::{Solution, SolutionKind};
