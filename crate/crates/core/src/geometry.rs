//! The two space families and their radial quantities: dimension, homogeneous
//! dimension, volume density `A(r)`, radial drift `c(r) = A'(r)/A(r)`, sphere
//! area, and the heat-kernel comparison bound.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid space: {detail}")]
    InvalidSpace { detail: String },
    #[error("domain error: {detail}")]
    Domain { detail: String },
    #[error("unsupported space: {detail}")]
    UnsupportedSpace { detail: String },
}

/// Ambient geometry: Euclidean `R^d` or a Damek-Ricci (harmonic NA) space
/// with `p = dim v`, `q = dim z`.
///
/// Only the radial structure is represented; any `p >= 1, q >= 0` with
/// `p + q >= 2` is accepted as a Sturm-Liouville problem, without enforcing
/// the Clifford-module constraints that single out genuine Heisenberg types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Euclidean { d: u32 },
    DamekRicci { p: u32, q: u32 },
}

impl Space {
    pub fn euclidean(d: u32) -> Result<Self, GeometryError> {
        if d < 3 {
            return Err(GeometryError::InvalidSpace { detail: format!("Euclidean dimension must be >= 3, got {d}") });
        }
        Ok(Space::Euclidean { d })
    }

    pub fn damek_ricci(p: u32, q: u32) -> Result<Self, GeometryError> {
        if p < 1 || p + q < 2 {
            return Err(GeometryError::InvalidSpace {
                detail: format!("Damek-Ricci parameters need p >= 1 and p + q >= 2, got p={p}, q={q}"),
            });
        }
        Ok(Space::DamekRicci { p, q })
    }

    /// Manifold dimension: `d`, or `n = p + q + 1`.
    pub fn dim(&self) -> u32 {
        match *self {
            Space::Euclidean { d } => d,
            Space::DamekRicci { p, q } => p + q + 1,
        }
    }

    /// Homogeneous dimension `Q = p/2 + q` governing the exponential volume
    /// growth `e^{Qr}`. Zero for Euclidean space (polynomial growth).
    pub fn homogeneous_dim(&self) -> f64 {
        match *self {
            Space::Euclidean { .. } => 0.0,
            Space::DamekRicci { p, q } => p as f64 / 2.0 + q as f64,
        }
    }

    /// `log A(r)` for `r > 0`. Computed directly in the log domain, so it is
    /// exact for radii where `A(r)` itself would overflow.
    pub fn log_volume_density(&self, r: f64) -> f64 {
        match *self {
            Space::Euclidean { d } => (d as f64 - 1.0) * r.ln(),
            Space::DamekRicci { p, q } => {
                // A(r) = 2^{p+q} sinh(r/2)^{p+q} cosh(r/2)^q
                //      = e^{Qr} (1-e^{-r})^{p+q} (1+e^{-r})^q / 2^q
                let pq = (p + q) as f64;
                let qf = q as f64;
                let em = (-r).exp();
                self.homogeneous_dim() * r + pq * (-em).ln_1p() + qf * em.ln_1p() - qf * LN_2
            }
        }
    }

    /// Volume density `A(r)`; `A(r) = r^{d-1}` or
    /// `2^{p+q} sinh(r/2)^{p+q} cosh(r/2)^q`. Continuous extension `A(0) = 0`.
    pub fn volume_density(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match *self {
            Space::Euclidean { d } => r.powi(d as i32 - 1),
            Space::DamekRicci { .. } => self.log_volume_density(r).exp(),
        }
    }

    /// Radial drift `c(r) = A'(r)/A(r)`: `(d-1)/r`, or
    /// `(p+q)/2 coth(r/2) + q/2 tanh(r/2)`. Defined for `r > 0`; `+inf` at 0.
    pub fn radial_drift(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            Space::Euclidean { d } => (d as f64 - 1.0) / r,
            Space::DamekRicci { p, q } => {
                let half = 0.5 * r;
                (p + q) as f64 / 2.0 / half.tanh() + q as f64 / 2.0 * half.tanh()
            }
        }
    }

    /// Area of the unit sphere `S^{n-1}`: `2 pi^{n/2} / Gamma(n/2)`.
    pub fn unit_sphere_area(&self) -> f64 {
        let n = self.dim() as f64;
        2.0 * PI.powf(n / 2.0) / gamma(n / 2.0)
    }

    /// Area of the geodesic sphere of radius `r`: `omega_{n-1} A(r)`.
    pub fn sphere_area(&self, r: f64) -> f64 {
        self.unit_sphere_area() * self.volume_density(r)
    }

    /// `log H(t, r)` for the Damek-Ricci heat-kernel comparison bound
    /// `H(t,r) = t^{-3/2} (1+r) (1 + (1+r)/t)^{(n-3)/2}
    ///           exp(-Q^2 t/4 - Q r/2 - r^2/(4t))`.
    ///
    /// The bound matches the kernel only up to unspecified two-sided
    /// constants, so callers should assert boundedness of ratios, never
    /// specific values.
    pub fn log_heat_kernel_bound(&self, t: f64, r: f64) -> Result<f64, GeometryError> {
        let Space::DamekRicci { .. } = *self else {
            return Err(GeometryError::UnsupportedSpace {
                detail: "heat-kernel bound is defined for Damek-Ricci spaces".into(),
            });
        };
        if !(t > 0.0) || !(r >= 0.0) {
            return Err(GeometryError::Domain { detail: format!("need t > 0 and r >= 0, got t={t}, r={r}") });
        }
        let n = self.dim() as f64;
        let q_hom = self.homogeneous_dim();
        Ok(-1.5 * t.ln()
            + (1.0 + r).ln()
            + 0.5 * (n - 3.0) * ((1.0 + r) / t).ln_1p()
            - q_hom * q_hom * t / 4.0
            - q_hom * r / 2.0
            - r * r / (4.0 * t))
    }

    /// The heat-kernel comparison bound `H(t, r)` itself (may underflow to 0
    /// for very large arguments; use [`Space::log_heat_kernel_bound`] then).
    pub fn heat_kernel_bound(&self, t: f64, r: f64) -> Result<f64, GeometryError> {
        Ok(self.log_heat_kernel_bound(t, r)?.exp())
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Space::Euclidean { d } => write!(f, "euclid:{d}"),
            Space::DamekRicci { p, q } => write!(f, "dr:{p},{q}"),
        }
    }
}
