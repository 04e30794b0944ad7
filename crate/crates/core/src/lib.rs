//! Momentum diffusion, decoherence and drag of small polarizable particles
//! in isotropic thermal (blackbody) radiation.
//!
//! All physics is computed in Gaussian-cgs units. Conversion to SI happens
//! only at output boundaries through [`Unit::si_factor`].
//!
//! The crate is layered:
//!
//! * [`numerics`]: scalar-generic special functions, Bose integrals, adaptive
//!   Gauss-Kronrod quadrature and an embedded Runge-Kutta integrator.
//! * [`polarizability`]: complex polarizability models and Rayleigh
//!   scattering quantities.
//! * [`diffusion`], [`decoherence`], [`drag`], [`equilibrium`]: the physical
//!   rates, each with a quadrature route and, where one exists, a closed form.
//! * [`stochastic`]: Monte Carlo checks (Poisson kicks, Ornstein-Uhlenbeck
//!   paths, Gaussian field independence).
//! * [`verify`]: the cross-validation table used by the command line `verify`.
//!
//! ```
//! use blackbody::diffusion::{diffusion_constant, ThermalEnvironment};
//! use blackbody::{PolarizabilityModel, QuadratureConfig, Statistics};
//!
//! let env = ThermalEnvironment::new(300.0, Statistics::Full)?;
//! let d = diffusion_constant(&PolarizabilityModel::electron(), &env, &QuadratureConfig::default())?;
//! assert_eq!(d.unit.gaussian_symbol(), "g^2 cm^2 s^-3");
//! # Ok::<(), blackbody::Error>(())
//! ```

// `!(x > 0.0)` is the NaN-rejecting guard; constants are frozen at full digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod constants;
pub mod decoherence;
pub mod diffusion;
pub mod drag;
pub mod equilibrium;
mod error;
pub mod numerics;
pub mod polarizability;
mod rate;
pub mod stochastic;
mod thermal;
pub mod verify;

pub use constants::{PhysicalConstants, CGS};
pub use error::{Error, Result};
pub use numerics::quadrature::{Estimate, QuadratureConfig};
pub use numerics::Real;
pub use polarizability::PolarizabilityModel;
pub use rate::{CrossCheck, Method, RateResult, Unit};
pub use thermal::Statistics;

/// Double-precision scalar used by every physics module.
pub type Scalar = f64;

/// Quadrature settings at the physics precision.
pub type Quadrature = QuadratureConfig<f64>;

/// Quadrature estimate at the physics precision.
pub type Integral = Estimate<f64>;

/// Single-precision quadrature settings, for callers that only need the
/// scalar-generic numerics layer.
pub type QuadratureF32 = QuadratureConfig<f32>;
