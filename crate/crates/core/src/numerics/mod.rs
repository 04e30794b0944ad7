//! Scalar-generic numerical building blocks.
//!
//! Everything here works for any [`Real`] (`f32`, `f64`). The physics
//! modules instantiate it at `f64`.

pub mod bessel;
pub mod bose;
pub mod ode;
pub mod quadrature;
pub mod special;

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating point scalar accepted by the numerics layer.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    /// Convert an `f64` literal. Every `Real` can represent (a rounding of)
    /// any finite `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub use bessel::{kernel_bracket, kernel_bracket_deficit, spherical_bessel};
pub use bose::{bose_integral, BoseIntegral, BoseKind};
pub use special::{bose_difference, bose_occupation, bose_variance, factorial, riemann_zeta};
