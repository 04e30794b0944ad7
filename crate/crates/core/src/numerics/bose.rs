//! Bose-Einstein integrals Int_0^inf x^s n(x) dx and Int_0^inf x^s n(n+1) dx.

use super::quadrature::{integrate_semi_infinite, QuadratureConfig};
use super::special::{bose_variance, factorial, occupation, riemann_zeta};
use super::Real;
use crate::rate::relative_difference;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoseKind {
    /// Int x^s n(x) dx = s! zeta(s+1).
    Particle,
    /// Int x^s e^x/(e^x-1)^2 dx = s! zeta(s).
    WavePlusParticle,
}

/// Both evaluations of a Bose integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoseIntegral<T> {
    pub closed_form: T,
    pub quadrature: T,
    pub quadrature_error: T,
}

impl<T: Real> BoseIntegral<T> {
    pub fn value(&self) -> T {
        self.closed_form
    }
}

/// Relative agreement required between the two routes.
const CONSISTENCY: f64 = 1e-10;

/// The closed form s! zeta(s+1) or s! zeta(s).
pub fn bose_integral_closed_form<T: Real>(s: u32, kind: BoseKind) -> Result<T> {
    if s < 2 {
        return Err(Error::domain(format!(
            "bose_integral requires s >= 2, got {s}"
        )));
    }
    let z = match kind {
        BoseKind::Particle => riemann_zeta(T::lit(s as f64 + 1.0))?,
        BoseKind::WavePlusParticle => riemann_zeta(T::lit(s as f64))?,
    };
    Ok(factorial::<T>(s) * z)
}

/// Evaluate the integral by closed form and by quadrature and require the two
/// to agree to 1e-10 relative (looser in single precision).
pub fn bose_integral<T: Real>(
    s: u32,
    kind: BoseKind,
    cfg: &QuadratureConfig<T>,
) -> Result<BoseIntegral<T>> {
    let closed = bose_integral_closed_form::<T>(s, kind)?;
    let p = s as i32;
    let est = match kind {
        BoseKind::Particle => integrate_semi_infinite(
            |x: T| {
                if x > T::zero() {
                    x.powi(p) * occupation(x)
                } else {
                    T::zero()
                }
            },
            T::one(),
            cfg,
        )?,
        BoseKind::WavePlusParticle => integrate_semi_infinite(
            |x: T| {
                if x > T::zero() {
                    x.powi(p) * bose_variance(x)
                } else {
                    T::zero()
                }
            },
            T::one(),
            cfg,
        )?,
    };
    let tolerance = CONSISTENCY.max(1e3 * T::epsilon().as_f64());
    let rel = relative_difference(closed.as_f64(), est.value.as_f64());
    if rel > tolerance {
        return Err(Error::Consistency {
            what: format!("bose_integral(s = {s}, {kind:?}) closed form vs quadrature"),
            rel_diff: rel,
            tolerance,
        });
    }
    Ok(BoseIntegral {
        closed_form: closed,
        quadrature: est.value,
        quadrature_error: est.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // mpmath: s! zeta(s+1), s! zeta(s) for s = 2..10
    const ORACLE: [(u32, f64, f64); 9] = [
        (2, 2.404_113_806_319_188, 3.289_868_133_696_453),
        (3, 6.493_939_402_266_829, 7.212_341_418_957_566),
        (4, 24.886_266_123_440_88, 25.975_757_609_067_32),
        (5, 122.081_167_438_133_9, 124.431_330_617_204_4),
        (6, 726.011_479_714_984_4, 732.487_004_628_803_4),
        (7, 5_060.549_875_237_639, 5_082.080_358_004_891),
        (8, 40_400.978_398_747_63, 40_484.399_001_901_12),
        (9, 363_240.911_422_382_6, 363_608.805_588_728_7),
        (10, 3_630_593.311_606_629, 3_632_409.114_223_826),
    ];

    #[test]
    fn matches_frozen_oracle() {
        let cfg = QuadratureConfig::default();
        for &(s, particle, full) in &ORACLE {
            let p = bose_integral::<f64>(s, BoseKind::Particle, &cfg).unwrap();
            let w = bose_integral::<f64>(s, BoseKind::WavePlusParticle, &cfg).unwrap();
            assert!((p.closed_form - particle).abs() / particle < 1e-14, "s={s}");
            assert!((w.closed_form - full).abs() / full < 1e-14, "s={s}");
            assert!((p.quadrature - particle).abs() / particle < 1e-11, "s={s}");
            assert!((w.quadrature - full).abs() / full < 1e-11, "s={s}");
        }
    }

    #[test]
    fn quoted_values() {
        let c: f64 = bose_integral_closed_form(4, BoseKind::WavePlusParticle).unwrap();
        assert!((c - 4.0 * PI.powi(4) / 15.0).abs() < 1e-12);
        let c: f64 = bose_integral_closed_form(3, BoseKind::Particle).unwrap();
        assert!((c - PI.powi(4) / 15.0).abs() < 1e-13);
    }

    #[test]
    fn s_below_two_rejected() {
        assert!(bose_integral_closed_form::<f64>(1, BoseKind::Particle).is_err());
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        let cfg = QuadratureConfig::default();
        for &(s, particle, _) in &ORACLE {
            let p = bose_integral::<f64>(s, BoseKind::Particle, &cfg).unwrap();
            assert!((p.quadrature - particle).abs() <= p.quadrature_error.max(1e-15 * particle));
        }
    }
}
