//! Frequency integrals weighted by thermal occupation factors.
//!
//! Every rate in the crate reduces to Int_0^inf d omega omega^p g(omega) w(x)
//! with x = hbar omega / k_B T. The integral is done in x with g normalised
//! by a reference value so that the integrand is of order one.

use crate::constants::CGS;
use crate::numerics::quadrature::{
    integrate_semi_infinite, integrate_semi_infinite_with_breakpoints, integrate_with_breakpoints,
    QuadratureConfig,
};
use crate::polarizability::PolarizabilityModel;
use crate::{Error, Estimate, Result};
use serde::{Deserialize, Serialize};

/// Photon statistics factor S(omega) multiplying the spectral integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistics {
    /// n: independent photon arrivals.
    #[serde(rename = "particle_n")]
    Particle,
    /// n^2: classical wave interference alone.
    #[serde(rename = "wave_n2")]
    Wave,
    /// n^2 + n.
    #[serde(rename = "full_n2_plus_n")]
    Full,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [Statistics::Particle, Statistics::Wave, Statistics::Full];

    #[inline]
    pub fn factor(self, n: f64) -> f64 {
        match self {
            Statistics::Particle => n,
            Statistics::Wave => n * n,
            Statistics::Full => n * (n + 1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Statistics::Particle => "particle_n",
            Statistics::Wave => "wave_n2",
            Statistics::Full => "full_n2_plus_n",
        }
    }
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "particle" | "particle_n" | "n" => Ok(Statistics::Particle),
            "wave" | "wave_n2" | "n2" => Ok(Statistics::Wave),
            "full" | "full_n2_plus_n" | "n2+n" => Ok(Statistics::Full),
            other => Err(Error::domain(format!("unknown statistics '{other}'"))),
        }
    }
}

pub(crate) fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "temperature must be positive, got {t}"
        )))
    }
}

/// k_B T / hbar.
#[inline]
pub(crate) fn thermal_frequency(t: f64) -> f64 {
    CGS.k_b * t / CGS.hbar
}

/// Largest |alpha_I| over omega_t and the model's resonance, used to make
/// integrands O(1). Falls back to 1 when alpha_I vanishes identically.
pub(crate) fn alpha_scale(model: &PolarizabilityModel, omega_t: f64) -> f64 {
    let mut s = model.alpha_i(omega_t).abs();
    if let Some((w0, _)) = model.resonance() {
        s = s.max(model.alpha_i_detuned(w0, 0.0).abs());
    }
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

/// Int_0^inf d omega omega^power g(omega, delta) w(hbar omega / k_B T).
///
/// `g_scale` is a typical magnitude of g. With a resonance (omega0, width)
/// the integral runs over the detuning delta = omega - omega0 directly, with
/// a geometric ladder of breakpoints, so lines far narrower than the
/// rounding of omega are still resolved. Otherwise delta = omega.
pub(crate) fn frequency_integral<G, W>(
    omega_t: f64,
    power: i32,
    g: G,
    g_scale: f64,
    w: W,
    resonance: Option<(f64, f64)>,
    cfg: &QuadratureConfig<f64>,
) -> Result<Estimate<f64>>
where
    G: Fn(f64, f64) -> f64,
    W: Fn(f64) -> f64,
{
    let Some((omega0, width)) = resonance else {
        let est = integrate_semi_infinite(
            |x: f64| {
                let omega = x * omega_t;
                x.powi(power) * (g(omega, omega) / g_scale) * w(x)
            },
            1.0,
            cfg,
        )?;
        return Ok(est.scaled(omega_t.powi(power + 1) * g_scale));
    };

    let xc = omega0 / omega_t;
    let bx = width / omega_t;
    let mut ladder = Vec::new();
    let mut step = bx;
    while step < 0.5 * xc {
        ladder.push(step);
        step *= 10.0;
    }
    let f = |s: f64| {
        let x = xc + s;
        if x <= 0.0 {
            return 0.0;
        }
        x.powi(power) * (g(x * omega_t, s * omega_t) / g_scale) * w(x)
    };
    let mut below: Vec<f64> = vec![-xc];
    below.extend(ladder.iter().rev().map(|&d| -d));
    below.push(0.0);
    let mut est = integrate_with_breakpoints(f, &below, cfg)?;
    est.accumulate(&integrate_semi_infinite_with_breakpoints(f, 1.0, &ladder, cfg)?);
    Ok(est.scaled(omega_t.powi(power + 1) * g_scale))
}

/// Int_0^inf d omega omega^power alpha_I(omega) w(x).
pub(crate) fn alpha_integral<W>(
    model: &PolarizabilityModel,
    temperature: f64,
    power: i32,
    w: W,
    cfg: &QuadratureConfig<f64>,
) -> Result<Estimate<f64>>
where
    W: Fn(f64) -> f64,
{
    let omega_t = thermal_frequency(temperature);
    frequency_integral(
        omega_t,
        power,
        |omega, delta| model.alpha_i_detuned(omega, delta),
        alpha_scale(model, omega_t),
        w,
        model.resonance(),
        cfg,
    )
}
