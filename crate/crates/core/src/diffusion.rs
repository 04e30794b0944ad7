//! Momentum diffusion constants <Delta p^2>/Delta t.
//!
//! D = (8 hbar^2 / 3 pi c^5) Int d omega omega^5 alpha_I(omega) S(omega)
//!
//! with S = n, n^2 or n^2 + n. The 2/3 angular factor is already included.

use crate::constants::CGS;
use crate::numerics::bose::{bose_integral_closed_form, BoseKind};
use crate::numerics::quadrature::{integrate_semi_infinite, QuadratureConfig};
use crate::numerics::special::occupation;
use crate::polarizability::{clausius_mossotti_sq, PolarizabilityModel};
use crate::rate::relative_difference;
use crate::thermal::{alpha_integral, check_temperature, frequency_integral, thermal_frequency};
use crate::{Error, Method, RateResult, Result, Unit};
use serde::Serialize;
use std::f64::consts::PI;

pub use crate::thermal::Statistics;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalEnvironment {
    pub temperature: f64,
    pub statistics: Statistics,
}

impl ThermalEnvironment {
    pub fn new(temperature: f64, statistics: Statistics) -> Result<Self> {
        check_temperature(temperature)?;
        Ok(ThermalEnvironment {
            temperature,
            statistics,
        })
    }
}

/// 8 hbar^2 / (3 pi c^5).
fn prefactor() -> f64 {
    8.0 * CGS.hbar * CGS.hbar / (3.0 * PI * CGS.c.powi(5))
}

/// Where alpha_I obeys the optical theorem exactly, so |alpha|^2 and alpha_I
/// forms of the same rate must agree.
fn optical_theorem_exact(model: &PolarizabilityModel) -> bool {
    match *model {
        PolarizabilityModel::Electron { .. } => true,
        PolarizabilityModel::Sphere { epsilon, .. } => epsilon.im == 0.0,
        PolarizabilityModel::TwoLevel { .. } => false,
    }
}

/// Quadrature of the general diffusion integral.
///
/// For the free charge and lossless sphere the closed form is
/// attached as a cross-check.
pub fn diffusion_constant(
    model: &PolarizabilityModel,
    env: &ThermalEnvironment,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    model.require_absorptive()?;
    check_temperature(env.temperature)?;
    let stats = env.statistics;
    let est = alpha_integral(
        model,
        env.temperature,
        5,
        |x| stats.factor(occupation(x)),
        cfg,
    )?;
    let pre = prefactor();
    let out = RateResult::new(
        pre * est.value,
        Unit::MomentumSquaredPerTime,
        pre * est.error,
        Method::Quadrature,
    );
    Ok(match diffusion_closed_form(model, env.temperature, stats) {
        Ok(cf) => out.with_cross_check(cf.value, Method::ClosedForm),
        Err(_) => out,
    })
}

/// I_s(S) = Int x^s S(x) dx in closed form.
fn bose_moment(s: u32, stats: Statistics) -> Result<f64> {
    let particle = bose_integral_closed_form::<f64>(s, BoseKind::Particle)?;
    let full = bose_integral_closed_form::<f64>(s, BoseKind::WavePlusParticle)?;
    Ok(match stats {
        Statistics::Particle => particle,
        Statistics::Full => full,
        Statistics::Wave => full - particle,
    })
}

/// Closed forms.
///
/// Free charge: (8 hbar^2/3 pi c^5)(q^2 tau/m) (k_B T/hbar)^5 I_4, which for
/// the full statistics is (64 pi^3/135) r_e^2 (k_B T)^5/(hbar^3 c^4).
/// Lossless sphere: hbar^2 (16/9 pi) a^6 c |(eps-1)/(eps+2)|^2 (k_B T/hbar c)^9 I_8.
pub fn diffusion_closed_form(
    model: &PolarizabilityModel,
    temperature: f64,
    stats: Statistics,
) -> Result<RateResult> {
    check_temperature(temperature)?;
    let value = match *model {
        PolarizabilityModel::Electron { mass, charge, tau } => {
            let omega_t = thermal_frequency(temperature);
            prefactor() * charge * charge * tau / mass * omega_t.powi(5) * bose_moment(4, stats)?
        }
        PolarizabilityModel::Sphere { radius, epsilon } => {
            CGS.hbar
                * CGS.hbar
                * sphere_k_space_factor(radius, epsilon, temperature)
                * bose_moment(8, stats)?
        }
        PolarizabilityModel::TwoLevel { .. } => {
            return Err(Error::UnsupportedModel(
                "no closed-form diffusion constant for the two-level atom".into(),
            ))
        }
    };
    Ok(RateResult::closed_form(value, Unit::MomentumSquaredPerTime))
}

/// (16 / 9 pi) a^6 c |CM|^2 (k_B T / hbar c)^9.
fn sphere_k_space_factor(radius: f64, epsilon: num_complex::Complex64, temperature: f64) -> f64 {
    let kt = thermal_frequency(temperature) / CGS.c;
    16.0 / (9.0 * PI) * radius.powi(6) * CGS.c * clausius_mossotti_sq(epsilon) * kt.powi(9)
}

/// <Delta K^2>/Delta t = D / hbar^2, cross-checked against the
/// (16/9 pi c^8) Int omega^8 |alpha|^2 S form.
pub fn k_space_diffusion(
    model: &PolarizabilityModel,
    env: &ThermalEnvironment,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    let p_space = diffusion_constant(model, env, cfg)?;
    let hbar2 = CGS.hbar * CGS.hbar;
    let primary = RateResult::new(
        p_space.value / hbar2,
        Unit::WavenumberSquaredPerTime,
        p_space.err_estimate / hbar2,
        Method::Quadrature,
    );

    let stats = env.statistics;
    let omega_t = thermal_frequency(env.temperature);
    let mut a_scale = model.alpha_unchecked(omega_t).norm_sqr();
    if let Some((w0, _)) = model.resonance() {
        a_scale = a_scale.max(model.alpha_detuned(w0, 0.0).norm_sqr());
    }
    let alt = frequency_integral(
        omega_t,
        8,
        |w, delta| model.alpha_detuned(w, delta).norm_sqr(),
        if a_scale > 0.0 { a_scale } else { 1.0 },
        |x| stats.factor(occupation(x)),
        model.resonance(),
        cfg,
    )?;
    let alt_value = 16.0 / (9.0 * PI * CGS.c.powi(8)) * alt.value;
    let rel = relative_difference(primary.value, alt_value);
    if optical_theorem_exact(model) && rel > 1e-8 {
        return Err(Error::Consistency {
            what: "K-space diffusion: alpha_I form vs |alpha|^2 form".into(),
            rel_diff: rel,
            tolerance: 1e-8,
        });
    }
    Ok(primary.with_cross_check(alt_value, Method::Quadrature))
}

/// Closed-form K-space diffusion for the sphere or electron.
pub fn k_space_closed_form(
    model: &PolarizabilityModel,
    temperature: f64,
    stats: Statistics,
) -> Result<RateResult> {
    let hbar2 = CGS.hbar * CGS.hbar;
    let cf = diffusion_closed_form(model, temperature, stats)?;
    Ok(RateResult::closed_form(
        cf.value / hbar2,
        Unit::WavenumberSquaredPerTime,
    ))
}

/// Scattering constant Lambda: half the particle-statistics K-space diffusion,
/// (8/9 pi) 8! zeta(9) a^6 c |CM|^2 (k_B T/hbar c)^9. The quadrature value is
/// attached as a cross-check.
pub fn scattering_constant_lambda(
    model: &PolarizabilityModel,
    temperature: f64,
) -> Result<RateResult> {
    let PolarizabilityModel::Sphere { radius, epsilon } = *model else {
        return Err(Error::UnsupportedModel(format!(
            "scattering constant is defined for the sphere, not {}",
            model.name()
        )));
    };
    check_temperature(temperature)?;
    let value = 0.5
        * sphere_k_space_factor(radius, epsilon, temperature)
        * bose_moment(8, Statistics::Particle)?;
    let env = ThermalEnvironment::new(temperature, Statistics::Particle)?;
    let quad = k_space_diffusion(model, &env, &QuadratureConfig::default())?;
    Ok(
        RateResult::closed_form(value, Unit::WavenumberSquaredPerTime)
            .with_cross_check(0.5 * quad.value, Method::Quadrature),
    )
}

/// Gas of molecules colliding with a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AirEnvironment {
    pub temperature: f64,
    pub molecule_mass: f64,
    pub number_density: f64,
    pub radius: f64,
}

impl AirEnvironment {
    pub fn new(
        temperature: f64,
        molecule_mass: f64,
        number_density: f64,
        radius: f64,
    ) -> Result<Self> {
        check_temperature(temperature)?;
        for (name, v) in [("molecule mass", molecule_mass), ("radius", radius)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(number_density >= 0.0 && number_density.is_finite()) {
            return Err(Error::domain("number density must be non-negative"));
        }
        Ok(AirEnvironment {
            temperature,
            molecule_mass,
            number_density,
            radius,
        })
    }

    /// sigma_air = 2 pi a^2 / 3.
    pub fn cross_section(&self) -> f64 {
        2.0 * PI * self.radius * self.radius / 3.0
    }
}

/// Momentum diffusion from molecular collisions,
/// Int dq q^2 rho(q) (q/m) sigma_air with Maxwell-Boltzmann rho(q), checked
/// against (16 a^2/3)(N/V) sqrt(2 pi m) (k_B T)^(3/2).
pub fn air_diffusion(env: &AirEnvironment) -> Result<RateResult> {
    let m = env.molecule_mass;
    let kt = CGS.k_b * env.temperature;
    let closed = 16.0 * env.radius * env.radius / 3.0
        * env.number_density
        * (2.0 * PI * m).sqrt()
        * kt.powf(1.5);

    // q = u sqrt(2 m k T): Int q^5 e^{-q^2/2mkT} dq = (2mkT)^3 Int u^5 e^{-u^2} du.
    let q0 = (2.0 * m * kt).sqrt();
    let cfg = QuadratureConfig::default();
    let moment = integrate_semi_infinite(|u: f64| u.powi(5) * (-u * u).exp(), 1.0, &cfg)?;
    let norm = env.number_density * 4.0 * PI * (2.0 * PI * m * kt).powf(-1.5);
    let factor = norm * env.cross_section() / m * q0.powi(6);
    let value = factor * moment.value;
    let rel = relative_difference(value, closed);
    if rel > 1e-8 {
        return Err(Error::Consistency {
            what: "air diffusion quadrature vs closed form".into(),
            rel_diff: rel,
            tolerance: 1e-8,
        });
    }
    Ok(RateResult::new(
        value,
        Unit::MomentumSquaredPerTime,
        factor * moment.error,
        Method::Quadrature,
    )
    .with_cross_check(closed, Method::ClosedForm))
}
