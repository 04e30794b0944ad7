//! Einstein-Hopf drag on a particle moving through isotropic thermal
//! radiation.
//!
//! Nonrelativistically F = -m xi v with
//!
//! m xi = (4 hbar / 3 pi c^5) (hbar / k_B T) Int d omega omega^5 alpha_I n (n + 1).
//!
//! For arbitrary v the lab-frame force splits into the induced-dipole force,
//! the boost of the power absorbed in the rest frame, and the reaction to the
//! power radiated at the particle temperature T'. Their sum is the Milton
//! double integral over omega and the Doppler factor y.

use crate::constants::CGS;
use crate::diffusion::{diffusion_constant, ThermalEnvironment};
use crate::numerics::bose::{bose_integral_closed_form, BoseKind};
use crate::numerics::quadrature::{integrate, integrate_with_breakpoints, QuadratureConfig};
use crate::numerics::special::{bose_difference, bose_variance, occupation};
use crate::polarizability::{clausius_mossotti_sq, PolarizabilityModel};
use crate::rate::relative_difference;
use crate::thermal::{alpha_integral, check_temperature, thermal_frequency};
use crate::{Error, Estimate, Method, RateResult, Result, Statistics, Unit};
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Uniform motion along x through radiation at `t_lab`, with the particle
/// itself in equilibrium at `t_particle` in its rest frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativisticState {
    pub velocity: f64,
    pub gamma: f64,
    pub t_lab: f64,
    pub t_particle: f64,
}

impl RelativisticState {
    pub fn new(velocity: f64, t_lab: f64, t_particle: f64) -> Result<Self> {
        check_temperature(t_lab)?;
        check_temperature(t_particle)?;
        let beta = velocity / CGS.c;
        if !(beta.abs() < 1.0) {
            return Err(Error::domain(format!(
                "|v| must be below c, got v/c = {beta}"
            )));
        }
        let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
        Ok(RelativisticState {
            velocity,
            gamma,
            t_lab,
            t_particle,
        })
    }

    /// Same state with v given as a fraction of c.
    pub fn from_beta(beta: f64, t_lab: f64, t_particle: f64) -> Result<Self> {
        Self::new(beta * CGS.c, t_lab, t_particle)
    }

    pub fn beta(&self) -> f64 {
        self.velocity / CGS.c
    }

    /// sqrt((1 + beta) / (1 - beta)).
    pub fn u_plus(&self) -> f64 {
        self.gamma * (1.0 + self.beta())
    }

    /// sqrt((1 - beta) / (1 + beta)) = 1 / u_plus.
    pub fn u_minus(&self) -> f64 {
        self.gamma * (1.0 - self.beta())
    }
}

/// m xi, plus xi itself when the model carries a mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DragCoefficient {
    pub m_xi: RateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<RateResult>,
}

/// (4 hbar^2 / 3 pi c^5 k_B T) Int omega^5 alpha_I n (n + 1), with the sign of
/// alpha_I left alone.
fn m_xi_integral(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<Estimate<f64>> {
    check_temperature(temperature)?;
    let pre = 4.0 * CGS.hbar * CGS.hbar / (3.0 * PI * CGS.c.powi(5) * CGS.k_b * temperature);
    Ok(alpha_integral(model, temperature, 5, bose_variance, cfg)?.scaled(pre))
}

/// Nonrelativistic drag coefficient by quadrature, with the closed
/// form for the free charge and the sphere attached as a cross-check.
pub fn drag_coefficient_nonrel(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<DragCoefficient> {
    model.require_absorptive()?;
    let est = m_xi_integral(model, temperature, cfg)?;
    let mut m_xi = RateResult::new(
        est.value,
        Unit::ForcePerVelocity,
        est.error,
        Method::Quadrature,
    );
    if let Ok(cf) = drag_closed_form(model, temperature) {
        m_xi = m_xi.with_cross_check(cf.value, Method::ClosedForm);
    }
    let xi = model.mass().map(|m| {
        let mut r = m_xi.scaled(1.0 / m);
        r.unit = Unit::Rate;
        r
    });
    Ok(DragCoefficient { m_xi, xi })
}

/// m xi in closed form.
///
/// Free charge: (32 pi^3 hbar / 135) r^2 (k_B T / hbar c)^4 with r = q^2/(m c^2),
/// written through q^2 tau / m so it holds for any charge and mass.
/// Sphere: (512 pi^7 hbar / 135) a^6 |(eps-1)/(eps+2)|^2 (k_B T / hbar c)^8.
pub fn drag_closed_form(model: &PolarizabilityModel, temperature: f64) -> Result<RateResult> {
    check_temperature(temperature)?;
    let omega_t = thermal_frequency(temperature);
    let pre = 4.0 * CGS.hbar / (3.0 * PI * CGS.c.powi(5)) / omega_t;
    let value = match *model {
        PolarizabilityModel::Electron { mass, charge, tau } => {
            let moment = bose_integral_closed_form::<f64>(4, BoseKind::WavePlusParticle)?;
            pre * charge * charge * tau / mass * omega_t.powi(5) * moment
        }
        PolarizabilityModel::Sphere { radius, epsilon } => {
            let moment = bose_integral_closed_form::<f64>(8, BoseKind::WavePlusParticle)?;
            pre * 2.0 / 3.0 * radius.powi(6) * clausius_mossotti_sq(epsilon) / CGS.c.powi(3)
                * omega_t.powi(9)
                * moment
        }
        PolarizabilityModel::TwoLevel { .. } => {
            return Err(Error::UnsupportedModel(
                "use two_level_drag for the atom's narrow-line drag".into(),
            ))
        }
    };
    Ok(RateResult::closed_form(value, Unit::ForcePerVelocity))
}

/// D_full against 2 m xi k_B T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationDissipation {
    pub diffusion: RateResult,
    pub two_m_xi_kt: RateResult,
    pub rel_diff: f64,
}

pub fn fluctuation_dissipation(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<FluctuationDissipation> {
    let env = ThermalEnvironment::new(temperature, Statistics::Full)?;
    let diffusion = diffusion_constant(model, &env, cfg)?;
    let drag = drag_coefficient_nonrel(model, temperature, cfg)?;
    let mut two_m_xi_kt = drag.m_xi.scaled(2.0 * CGS.k_b * temperature);
    two_m_xi_kt.unit = Unit::MomentumSquaredPerTime;
    Ok(FluctuationDissipation {
        rel_diff: relative_difference(diffusion.value, two_m_xi_kt.value),
        diffusion,
        two_m_xi_kt,
    })
}

/// Outer frequency integral Int omega^4 alpha_I(omega) inner(x) with an
/// inner quadrature per node. The first inner failure is returned.
fn nested_force<F>(
    model: &PolarizabilityModel,
    temperature: f64,
    inner: F,
    prefactor: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let est = alpha_integral(
        model,
        temperature,
        4,
        |x| match inner(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        cfg,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let value = prefactor * est.value;
    // Inner integrals are converged to rel_tol; that adds coherently.
    let err = (prefactor * est.error).abs() + cfg.rel_tol * value.abs();
    Ok(RateResult::new(value, Unit::Force, err, Method::Quadrature))
}

fn zero_force() -> RateResult {
    RateResult::new(0.0, Unit::Force, 0.0, Method::ClosedForm)
}

/// Induced-dipole force
///
/// F_ind = (hbar c / pi^2) Int d^3k k k_x alpha_I(omega) n(gamma (omega + v k_x))
///       = (2 hbar / pi c^4) Int d omega omega^4 alpha_I
///           Int_0^1 d mu mu [n(gamma x (1 + beta mu)) - n(gamma x (1 - beta mu))],
///
/// the mu integral folded so the odd part is taken without cancellation. Zero
/// at v = 0 exactly.
pub fn force_induced(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    model.require_absorptive()?;
    if state.velocity == 0.0 {
        return Ok(zero_force());
    }
    let (beta, gamma) = (state.beta(), state.gamma);
    let inner = |x: f64| -> Result<f64> {
        let a = gamma * x;
        let est = integrate(
            |mu: f64| mu * bose_difference(a * (1.0 + beta * mu), a * (1.0 - beta * mu)),
            0.0,
            1.0,
            cfg,
        )?;
        Ok(est.value)
    };
    let pre = 2.0 * CGS.hbar / (PI * CGS.c.powi(4));
    nested_force(model, state.t_lab, inner, pre, cfg)
}

/// Boost of the rest-frame absorbed power, (v/c^2) P'_abs:
///
/// F_abs = (2 v hbar / pi c^5) Int d omega omega^4 alpha_I Int_{-1}^{1} d mu n(gamma x (1 + beta mu)).
pub fn force_absorbed(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    model.require_absorptive()?;
    if state.velocity == 0.0 {
        return Ok(zero_force());
    }
    let (beta, gamma) = (state.beta(), state.gamma);
    let inner = |x: f64| -> Result<f64> {
        let a = gamma * x;
        Ok(integrate(|mu: f64| occupation(a * (1.0 + beta * mu)), -1.0, 1.0, cfg)?.value)
    };
    let pre = 2.0 * state.velocity * CGS.hbar / (PI * CGS.c.powi(5));
    nested_force(model, state.t_lab, inner, pre, cfg)
}

/// Radiation-reaction force
///
/// F_dd = -(4 v hbar / pi c^5) Int d omega omega^4 alpha_I n(omega; T').
pub fn force_dd(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    model.require_absorptive()?;
    if state.velocity == 0.0 {
        return Ok(zero_force());
    }
    let est = alpha_integral(model, state.t_particle, 4, occupation, cfg)?;
    let pre = -4.0 * state.velocity * CGS.hbar / (PI * CGS.c.powi(5));
    Ok(RateResult::new(
        pre * est.value,
        Unit::Force,
        (pre * est.error).abs(),
        Method::Quadrature,
    ))
}

/// The three lab-frame contributions and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceComposition {
    pub induced: RateResult,
    pub absorbed: RateResult,
    pub dd: RateResult,
    pub total: RateResult,
}

pub fn force_composition(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<ForceComposition> {
    let induced = force_induced(state, model, cfg)?;
    let absorbed = force_absorbed(state, model, cfg)?;
    let dd = force_dd(state, model, cfg)?;
    let total = RateResult::new(
        induced.value + absorbed.value + dd.value,
        Unit::Force,
        induced.err_estimate + absorbed.err_estimate + dd.err_estimate,
        Method::Quadrature,
    );
    Ok(ForceComposition {
        induced,
        absorbed,
        dd,
        total,
    })
}

/// Total force in the Milton form
///
/// F_x = -(2 hbar / pi gamma^2 v^2 c^2) Int d omega omega^4 alpha_I
///         Int_{u-}^{u+} dy (y - 1/gamma) [n(omega; T') - n(omega y; T)].
///
/// The coth bracket of the symmetric form is 2 [n - n], used here directly.
/// v = 0 is a 0/0 limit and is refused.
pub fn total_force_relativistic(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    model.require_absorptive()?;
    if state.velocity == 0.0 {
        return Err(Error::domain(
            "the Milton form is degenerate at v = 0; use force_induced and force_dd",
        ));
    }
    let gamma = state.gamma;
    let (lo, hi) = (state.u_minus(), state.u_plus());
    let temp_ratio = state.t_lab / state.t_particle;
    let mut points = vec![lo, hi, 1.0 / gamma, 1.0, temp_ratio];
    points.retain(|&p| p >= lo && p <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let inner = |x: f64| -> Result<f64> {
        let est = integrate_with_breakpoints(
            |y: f64| (y - 1.0 / gamma) * bose_difference(x * temp_ratio, x * y),
            &points,
            cfg,
        )?;
        Ok(est.value)
    };
    let v = state.velocity;
    let pre = -2.0 * CGS.hbar / (PI * gamma * gamma * v * v * CGS.c * CGS.c);
    nested_force(model, state.t_lab, inner, pre, cfg)
}

/// Milton form against the three-term composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualPath {
    pub milton: RateResult,
    pub composition: ForceComposition,
    pub rel_diff: f64,
}

pub fn dual_path(
    state: &RelativisticState,
    model: &PolarizabilityModel,
    cfg: &QuadratureConfig<f64>,
) -> Result<DualPath> {
    let milton = total_force_relativistic(state, model, cfg)?;
    let composition = force_composition(state, model, cfg)?;
    Ok(DualPath {
        rel_diff: relative_difference(milton.value, composition.total.value),
        milton,
        composition,
    })
}

/// Small-velocity limit of F_x / v at T' = T.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeExtrapolation {
    pub betas: Vec<f64>,
    /// F_x / v at each beta.
    pub slopes: Vec<f64>,
    /// Richardson limit in beta^2.
    pub slope: f64,
    pub residual: f64,
    /// -m xi: induced force alone.
    pub slope_induced_only: f64,
    /// -m xi - (4 hbar / pi c^5) Int omega^4 alpha_I n(T): induced plus radiation reaction.
    pub slope_induced_plus_dd: f64,
    pub ratio_to_induced_only: f64,
}

pub const SLOPE_BETAS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Evaluate the Milton form at v/c = 1e-2, 1e-3, 1e-4 with T' = T and
/// extrapolate F_x/v to v = 0. The force is odd in v, so the slope error
/// is a series in beta^2.
pub fn nonrel_slope_limit(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<SlopeExtrapolation> {
    let mut slopes = Vec::with_capacity(SLOPE_BETAS.len());
    for &b in &SLOPE_BETAS {
        let state = RelativisticState::from_beta(b, temperature, temperature)?;
        slopes.push(total_force_relativistic(&state, model, cfg)?.value / state.velocity);
    }
    let richardson = |s_coarse: f64, s_fine: f64, b_coarse: f64, b_fine: f64| {
        let r = (b_coarse / b_fine).powi(2);
        (r * s_fine - s_coarse) / (r - 1.0)
    };
    let r1 = richardson(slopes[0], slopes[1], SLOPE_BETAS[0], SLOPE_BETAS[1]);
    let r2 = richardson(slopes[1], slopes[2], SLOPE_BETAS[1], SLOPE_BETAS[2]);

    let m_xi = m_xi_integral(model, temperature, cfg)?.value;
    let emitted = alpha_integral(model, temperature, 4, occupation, cfg)?.value;
    let dd_slope = -4.0 * CGS.hbar / (PI * CGS.c.powi(5)) * emitted;
    Ok(SlopeExtrapolation {
        betas: SLOPE_BETAS.to_vec(),
        slopes,
        slope: r2,
        residual: relative_difference(r1, r2),
        slope_induced_only: -m_xi,
        slope_induced_plus_dd: -m_xi + dd_slope,
        ratio_to_induced_only: r2 / -m_xi,
    })
}

/// Narrow-line drag of a two-level atom, force per velocity:
///
/// F / v = -(hbar omega0 / c^2) (p1 - p2) B [rho(omega0) - (omega0/3) rho'(omega0)]
///
/// with B = 4 pi^2 mu^2 / 3 hbar^2 and rho = hbar omega^3 n / (pi^2 c^3). An
/// inverted atom gets a negative drag.
pub fn two_level_drag(model: &PolarizabilityModel, temperature: f64) -> Result<RateResult> {
    check_temperature(temperature)?;
    let PolarizabilityModel::TwoLevel {
        omega0,
        dipole,
        p1,
        p2,
        ..
    } = *model
    else {
        return Err(Error::UnsupportedModel(format!(
            "two_level_drag needs a two-level atom, got {}",
            model.name()
        )));
    };
    let hbar = CGS.hbar;
    let x = hbar * omega0 / (CGS.k_b * temperature);
    let n = occupation(x);
    let dn = -hbar / (CGS.k_b * temperature) * bose_variance(x);
    let norm = hbar / (PI * PI * CGS.c.powi(3));
    let rho = norm * omega0.powi(3) * n;
    let drho = norm * (3.0 * omega0 * omega0 * n + omega0.powi(3) * dn);
    let b = 4.0 * PI * PI * dipole * dipole / (3.0 * hbar * hbar);
    let f_over_v = -(hbar * omega0 / (CGS.c * CGS.c)) * (p1 - p2) * b * (rho - omega0 / 3.0 * drho);
    // The drag coefficient is m xi = -F/v.
    Ok(RateResult::closed_form(-f_over_v, Unit::ForcePerVelocity))
}

/// m xi for the two-level atom by quadrature over the full Lorentzian, for
/// either sign of the population difference.
pub fn two_level_drag_quadrature(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    if !matches!(model, PolarizabilityModel::TwoLevel { .. }) {
        return Err(Error::UnsupportedModel(format!(
            "two_level_drag_quadrature needs a two-level atom, got {}",
            model.name()
        )));
    }
    let est = m_xi_integral(model, temperature, cfg)?;
    Ok(RateResult::new(
        est.value,
        Unit::ForcePerVelocity,
        est.error,
        Method::Quadrature,
    ))
}

/// Lab-frame force on an atom excited at t = 0 and decaying in vacuum, to
/// first order in v/c: -(v/c^2) hbar omega0 Gamma e^{-Gamma t}.
pub fn vacuum_friction_excited_atom(
    velocity: f64,
    omega0: f64,
    gamma: f64,
    t: f64,
) -> Result<RateResult> {
    if !(velocity.abs() / CGS.c < 0.1) {
        return Err(Error::OutOfRegime(format!(
            "first order in v/c needs |v|/c < 0.1, got {}",
            velocity / CGS.c
        )));
    }
    if !(omega0 > 0.0) || !(gamma >= 0.0) || !(t >= 0.0) || !omega0.is_finite() {
        return Err(Error::domain(
            "need omega0 > 0, Gamma >= 0 and t >= 0 for vacuum friction",
        ));
    }
    let decay = if gamma == 0.0 { 1.0 } else { (-gamma * t).exp() };
    let value = -velocity / (CGS.c * CGS.c) * CGS.hbar * omega0 * gamma * decay;
    Ok(RateResult::closed_form(value, Unit::Force))
}
