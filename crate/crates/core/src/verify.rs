//! Cross-validation table behind the command line `verify`.
//!
//! Each criterion is a set of checks, every check a residual against a
//! threshold. Oracles are computed here from closed forms, frozen
//! constants or a second numerical route, never from the function under test.

use crate::constants::CGS;
use crate::decoherence::{
    angular_kernel, angular_kernel_cubature, decoherence_factor, emission_rates,
    interference_envelope, lambda_from_limit, DipolePairGeometry,
};
use crate::diffusion::{
    air_diffusion, diffusion_constant, k_space_diffusion, scattering_constant_lambda,
    AirEnvironment, ThermalEnvironment,
};
use crate::drag::{dual_path, drag_coefficient_nonrel, fluctuation_dissipation, nonrel_slope_limit};
use crate::equilibrium::{
    equilibrium_residual, fokker_planck_checkpoints, ou_moments, spectrum_ode_solve,
    SpectrumBranch, VelocityDistribution,
};
use crate::numerics::quadrature::integrate_semi_infinite;
use crate::polarizability::PolarizabilityModel;
use crate::rate::relative_difference;
use crate::stochastic::{
    gaussian_independence_control, gaussian_independence_test, recoil_second_moment,
    simulate_kicks, FieldSampleSpec, KickProcessSpec, RecoilSampling,
};
use crate::{Error, QuadratureConfig, Result, Statistics};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

/// zeta(5), zeta(9), frozen.
const ZETA5: f64 = 1.036_927_755_143_369_9;
const ZETA9: f64 = 1.002_008_392_826_082_2;

/// Peak of x^3 n(x): x = 3 (1 - e^{-x}).
const THERMAL_PEAK_X: f64 = 2.821_439_372_122_078_9;

pub const TEMPERATURES: [f64; 3] = [3.0, 300.0, 3000.0];

pub const CRITERIA: [(u8, &str); 13] = [
    (1, "electron diffusion closed form"),
    (2, "statistics ratios"),
    (3, "sphere K-space diffusion and Lambda"),
    (4, "decoherence kernel"),
    (5, "long-wavelength Lambda"),
    (6, "drag closed forms"),
    (7, "fluctuation-dissipation"),
    (8, "relativistic dual path"),
    (9, "spectrum ODE triad"),
    (10, "Fokker-Planck relaxation"),
    (11, "Monte Carlo kicks"),
    (12, "air collisions"),
    (13, "field independence"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// residual <= threshold
    AtMost,
    /// residual > threshold; used for negative controls.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub residual: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(label: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            label: label.into(),
            residual,
            threshold,
            comparison: Comparison::AtMost,
            passed: residual <= threshold,
        }
    }

    pub fn above(label: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Check {
            label: label.into(),
            residual,
            threshold,
            comparison: Comparison::Above,
            passed: residual > threshold,
        }
    }

    /// residual / threshold, the figure used to pick the worst check.
    fn load(&self) -> f64 {
        match self.comparison {
            Comparison::AtMost => self.residual / self.threshold,
            Comparison::Above => self.threshold / self.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst check relative to its threshold.
    pub residual: f64,
    pub threshold: f64,
    pub detail: String,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn from_checks(id: u8, name: &'static str, checks: Vec<Check>, seconds: f64) -> Self {
        let worst = checks
            .iter()
            .max_by(|a, b| a.load().total_cmp(&b.load()))
            .cloned();
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        let (residual, threshold, detail) = match worst {
            Some(w) => (w.residual, w.threshold, w.label),
            None => (f64::NAN, f64::NAN, "no checks".into()),
        };
        CriterionResult {
            id,
            name,
            passed,
            residual,
            threshold,
            detail,
            seconds,
            checks,
        }
    }

    fn failed(id: u8, name: &'static str, err: &Error, seconds: f64) -> Self {
        CriterionResult {
            id,
            name,
            passed: false,
            residual: f64::NAN,
            threshold: f64::NAN,
            detail: err.to_string(),
            seconds,
            checks: Vec::new(),
        }
    }
}

/// Run one criterion. Errors inside the criterion become a failed result;
/// only an unknown id is an error.
pub fn run_criterion(id: u8, cfg: &QuadratureConfig<f64>) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| Error::domain(format!("no criterion {id}; valid ids are 1-13")))?;
    let start = Instant::now();
    let checks = match id {
        1 => electron_diffusion(cfg),
        2 => statistics_ratios(cfg),
        3 => sphere_k_space(cfg),
        4 => kernel(cfg),
        5 => long_wavelength(cfg),
        6 => drag_closed_forms(cfg),
        7 => fdt(cfg),
        8 => relativistic(cfg),
        9 => spectrum(cfg),
        10 => fokker_planck(),
        11 => monte_carlo(cfg),
        12 => air(),
        _ => fields(),
    };
    let seconds = start.elapsed().as_secs_f64();
    Ok(match checks {
        Ok(mut checks) => {
            if let Some(limit) = runtime_limit(id) {
                checks.push(Check::at_most("runtime s", seconds, limit));
            }
            CriterionResult::from_checks(id, name, checks, seconds)
        }
        Err(e) => CriterionResult::failed(id, name, &e, seconds),
    })
}

/// Wall-clock limits some criteria carry.
pub fn runtime_limit(id: u8) -> Option<f64> {
    match id {
        1 => Some(1.0),
        5 => Some(30.0),
        10 => Some(10.0),
        _ => None,
    }
}

pub fn run_all(cfg: &QuadratureConfig<f64>) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|c| run_criterion(c.0, cfg).expect("known id"))
        .collect()
}

pub fn glass_sphere() -> PolarizabilityModel {
    PolarizabilityModel::sphere(1e-5, Complex64::new(2.25, 0.0)).expect("valid sphere")
}

fn cm_sq(eps: Complex64) -> f64 {
    ((eps - 1.0) / (eps + 2.0)).norm_sqr()
}

fn electron_diffusion(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let e = PolarizabilityModel::electron();
    let re = CGS.e_charge * CGS.e_charge / (CGS.m_e * CGS.c * CGS.c);
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let d = diffusion_constant(&e, &ThermalEnvironment::new(t, Statistics::Full)?, cfg)?;
        let kt = CGS.k_b * t;
        let closed =
            64.0 * PI.powi(3) / 135.0 * re * re * kt.powi(5) / (CGS.hbar.powi(3) * CGS.c.powi(4));
        out.push(Check::at_most(
            format!("T={t} quadrature vs closed form"),
            relative_difference(d.value, closed),
            1e-8,
        ));
        let d = diffusion_constant(&e, &ThermalEnvironment::new(t, Statistics::Particle)?, cfg)?;
        let closed =
            128.0 / (3.0 * PI) * ZETA5 * re * re * kt.powi(5) / (CGS.hbar.powi(3) * CGS.c.powi(4));
        out.push(Check::at_most(
            format!("T={t} particle statistics vs closed form"),
            relative_difference(d.value, closed),
            1e-8,
        ));
    }
    Ok(out)
}

fn statistics_ratio(model: &PolarizabilityModel, t: f64, cfg: &QuadratureConfig<f64>) -> Result<f64> {
    let p = diffusion_constant(model, &ThermalEnvironment::new(t, Statistics::Particle)?, cfg)?;
    let f = diffusion_constant(model, &ThermalEnvironment::new(t, Statistics::Full)?, cfg)?;
    Ok(p.value / f.value)
}

fn statistics_ratios(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let r = statistics_ratio(&PolarizabilityModel::electron(), t, cfg)?;
        out.push(Check::at_most(
            format!("electron T={t} ratio {r:.6} vs 0.9575"),
            (r - 0.9575).abs(),
            5e-4,
        ));
        let r = statistics_ratio(&glass_sphere(), t, cfg)?;
        out.push(Check::at_most(
            format!("sphere T={t} ratio {r:.6} vs 0.9980"),
            (r - 0.9980).abs(),
            2e-4,
        ));
    }
    Ok(out)
}

/// (16/9 pi c^8) Int omega^8 |alpha|^2 n by direct quadrature with the
/// static sphere polarizability.
fn lambda_direct(radius: f64, eps: Complex64, t: f64, cfg: &QuadratureConfig<f64>) -> Result<f64> {
    let wt = CGS.k_b * t / CGS.hbar;
    let a2 = radius.powi(6) * cm_sq(eps);
    let est = integrate_semi_infinite(|x: f64| x.powi(8) / x.exp_m1(), 10.0, cfg)?;
    Ok(0.5 * 16.0 / (9.0 * PI * CGS.c.powi(8)) * a2 * wt.powi(9) * est.value)
}

fn sphere_k_space(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let (a, eps) = (1e-5, Complex64::new(2.25, 0.0));
    let s = PolarizabilityModel::sphere(a, eps)?;
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let kt = CGS.k_b * t / (CGS.hbar * CGS.c);
        let k = k_space_diffusion(&s, &ThermalEnvironment::new(t, Statistics::Full)?, cfg)?;
        let closed = 1024.0 * PI.powi(7) / 135.0 * a.powi(6) * CGS.c * cm_sq(eps) * kt.powi(9);
        out.push(Check::at_most(
            format!("T={t} K-space vs closed form"),
            relative_difference(k.value, closed),
            1e-8,
        ));

        let lam = scattering_constant_lambda(&s, t)?;
        let kp = k_space_diffusion(&s, &ThermalEnvironment::new(t, Statistics::Particle)?, cfg)?;
        out.push(Check::at_most(
            format!("T={t} Lambda vs half particle K-space"),
            relative_difference(lam.value, 0.5 * kp.value),
            1e-8,
        ));
        let closed_lambda =
            8.0 / (9.0 * PI) * 40320.0 * ZETA9 * a.powi(6) * CGS.c * cm_sq(eps) * kt.powi(9);
        out.push(Check::at_most(
            format!("T={t} Lambda vs closed form"),
            relative_difference(lam.value, closed_lambda),
            1e-8,
        ));
        out.push(Check::at_most(
            format!("T={t} Lambda vs direct quadrature"),
            relative_difference(lam.value, lambda_direct(a, eps, t, cfg)?),
            1e-8,
        ));
    }
    Ok(out)
}

pub const KERNEL_SAMPLES: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

fn kernel(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let cub = cfg.with_rel_tol(1e-11).with_abs_tol(1e-14);
    for x in KERNEL_SAMPLES {
        let brute = angular_kernel_cubature(x, &cub)?;
        out.push(Check::at_most(
            format!("kd={x} reduction vs cubature"),
            relative_difference(angular_kernel(x), brute),
            1e-6,
        ));
    }
    let s = glass_sphere();
    let t = 300.0;
    out.push(Check::at_most(
        "F(0)",
        decoherence_factor(&s, t, 0.0, cfg)?.value.abs(),
        0.0,
    ));
    let k_peak = THERMAL_PEAK_X * CGS.k_b * t / (CGS.hbar * CGS.c);
    let d = 50.0 / k_peak;
    let rates = emission_rates(&s, t, &DipolePairGeometry::new(d)?, cfg)?;
    let env = interference_envelope(&s, t, d, cfg)?;
    out.push(Check::at_most(
        "kd=50 at thermal peak: |R12| / envelope",
        rates.r12.value.abs() / env.value,
        1.0,
    ));
    Ok(out)
}

fn long_wavelength(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let s = glass_sphere();
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let ex = lambda_from_limit(&s, t, cfg)?;
        let lam = scattering_constant_lambda(&s, t)?;
        out.push(Check::at_most(
            format!("T={t} limit vs Lambda"),
            relative_difference(ex.lambda.value, lam.value),
            1e-2,
        ));
    }
    Ok(out)
}

fn drag_closed_forms(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let e = PolarizabilityModel::electron();
    let (a, eps) = (1e-5, Complex64::new(2.25, 0.0));
    let s = PolarizabilityModel::sphere(a, eps)?;
    let re = CGS.e_charge * CGS.e_charge / (CGS.m_e * CGS.c * CGS.c);
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let kt = CGS.k_b * t / (CGS.hbar * CGS.c);
        let xi = drag_coefficient_nonrel(&e, t, cfg)?
            .xi
            .ok_or_else(|| Error::domain("electron has a mass"))?;
        let closed = 32.0 * PI.powi(3) * CGS.hbar / (135.0 * CGS.m_e) * re * re * kt.powi(4);
        out.push(Check::at_most(
            format!("T={t} xi_e vs closed form"),
            relative_difference(xi.value, closed),
            1e-8,
        ));
        let m_xi = drag_coefficient_nonrel(&s, t, cfg)?.m_xi;
        let closed = 512.0 * PI.powi(7) * CGS.hbar / 135.0 * a.powi(6) * cm_sq(eps) * kt.powi(8);
        out.push(Check::at_most(
            format!("T={t} m xi_s vs closed form"),
            relative_difference(m_xi.value, closed),
            1e-8,
        ));
    }
    Ok(out)
}

fn fdt(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for model in [PolarizabilityModel::electron(), glass_sphere()] {
        for t in TEMPERATURES {
            let f = fluctuation_dissipation(&model, t, cfg)?;
            out.push(Check::at_most(
                format!("{} T={t}", model.name()),
                (f.diffusion.value - f.two_m_xi_kt.value).abs() / f.diffusion.value,
                1e-6,
            ));
        }
    }
    Ok(out)
}

pub const DUAL_PATH_BETAS: [f64; 3] = [0.1, 0.5, 0.9];
pub const DUAL_PATH_TEMPERATURE_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

fn relativistic(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let t = 300.0;
    let mut out = Vec::new();
    for model in [PolarizabilityModel::electron(), glass_sphere()] {
        for b in DUAL_PATH_BETAS {
            for r in DUAL_PATH_TEMPERATURE_RATIOS {
                let state = crate::drag::RelativisticState::from_beta(b, t, r * t)?;
                let d = dual_path(&state, &model, cfg)?;
                out.push(Check::at_most(
                    format!("{} v/c={b} T'/T={r}", model.name()),
                    d.rel_diff,
                    1e-6,
                ));
            }
        }
        let lim = nonrel_slope_limit(&model, t, cfg)?;
        out.push(Check::at_most(
            format!(
                "{} slope {:.6e}; induced only {:.6e}; induced + dd {:.6e}; Richardson residual",
                model.name(),
                lim.slope,
                lim.slope_induced_only,
                lim.slope_induced_plus_dd
            ),
            lim.residual,
            1e-6,
        ));
    }
    Ok(out)
}

fn exact_occupation(branch: SpectrumBranch, x: f64) -> f64 {
    match branch {
        SpectrumBranch::Wien => (-x).exp(),
        SpectrumBranch::RayleighJeans => 1.0 / x,
        SpectrumBranch::Planck => 1.0 / x.exp_m1(),
    }
}

fn spectrum(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let t = 300.0;
    let wt = CGS.k_b * t / CGS.hbar;
    let n_pts = 200;
    let xs: Vec<f64> = (0..n_pts)
        .map(|i| 0.1 * (200.0f64).powf(i as f64 / (n_pts - 1) as f64))
        .collect();
    let grid: Vec<f64> = xs.iter().map(|x| x * wt).collect();
    let mut out = Vec::new();
    for branch in SpectrumBranch::ALL {
        let x0 = 1.0;
        let sol = spectrum_ode_solve(branch, t, x0 * wt, exact_occupation(branch, x0), &grid)?;
        let worst = xs
            .iter()
            .zip(&sol.n_values)
            .map(|(&x, &n)| ((n - exact_occupation(branch, x)) / exact_occupation(branch, x)).abs())
            .fold(0.0, f64::max);
        out.push(Check::at_most(format!("{} pointwise", branch.as_str()), worst, 1e-6));
    }
    for model in [PolarizabilityModel::electron(), glass_sphere()] {
        let r = equilibrium_residual(&model, t, cfg)?;
        out.push(Check::at_most(
            format!("{} Planck balance", model.name()),
            r.residual.abs(),
            1e-6,
        ));
    }
    Ok(out)
}

pub const FP_CELLS: usize = 4096;
pub const FP_CHECKPOINTS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

fn fokker_planck() -> Result<Vec<Check>> {
    let (m, t, xi) = (1e-18, 300.0, 1.0);
    let vt = (CGS.k_b * t / m).sqrt();
    let f0 = VelocityDistribution::gaussian(m, t, xi, 3.0 * vt, 0.2 * vt, FP_CELLS, 8.0)?;
    let (m0, v0) = (f0.mean(), f0.variance());
    let snaps = fokker_planck_checkpoints(&f0, &FP_CHECKPOINTS, 0.005)?;
    let mut out = Vec::new();
    for s in &snaps {
        let (am, av) = ou_moments(m0, v0, xi, m, t, s.xi_t / xi);
        out.push(Check::at_most(
            format!("xi t={} mean", s.xi_t),
            ((s.mean() - am) / am).abs(),
            1e-4,
        ));
        out.push(Check::at_most(
            format!("xi t={} variance", s.xi_t),
            ((s.variance() - av) / av).abs(),
            1e-4,
        ));
    }
    let last = snaps.last().expect("checkpoints");
    // Independent L1 against the continuous Maxwellian.
    let dv = last.v_grid[1] - last.v_grid[0];
    let l1: f64 = last
        .v_grid
        .iter()
        .zip(&last.f_values)
        .map(|(&v, &f)| (f - (-v * v / (2.0 * vt * vt)).exp() / (2.0 * PI * vt * vt).sqrt()).abs() * dv)
        .sum();
    out.push(Check::at_most("xi t=10 L1 to Maxwell-Boltzmann", l1, 1e-3));
    Ok(out)
}

pub const MC_SEED: u64 = 20_240_601;

fn kick_z(model: PolarizabilityModel, cfg: &QuadratureConfig<f64>) -> Result<(f64, u64)> {
    let spec = KickProcessSpec::with_kick_budget(model, 300.0, 1e6, 64, MC_SEED)?;
    let r = simulate_kicks(&spec, cfg)?;
    let d = r.diffusion_estimate;
    // Particle-statistics oracle, evaluated independently of the simulation.
    let oracle =
        diffusion_constant(&model, &ThermalEnvironment::new(300.0, Statistics::Particle)?, cfg)?;
    Ok(((d.value - oracle.value).abs() / d.err_estimate, r.kicks))
}

fn monte_carlo(cfg: &QuadratureConfig<f64>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for model in [PolarizabilityModel::electron(), glass_sphere()] {
        let (z, kicks) = kick_z(model, cfg)?;
        out.push(Check::at_most(
            format!("{} {kicks} kicks: |D_mc - D_particle| / sigma", model.name()),
            z,
            3.0,
        ));
    }
    let u = recoil_second_moment(RecoilSampling::UniformAngle, 1_000_000, MC_SEED);
    out.push(Check::at_most(
        format!("recoil {:.6} vs 2/3, in sigma", u.mean),
        u.z_score(2.0 / 3.0),
        3.0,
    ));

    let spec = KickProcessSpec::with_kick_budget(PolarizabilityModel::electron(), 300.0, 1e5, 8, 7)?;
    let a = simulate_kicks(&spec, cfg)?;
    let b = simulate_kicks(&spec, cfg)?;
    let ra = recoil_second_moment(RecoilSampling::UniformAngle, 100_000, 7);
    let rb = recoil_second_moment(RecoilSampling::UniformAngle, 100_000, 7);
    let same = a == b && ra == rb;
    out.push(Check::at_most(
        "same seed, bit-identical (0 = identical)",
        if same { 0.0 } else { 1.0 },
        0.0,
    ));
    Ok(out)
}

fn air() -> Result<Vec<Check>> {
    // N2 at sea level around a 100 nm sphere.
    let m_air = 28.0134 * 1.660_539_066_60e-24;
    let density = 2.5e19;
    let a = 1e-5;
    let mut out = Vec::new();
    for t in TEMPERATURES {
        let env = AirEnvironment::new(t, m_air, density, a)?;
        let d = air_diffusion(&env)?;
        let kt = CGS.k_b * t;
        let closed = 16.0 * a * a / 3.0 * density * (2.0 * PI * m_air).sqrt() * kt.powf(1.5);
        out.push(Check::at_most(
            format!("T={t} quadrature vs closed form"),
            relative_difference(d.value, closed),
            1e-8,
        ));
    }
    Ok(out)
}

fn fields() -> Result<Vec<Check>> {
    let spec = FieldSampleSpec {
        mode_count: 100,
        sample_count: 10_000,
        seed: MC_SEED,
    };
    let r = gaussian_independence_test(&spec)?;
    let c = gaussian_independence_control(&spec)?;
    Ok(vec![
        Check::at_most("|corr(X, Y)|", r.correlation.abs(), r.correlation_bound),
        Check::at_most("max |C_XY - C_X C_Y|", r.max_cf_deviation(), r.cf_bound),
        Check::above(
            "control Y = X: max |C_XY - C_X C_Y| must exceed bound",
            c.max_cf_deviation(),
            c.cf_bound,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_constants() {
        let z5: f64 = crate::numerics::special::riemann_zeta(5.0).unwrap();
        let z9: f64 = crate::numerics::special::riemann_zeta(9.0).unwrap();
        assert!((z5 - ZETA5).abs() < 1e-15);
        assert!((z9 - ZETA9).abs() < 1e-15);
        let x = THERMAL_PEAK_X;
        assert!((x - 3.0 * (1.0 - (-x).exp())).abs() < 1e-15);
    }

    #[test]
    fn unknown_id_rejected() {
        assert!(run_criterion(0, &QuadratureConfig::default()).is_err());
        assert!(run_criterion(14, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn check_comparisons() {
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_most("a", f64::NAN, 1.0).passed);
        assert!(Check::above("a", 2.0, 1.0).passed);
        assert!(!Check::above("a", 1.0, 1.0).passed);
    }
}
