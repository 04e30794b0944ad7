//! Two-dipole emission rates and the decoherence factor F(d) = R11 - R12.
//!
//! Only normally ordered terms contribute, so the occupation factor is n
//! (not n + 1). That is why the small-separation curvature of F equals the
//! particle-statistics scattering constant Lambda.

use crate::constants::CGS;
use crate::numerics::bessel::{kernel_bracket, kernel_bracket_deficit};
use crate::numerics::quadrature::{integrate, QuadratureConfig};
use crate::numerics::special::occupation;
use crate::polarizability::PolarizabilityModel;
use crate::thermal::{check_temperature, frequency_integral, thermal_frequency};
use crate::{Error, Estimate, Method, RateResult, Result, Unit};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// I(x) = Int dOmega dOmega' e^{i x (k - k').d} (1 + cos^2 theta)
///      = 16 pi^2 [ j0^2 + 2 (j1/x)^2 + (j0 - 2 j1/x)^2 ].
pub fn angular_kernel(x: f64) -> f64 {
    16.0 * PI * PI * kernel_bracket(x)
}

/// I(0) - I(x), accurate for small x.
pub fn angular_kernel_deficit(x: f64) -> f64 {
    16.0 * PI * PI * kernel_bracket_deficit(x)
}

/// I(0) = 64 pi^2 / 3.
pub const KERNEL_AT_ZERO: f64 = 64.0 * PI * PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipolePairGeometry {
    pub separation: f64,
}

impl DipolePairGeometry {
    pub fn new(separation: f64) -> Result<Self> {
        if !(separation >= 0.0 && separation.is_finite()) {
            return Err(Error::domain(format!(
                "separation must be non-negative, got {separation}"
            )));
        }
        Ok(DipolePairGeometry { separation })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionRates {
    pub r11: RateResult,
    pub r12: RateResult,
}

/// (c / 8 pi^3) Int dk k^6 |alpha|^2 n(k) w(k), with w supplied as a function
/// of the dimensionless kd.
fn kernel_weighted_rate<K>(
    model: &PolarizabilityModel,
    temperature: f64,
    separation: f64,
    kernel: K,
    cfg: &QuadratureConfig<f64>,
) -> Result<Estimate<f64>>
where
    K: Fn(f64) -> f64 + Sync,
{
    check_temperature(temperature)?;
    let omega_t = thermal_frequency(temperature);
    let kd_per_x = omega_t * separation / CGS.c;
    let mut a_scale = model.alpha_unchecked(omega_t).norm_sqr();
    if let Some((w0, _)) = model.resonance() {
        a_scale = a_scale.max(model.alpha_detuned(w0, 0.0).norm_sqr());
    }
    let est = frequency_integral(
        omega_t,
        6,
        |w, delta| model.alpha_detuned(w, delta).norm_sqr(),
        if a_scale > 0.0 { a_scale } else { 1.0 },
        |x| occupation(x) * kernel(x * kd_per_x),
        model.resonance(),
        cfg,
    )?;
    // dk k^6 = d omega omega^6 / c^7
    Ok(est.scaled(CGS.c / (8.0 * PI.powi(3)) / CGS.c.powi(7)))
}

fn rate(est: Estimate<f64>) -> RateResult {
    RateResult::new(est.value, Unit::Rate, est.error, Method::Quadrature)
}

/// R11 (self) and R12 (interference) photon emission rates.
pub fn emission_rates(
    model: &PolarizabilityModel,
    temperature: f64,
    geom: &DipolePairGeometry,
    cfg: &QuadratureConfig<f64>,
) -> Result<EmissionRates> {
    let r11 = kernel_weighted_rate(model, temperature, 0.0, |_| KERNEL_AT_ZERO, cfg)?;
    // R12 oscillates and can be far smaller than R11, so its accuracy is
    // measured against R11.
    let r12 = if geom.separation == 0.0 {
        r11
    } else {
        let abs_tol = cfg.abs_tol.max(cfg.rel_tol * r11.value.abs());
        let cfg12 = cfg.with_abs_tol(abs_tol);
        kernel_weighted_rate(model, temperature, geom.separation, angular_kernel, &cfg12)?
    };
    Ok(EmissionRates {
        r11: rate(r11),
        r12: rate(r12),
    })
}

/// R11 as Int dk (k^2 n / pi^2) c sigma(k), with sigma obtained by angular
/// quadrature of the differential cross section.
pub fn self_rate_from_cross_section(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    check_temperature(temperature)?;
    let omega_t = thermal_frequency(temperature);
    let sigma = |omega: f64| -> f64 {
        integrate(
            |t: f64| {
                2.0 * PI * t.sin() * model.differential_cross_section(omega, t).unwrap_or(f64::NAN)
            },
            0.0,
            PI,
            cfg,
        )
        .map(|e| e.value)
        .unwrap_or(f64::NAN)
    };
    let scale = sigma(omega_t);
    let est = frequency_integral(
        omega_t,
        2,
        |w, _| sigma(w),
        if scale > 0.0 { scale } else { 1.0 },
        occupation,
        None,
        cfg,
    )?;
    // k^2 dk = omega^2 d omega / c^3
    Ok(rate(est.scaled(CGS.c / (PI * PI * CGS.c.powi(3)))))
}

/// F(d) = R11 - R12 = (c/8 pi^3) Int dk k^6 |alpha|^2 n [I(0) - I(kd)].
pub fn decoherence_factor(
    model: &PolarizabilityModel,
    temperature: f64,
    separation: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    let geom = DipolePairGeometry::new(separation)?;
    if geom.separation == 0.0 {
        check_temperature(temperature)?;
        return Ok(RateResult::closed_form(0.0, Unit::Rate));
    }
    let est = kernel_weighted_rate(model, temperature, separation, angular_kernel_deficit, cfg)?;
    Ok(rate(est))
}

/// Curvature Lambda = lim F(d)/d^2 from Richardson extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaExtraction {
    pub lambda: RateResult,
    /// Separations used, largest first.
    pub separations: Vec<f64>,
    /// F(d)/d^2 at each separation.
    pub ratios: Vec<f64>,
    /// |R(h/2) - R(h)| / |R(h/2)| between successive extrapolants.
    pub residual: f64,
}

/// Residual allowed between the two Richardson extrapolants.
pub const LAMBDA_RESIDUAL_THRESHOLD: f64 = 1e-3;

/// Extract Lambda from F at d = lambda_th/100, /200, /400.
pub fn lambda_from_limit(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<LambdaExtraction> {
    lambda_from_limit_with(model, temperature, LAMBDA_RESIDUAL_THRESHOLD, cfg)
}

pub fn lambda_from_limit_with(
    model: &PolarizabilityModel,
    temperature: f64,
    threshold: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<LambdaExtraction> {
    check_temperature(temperature)?;
    let h = CGS.thermal_wavelength(temperature) / 100.0;
    let separations = vec![h, h / 2.0, h / 4.0];
    let ratios = separations
        .par_iter()
        .map(|&d| decoherence_factor(model, temperature, d, cfg).map(|f| f.value / (d * d)))
        .collect::<Result<Vec<f64>>>()?;
    let r1 = (4.0 * ratios[1] - ratios[0]) / 3.0;
    let r2 = (4.0 * ratios[2] - ratios[1]) / 3.0;
    let residual = if r2 == 0.0 { 0.0 } else { ((r2 - r1) / r2).abs() };
    if residual > threshold {
        return Err(Error::Extrapolation {
            residual,
            threshold,
        });
    }
    // Second Richardson level removes the d^4 term.
    let value = (16.0 * r2 - r1) / 15.0;
    Ok(LambdaExtraction {
        lambda: RateResult::new(
            value,
            Unit::WavenumberSquaredPerTime,
            (value - r2).abs(),
            Method::Quadrature,
        ),
        separations,
        ratios,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceCurve {
    pub separations: Vec<f64>,
    pub f_values: Vec<RateResult>,
    pub lambda_fit: Option<LambdaExtraction>,
}

/// F sampled at each separation (in parallel, output in input order) plus the
/// small-separation curvature.
pub fn decoherence_curve(
    model: &PolarizabilityModel,
    temperature: f64,
    separations: &[f64],
    cfg: &QuadratureConfig<f64>,
) -> Result<DecoherenceCurve> {
    let f_values = separations
        .par_iter()
        .map(|&d| decoherence_factor(model, temperature, d, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecoherenceCurve {
        separations: separations.to_vec(),
        f_values,
        lambda_fit: lambda_from_limit(model, temperature, cfg).ok(),
    })
}

/// Upper bound on R12 from I(x)/I(0) <= min(1, 2/x^2).
pub fn interference_envelope(
    model: &PolarizabilityModel,
    temperature: f64,
    separation: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<RateResult> {
    let est = kernel_weighted_rate(
        model,
        temperature,
        separation,
        |x| KERNEL_AT_ZERO * if x > 0.0 { (2.0 / (x * x)).min(1.0) } else { 1.0 },
        cfg,
    )?;
    Ok(rate(est))
}

/// I(x) by direct cubature over both photon directions, with d along z:
/// adaptive in mu = cos theta for each photon and an 8-point trapezoid in
/// each azimuth (exact, since the integrand is a degree-2 trigonometric
/// polynomial in phi1 - phi2). Independent of the Bessel reduction.
pub fn angular_kernel_cubature(x: f64, cfg: &QuadratureConfig<f64>) -> Result<f64> {
    const N_PHI: usize = 8;
    let phis: Vec<f64> = (0..N_PHI).map(|i| 2.0 * PI * i as f64 / N_PHI as f64).collect();
    let w_phi = (2.0 * PI / N_PHI as f64).powi(2);
    let inner = |mu1: f64| -> Result<f64> {
        let s1 = (1.0 - mu1 * mu1).max(0.0).sqrt();
        let est = integrate(
            |mu2: f64| {
                let s2 = (1.0 - mu2 * mu2).max(0.0).sqrt();
                let phase = (x * (mu1 - mu2)).cos();
                let mut acc = 0.0;
                for &p1 in &phis {
                    for &p2 in &phis {
                        let c = mu1 * mu2 + s1 * s2 * (p1 - p2).cos();
                        acc += 1.0 + c * c;
                    }
                }
                phase * acc * w_phi
            },
            -1.0,
            1.0,
            cfg,
        )?;
        Ok(est.value)
    };
    let panels = (x.abs() / 2.0).ceil().max(1.0) as usize;
    let points: Vec<f64> = (0..=panels)
        .map(|i| -1.0 + 2.0 * i as f64 / panels as f64)
        .collect();
    let failure = std::cell::RefCell::new(None);
    let est = crate::numerics::quadrature::integrate_with_breakpoints(
        |mu1: f64| match inner(mu1) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &points,
        cfg,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::scattering_constant_lambda;
    use num_complex::Complex64;

    fn sphere() -> PolarizabilityModel {
        PolarizabilityModel::sphere(1e-5, Complex64::new(2.1, 0.0)).unwrap()
    }

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    // Frozen from a 2D mpmath quadrature after the analytic azimuthal integral.
    const KERNEL_ORACLE: [(f64, f64); 7] = [
        (0.0, 210.551_560_556_573_0),
        (0.5, 193.608_349_058_993_6),
        (1.0, 149.491_101_010_716_7),
        (2.0, 47.668_083_078_512_40),
        (5.0, 9.655_406_101_617_243),
        (10.0, 1.262_695_071_739_403),
        (50.0, 0.007_553_043_162_058),
    ];

    #[test]
    fn kernel_matches_cubature() {
        let cfg = cfg().with_rel_tol(1e-10).with_abs_tol(1e-12);
        for &(x, _) in &KERNEL_ORACLE[..5] {
            let c = angular_kernel_cubature(x, &cfg).unwrap();
            assert!((c - angular_kernel(x)).abs() < 1e-8 * KERNEL_AT_ZERO, "x={x}");
        }
    }

    #[test]
    fn kernel_matches_frozen_values() {
        for &(x, v) in &KERNEL_ORACLE {
            assert!((angular_kernel(x) - v).abs() / v < 1e-12, "x={x}");
        }
        assert!((angular_kernel(0.0) - KERNEL_AT_ZERO).abs() < 1e-12);
    }

    #[test]
    fn deficit_is_consistent() {
        for &x in &[1e-4, 0.1, 0.7, 1.0, 3.0] {
            let d = angular_kernel_deficit(x);
            assert!((d - (KERNEL_AT_ZERO - angular_kernel(x))).abs() < 1e-12 * KERNEL_AT_ZERO);
        }
    }

    #[test]
    fn rates_at_zero_and_large_separation() {
        let geom0 = DipolePairGeometry::new(0.0).unwrap();
        let r = emission_rates(&sphere(), 300.0, &geom0, &cfg()).unwrap();
        assert_eq!(r.r11.value, r.r12.value);
        let d = 1e-3;
        let far = DipolePairGeometry::new(d).unwrap();
        let r = emission_rates(&sphere(), 300.0, &far, &cfg()).unwrap();
        let env = interference_envelope(&sphere(), 300.0, d, &cfg()).unwrap();
        assert!(r.r12.value.abs() <= env.value);
        assert!(env.value < 0.1 * r.r11.value);
        assert_eq!(decoherence_factor(&sphere(), 300.0, 0.0, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn self_rate_two_ways() {
        let geom = DipolePairGeometry::new(0.0).unwrap();
        let r = emission_rates(&sphere(), 300.0, &geom, &cfg()).unwrap();
        let alt = self_rate_from_cross_section(&sphere(), 300.0, &cfg()).unwrap();
        assert!((r.r11.value - alt.value).abs() / alt.value < 1e-8);
    }

    #[test]
    fn interference_bounded() {
        let lambda_th = CGS.thermal_wavelength(300.0);
        for k in 0..12 {
            let d = lambda_th * 1e-3 * 2f64.powi(k);
            let g = DipolePairGeometry::new(d).unwrap();
            let r = emission_rates(&sphere(), 300.0, &g, &cfg()).unwrap();
            assert!(r.r12.value >= 0.0 && r.r12.value <= r.r11.value * (1.0 + 1e-12));
            let f = decoherence_factor(&sphere(), 300.0, d, &cfg()).unwrap();
            assert!((f.value - (r.r11.value - r.r12.value)).abs() <= 1e-9 * r.r11.value);
        }
    }

    #[test]
    fn lambda_limit_matches_closed_form() {
        let ex = lambda_from_limit(&sphere(), 300.0, &cfg()).unwrap();
        let closed = scattering_constant_lambda(&sphere(), 300.0).unwrap();
        assert!((ex.lambda.value - closed.value).abs() / closed.value < 1e-4);
    }

    #[test]
    fn negative_separation_rejected() {
        assert!(decoherence_factor(&sphere(), 300.0, -1.0, &cfg()).is_err());
    }
}
