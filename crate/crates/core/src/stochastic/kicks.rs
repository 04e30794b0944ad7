//! Poisson momentum kicks with linear friction, p' + beta p = sum dp_j delta(t - t_j).
//!
//! Photons in each frequency bin arrive as a Poisson process with rate
//! c rho sigma / hbar omega = 4 omega^3 n alpha_I / (pi c^3) per unit omega.
//! Independent arrivals cannot see Bose bunching, so the estimate converges
//! to the particle-statistics diffusion constant.

use super::{stream_rng, McEstimate};
use crate::constants::CGS;
use crate::diffusion::{diffusion_constant, ThermalEnvironment};
use crate::numerics::quadrature::QuadratureConfig;
use crate::numerics::special::occupation;
use crate::polarizability::PolarizabilityModel;
use crate::thermal::{check_temperature, thermal_frequency};
use crate::{Error, Method, RateResult, Result, Statistics, Unit};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// How the recoil (k - k').x is drawn, in units of hbar omega / c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoilSampling {
    /// Scattering angle uniform on [0, pi], direction of k - k' isotropic.
    #[serde(rename = "paper_uniform")]
    UniformAngle,
    /// cos theta weighted by the dipole phase function (1 + cos^2 theta).
    PhaseFunction,
    /// theta = 0: no momentum transfer.
    ForwardOnly,
}

impl std::str::FromStr for RecoilSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_uniform" | "uniform" => Ok(RecoilSampling::UniformAngle),
            "phase_function" | "rayleigh" => Ok(RecoilSampling::PhaseFunction),
            "forward" | "forward_only" => Ok(RecoilSampling::ForwardOnly),
            other => Err(Error::domain(format!("unknown recoil sampling '{other}'"))),
        }
    }
}

impl RecoilSampling {
    /// One draw of (k - k').x for unit photon momentum.
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        let cos_theta = match self {
            RecoilSampling::ForwardOnly => return 0.0,
            RecoilSampling::UniformAngle => (PI * rng.random::<f64>()).cos(),
            RecoilSampling::PhaseFunction => loop {
                let c = 2.0 * rng.random::<f64>() - 1.0;
                if 2.0 * rng.random::<f64>() <= 1.0 + c * c {
                    break c;
                }
            },
        };
        // |k - k'| = 2 sin(theta/2) = sqrt(2 (1 - cos theta)).
        let magnitude = (2.0 * (1.0 - cos_theta)).sqrt();
        let mu = 2.0 * rng.random::<f64>() - 1.0;
        magnitude * mu
    }
}

/// Monte Carlo estimate of <((k - k').x)^2>. Every convention that is
/// symmetric in cos theta gives 2/3.
pub fn recoil_second_moment(sampling: RecoilSampling, samples: u64, seed: u64) -> McEstimate {
    const CHUNK: u64 = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let n = CHUNK.min(samples - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let d = sampling.sample(&mut rng);
                let q = d * d;
                s += q;
                s2 += q * q;
            }
            (s, s2, n)
        })
        .collect();
    let (s, s2, n) = parts
        .iter()
        .fold((0.0, 0.0, 0u64), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    let nf = n as f64;
    let mean = s / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    McEstimate {
        mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KickProcessSpec {
    pub model: PolarizabilityModel,
    pub temperature: f64,
    /// Friction rate beta, 1/s.
    pub beta: f64,
    pub frequency_bins: usize,
    /// Averaging window per path in units of 1/beta, after a 10/beta burn-in.
    pub duration: f64,
    pub paths: usize,
    pub seed: u64,
    pub sampling: RecoilSampling,
}

/// Upper end of the frequency grid in units of k_B T / hbar.
const X_MAX: f64 = 40.0;
const BURN_IN: f64 = 10.0;

impl KickProcessSpec {
    /// A spec whose expected total number of kicks is `kicks`, split over
    /// `paths` paths of 50/beta each. beta is chosen to match; the
    /// diffusion estimate does not depend on it.
    pub fn with_kick_budget(
        model: PolarizabilityModel,
        temperature: f64,
        kicks: f64,
        paths: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut spec = KickProcessSpec {
            model,
            temperature,
            beta: 1.0,
            frequency_bins: 2000,
            duration: 50.0,
            paths,
            seed,
            sampling: RecoilSampling::UniformAngle,
        };
        let total_rate: f64 = spec.bins()?.rates.iter().sum();
        if !(total_rate > 0.0) {
            return Err(Error::domain("model does not scatter: no kicks"));
        }
        spec.beta = total_rate * spec.duration * paths as f64 / kicks;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        check_temperature(self.temperature)?;
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::domain(format!("beta must be positive, got {}", self.beta)));
        }
        if self.frequency_bins < 10 {
            return Err(Error::domain("need at least 10 frequency bins"));
        }
        if !(self.duration >= 20.0) {
            return Err(Error::domain(format!(
                "duration must be at least 20/beta, got {}",
                self.duration
            )));
        }
        if self.paths < 2 {
            return Err(Error::domain("need at least 2 paths for an error estimate"));
        }
        self.model.require_absorptive()
    }

    /// Midpoint bins in x = hbar omega / k_B T on (0, 40].
    fn bins(&self) -> Result<Bins> {
        let omega_t = thermal_frequency(self.temperature);
        let h = X_MAX / self.frequency_bins as f64;
        let mut omegas = Vec::with_capacity(self.frequency_bins);
        let mut rates = Vec::with_capacity(self.frequency_bins);
        for i in 0..self.frequency_bins {
            let x = (i as f64 + 0.5) * h;
            let w = x * omega_t;
            let alpha_i = self.model.alpha_i_effective(w)?.value;
            rates.push(4.0 * w.powi(3) * occupation(x) * alpha_i / (PI * CGS.c.powi(3)) * h * omega_t);
            omegas.push(w);
        }
        Ok(Bins { omegas, rates })
    }
}

struct Bins {
    omegas: Vec<f64>,
    rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KickResult {
    /// Steady-state <p^2>.
    pub msq_momentum: RateResult,
    /// 2 beta <p^2>, with the particle-statistics quadrature as cross-check.
    pub diffusion_estimate: RateResult,
    /// The binned rate sum (2/3 weighting) the simulation samples from.
    pub binned_campbell: f64,
    pub kicks: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_warning: Option<String>,
}

/// Simulate `paths` independent trajectories, each integrated exactly between
/// kicks, and time-average p^2 after the burn-in.
pub fn simulate_kicks(spec: &KickProcessSpec, cfg: &QuadratureConfig<f64>) -> Result<KickResult> {
    spec.validate()?;
    let bins = spec.bins()?;
    let total_rate: f64 = bins.rates.iter().sum();
    // Work in units of hbar omega_T / c and 1/beta.
    let p_unit = CGS.hbar * thermal_frequency(spec.temperature) / CGS.c;
    let binned_campbell = bins
        .rates
        .iter()
        .zip(&bins.omegas)
        .map(|(r, w)| r * (CGS.hbar * w / CGS.c).powi(2))
        .sum::<f64>()
        * 2.0
        / 3.0;

    let oracle = diffusion_constant(
        &spec.model,
        &ThermalEnvironment::new(spec.temperature, Statistics::Particle)?,
        cfg,
    )?;

    if total_rate == 0.0 {
        let zero = RateResult::new(0.0, Unit::MomentumSquared, 0.0, Method::MonteCarlo);
        let d = RateResult::new(0.0, Unit::MomentumSquaredPerTime, 0.0, Method::MonteCarlo)
            .with_cross_check(oracle.value, Method::Quadrature);
        return Ok(KickResult {
            msq_momentum: zero,
            diffusion_estimate: d,
            binned_campbell,
            kicks: 0,
            precision_warning: None,
        });
    }

    let lambda = total_rate / spec.beta; // kicks per 1/beta
    let index = WeightedIndex::new(&bins.rates).map_err(|e| Error::domain(e.to_string()))?;
    let kick_size: Vec<f64> = bins
        .omegas
        .iter()
        .map(|w| CGS.hbar * w / CGS.c / p_unit)
        .collect();
    let wait = Exp::new(lambda).map_err(|e| Error::domain(e.to_string()))?;

    let per_path: Vec<(f64, u64)> = (0..spec.paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(spec.seed, path);
            let end = BURN_IN + spec.duration;
            let (mut t, mut p, mut acc, mut kicks) = (0.0f64, 0.0f64, 0.0f64, 0u64);
            loop {
                let dt = wait.sample(&mut rng);
                let next = t + dt;
                // Integral of p^2 e^{-2 s} over the part of [t, next] after burn-in.
                let a = t.max(BURN_IN);
                let b = next.min(end);
                if b > a {
                    let pa = p * (-(a - t)).exp();
                    acc += pa * pa * (-(-2.0 * (b - a)).exp_m1()) / 2.0;
                }
                if next >= end {
                    break;
                }
                p *= (-dt).exp();
                p += kick_size[index.sample(&mut rng)] * spec.sampling.sample(&mut rng);
                t = next;
                kicks += 1;
            }
            (acc / spec.duration, kicks)
        })
        .collect();

    let values: Vec<f64> = per_path.iter().map(|v| v.0).collect();
    let kicks = per_path.iter().map(|v| v.1).sum();
    let est = McEstimate::from_values(&values);
    let scale = p_unit * p_unit;
    let msq = RateResult::new(
        est.mean * scale,
        Unit::MomentumSquared,
        est.std_error * scale,
        Method::MonteCarlo,
    );
    let diffusion_estimate = RateResult::new(
        2.0 * spec.beta * msq.value,
        Unit::MomentumSquaredPerTime,
        2.0 * spec.beta * msq.err_estimate,
        Method::MonteCarlo,
    )
    .with_cross_check(oracle.value, Method::Quadrature);

    let rel = msq.relative_error();
    let precision_warning = (rel > 0.05 || spec.paths < 16).then(|| {
        format!(
            "statistical precision is low: relative standard error {rel:.3} from {} paths",
            spec.paths
        )
    });
    Ok(KickResult {
        msq_momentum: msq,
        diffusion_estimate,
        binned_campbell,
        kicks,
        precision_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn recoil_moments() {
        let u = recoil_second_moment(RecoilSampling::UniformAngle, 400_000, 7);
        assert!(u.z_score(2.0 / 3.0) < 3.0, "{u:?}");
        let p = recoil_second_moment(RecoilSampling::PhaseFunction, 400_000, 7);
        assert!(p.z_score(2.0 / 3.0) < 3.0, "{p:?}");
        let f = recoil_second_moment(RecoilSampling::ForwardOnly, 1000, 7);
        assert_eq!(f.mean, 0.0);
    }

    #[test]
    fn recoil_is_reproducible() {
        let a = recoil_second_moment(RecoilSampling::UniformAngle, 100_000, 42);
        let b = recoil_second_moment(RecoilSampling::UniformAngle, 100_000, 42);
        assert_eq!(a, b);
        let c = recoil_second_moment(RecoilSampling::UniformAngle, 100_000, 43);
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn campbell_estimate_matches_particle_diffusion() {
        let cfg = QuadratureConfig::default();
        let spec =
            KickProcessSpec::with_kick_budget(PolarizabilityModel::electron(), 300.0, 2e5, 32, 1)
                .unwrap();
        let r = simulate_kicks(&spec, &cfg).unwrap();
        let cc = r.diffusion_estimate.cross_check.unwrap();
        let z = (r.diffusion_estimate.value - cc.value).abs() / r.diffusion_estimate.err_estimate;
        assert!(z < 3.0, "z = {z}");
        // Binning error far below the statistical error.
        assert!((r.binned_campbell - cc.value).abs() / cc.value < 1e-4);
    }

    #[test]
    fn doubling_beta_halves_msq() {
        let cfg = QuadratureConfig::default();
        let mut spec =
            KickProcessSpec::with_kick_budget(PolarizabilityModel::electron(), 300.0, 2e5, 32, 3)
                .unwrap();
        let a = simulate_kicks(&spec, &cfg).unwrap().msq_momentum;
        spec.beta *= 2.0;
        spec.duration *= 2.0;
        let b = simulate_kicks(&spec, &cfg).unwrap().msq_momentum;
        let ratio = a.value / b.value;
        let err = 2.0 * (a.relative_error().powi(2) + b.relative_error().powi(2)).sqrt();
        assert!((ratio - 2.0).abs() < 3.0 * err, "ratio {ratio} +- {err}");
    }

    #[test]
    fn no_coupling_no_kicks() {
        let cfg = QuadratureConfig::default();
        let inert = PolarizabilityModel::sphere(1e-5, Complex64::new(1.0, 0.0)).unwrap();
        let spec = KickProcessSpec {
            model: inert,
            temperature: 300.0,
            beta: 1.0,
            frequency_bins: 100,
            duration: 20.0,
            paths: 4,
            seed: 0,
            sampling: RecoilSampling::UniformAngle,
        };
        let r = simulate_kicks(&spec, &cfg).unwrap();
        assert_eq!(r.msq_momentum.value, 0.0);
        assert_eq!(r.kicks, 0);
    }
}
