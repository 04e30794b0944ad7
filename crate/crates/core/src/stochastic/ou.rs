//! Ornstein-Uhlenbeck paths dv = -xi v dt + sqrt(2 xi k_B T / m) dW, the
//! Langevin form of the velocity Fokker-Planck equation.

use super::{stream_rng, McEstimate};
use crate::constants::CGS;
use crate::equilibrium::ou_moments;
use crate::{Error, Result};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OuScheme {
    /// First order; the stationary variance is biased by a factor
    /// 1/(1 - xi dt / 2).
    EulerMaruyama,
    /// Exact Gaussian transition over each step.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuSpec {
    pub xi: f64,
    pub mass: f64,
    /// k_B T = 0 is allowed and gives deterministic decay.
    pub temperature: f64,
    pub v0: f64,
    pub n_paths: usize,
    pub t_final: f64,
    pub dt: f64,
    pub seed: u64,
    pub scheme: OuScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuEnsemble {
    pub t: f64,
    pub mean: McEstimate,
    /// Ensemble variance and its standard error (Gaussian approximation).
    pub variance: f64,
    pub variance_std_error: f64,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
}

impl OuEnsemble {
    pub fn mean_z(&self) -> f64 {
        self.mean.z_score(self.analytic_mean)
    }

    pub fn variance_z(&self) -> f64 {
        if self.variance_std_error == 0.0 {
            return if (self.variance - self.analytic_variance).abs()
                <= 1e-12 * self.analytic_variance.abs().max(f64::MIN_POSITIVE)
            {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (self.variance - self.analytic_variance).abs() / self.variance_std_error
    }
}

/// Velocity of every path at each checkpoint, paths x checkpoints, together
/// with the checkpoint times actually reached (whole steps).
pub fn ou_path_samples(spec: &OuSpec, checkpoints: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if !(spec.xi > 0.0) || !(spec.mass > 0.0) || !(spec.temperature >= 0.0) {
        return Err(Error::domain("need xi > 0, m > 0 and T >= 0"));
    }
    if !(spec.dt > 0.0) || spec.dt * spec.xi > 0.01 * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "time step must satisfy 0 < dt <= 0.01/xi, got xi dt = {}",
            spec.dt * spec.xi
        )));
    }
    if spec.n_paths < 2 {
        return Err(Error::domain("need at least 2 paths"));
    }
    let mut times = checkpoints.to_vec();
    if times.is_empty() {
        times.push(spec.t_final);
    }
    if times.iter().any(|&t| !(t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("checkpoints must be non-negative and ascending"));
    }

    let vt2 = CGS.k_b * spec.temperature / spec.mass;
    let (drift, noise) = match spec.scheme {
        OuScheme::EulerMaruyama => (1.0 - spec.xi * spec.dt, (2.0 * spec.xi * vt2 * spec.dt).sqrt()),
        OuScheme::Exact => {
            let d = (-spec.xi * spec.dt).exp();
            (d, (vt2 * (-(-2.0 * spec.xi * spec.dt).exp_m1())).sqrt())
        }
    };
    let steps: Vec<u64> = {
        let mut prev = 0u64;
        times
            .iter()
            .map(|&t| {
                let total = (t / spec.dt).round() as u64;
                let n = total.saturating_sub(prev);
                prev = prev.max(total);
                n
            })
            .collect()
    };
    let mut reached = Vec::with_capacity(times.len());
    let mut acc = 0u64;
    for &n in &steps {
        acc += n;
        reached.push(acc as f64 * spec.dt);
    }

    let samples: Vec<Vec<f64>> = (0..spec.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(spec.seed, path);
            let mut v = spec.v0;
            let mut out = Vec::with_capacity(steps.len());
            for &n in &steps {
                for _ in 0..n {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v = drift * v + noise * z;
                }
                out.push(v);
            }
            out
        })
        .collect();
    Ok((reached, samples))
}

/// Ensemble moments at each checkpoint time, for paths started at v0.
pub fn ou_trajectories(spec: &OuSpec, checkpoints: &[f64]) -> Result<Vec<OuEnsemble>> {
    let (times, samples) = ou_path_samples(spec, checkpoints)?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let vs: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            let mean = McEstimate::from_values(&vs);
            let n = vs.len() as f64;
            let variance = vs.iter().map(|v| (v - mean.mean).powi(2)).sum::<f64>() / (n - 1.0);
            let (am, av) = ou_moments(spec.v0, 0.0, spec.xi, spec.mass, spec.temperature.max(0.0), t);
            OuEnsemble {
                t,
                mean,
                variance,
                variance_std_error: variance * (2.0 / (n - 1.0)).sqrt(),
                analytic_mean: am,
                analytic_variance: av,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scheme: OuScheme) -> OuSpec {
        OuSpec {
            xi: 1.0,
            mass: 1e-22,
            temperature: 300.0,
            v0: 3.0 * (CGS.k_b * 300.0 / 1e-22f64).sqrt(),
            n_paths: 20_000,
            t_final: 5.0,
            dt: 0.01,
            seed: 11,
            scheme,
        }
    }

    #[test]
    fn moments_within_three_sigma() {
        for scheme in [OuScheme::EulerMaruyama, OuScheme::Exact] {
            for e in ou_trajectories(&spec(scheme), &[0.5, 2.0, 8.0]).unwrap() {
                assert!(e.mean_z() < 3.0, "{scheme:?} t={} mean z {}", e.t, e.mean_z());
                assert!(e.variance_z() < 3.0, "{scheme:?} t={} var z {}", e.t, e.variance_z());
            }
        }
    }

    #[test]
    fn zero_temperature_is_deterministic() {
        let mut s = spec(OuScheme::Exact);
        s.temperature = 0.0;
        s.n_paths = 4;
        let e = ou_trajectories(&s, &[1.0]).unwrap()[0];
        assert_eq!(e.variance, 0.0);
        assert!((e.mean.mean - s.v0 * (-1.0f64).exp()).abs() < 1e-12 * s.v0);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let mut s = spec(OuScheme::EulerMaruyama);
        s.n_paths = 500;
        let a = ou_trajectories(&s, &[1.0]).unwrap();
        let b = ou_trajectories(&s, &[1.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn large_step_rejected() {
        let mut s = spec(OuScheme::EulerMaruyama);
        s.dt = 0.05;
        assert!(ou_trajectories(&s, &[1.0]).is_err());
    }
}
