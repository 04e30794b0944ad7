//! Independence of E_z and dE_z/dx for an isotropic Gaussian field.
//!
//! Each sample is a fresh field: a sum over modes with isotropic wave
//! vectors, transverse polarizations and uniform random phases, evaluated
//! at the origin.

use super::stream_rng;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSampleSpec {
    pub mode_count: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl FieldSampleSpec {
    fn validate(&self) -> Result<()> {
        if self.mode_count < 100 {
            return Err(Error::domain("mode_count must be at least 100 for isotropy"));
        }
        if self.sample_count < 10_000 {
            return Err(Error::domain("sample_count must be at least 1e4"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub samples: usize,
    pub correlation: f64,
    /// 3 / sqrt(samples).
    pub correlation_bound: f64,
    /// Grid of (xi, eta) in units of the sample standard deviations.
    pub grid: Vec<(f64, f64)>,
    /// |C_XY - C_X C_Y| at each grid point.
    pub cf_deviation: Vec<f64>,
    /// 5 / sqrt(samples).
    pub cf_bound: f64,
    pub correlation_ok: bool,
    pub factorization_ok: bool,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.correlation_ok && self.factorization_ok
    }

    pub fn max_cf_deviation(&self) -> f64 {
        self.cf_deviation.iter().copied().fold(0.0, f64::max)
    }
}

/// Unit vector uniform on the sphere.
fn isotropic(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let mu = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - mu * mu).sqrt();
    [s * phi.cos(), s * phi.sin(), mu]
}

/// (E_z, dE_z/dx) at the origin for one random field with unit wavenumber.
fn field_sample(modes: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (mut x, mut y) = (0.0, 0.0);
    for _ in 0..modes {
        let k = isotropic(rng);
        // Transverse polarization: a random unit vector projected off k.
        let r = isotropic(rng);
        let dot = r[0] * k[0] + r[1] * k[1] + r[2] * k[2];
        let e = [r[0] - dot * k[0], r[1] - dot * k[1], r[2] - dot * k[2]];
        let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        let ez = if norm > 0.0 { e[2] / norm } else { 0.0 };
        let phase = 2.0 * PI * rng.random::<f64>();
        // E = Re(e^{i(k.x + phase)}) e_z; d/dx brings down -k_x sin.
        x += ez * phase.cos();
        y -= k[0] * ez * phase.sin();
    }
    (x, y)
}

fn analyse(pairs: &[(f64, f64)]) -> IndependenceReport {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
    let syy = pairs.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
    let sxy = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    let correlation = sxy / (sxx * syy).sqrt();
    let (sx, sy) = (sxx.sqrt(), syy.sqrt());

    let levels = [-1.0, -0.5, 0.5, 1.0];
    let mut grid = Vec::new();
    let mut cf_deviation = Vec::new();
    let cf = |a: f64, b: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for &(x, y) in pairs {
            let z = a * x / sx + b * y / sy;
            re += z.cos();
            im += z.sin();
        }
        (re / n, im / n)
    };
    for &a in &levels {
        for &b in &levels {
            let joint = cf(a, b);
            let cx = cf(a, 0.0);
            let cy = cf(0.0, b);
            let prod = (cx.0 * cy.0 - cx.1 * cy.1, cx.0 * cy.1 + cx.1 * cy.0);
            grid.push((a, b));
            cf_deviation.push(((joint.0 - prod.0).powi(2) + (joint.1 - prod.1).powi(2)).sqrt());
        }
    }
    let correlation_bound = 3.0 / n.sqrt();
    let cf_bound = 5.0 / n.sqrt();
    IndependenceReport {
        samples: pairs.len(),
        correlation,
        correlation_bound,
        correlation_ok: correlation.abs() <= correlation_bound,
        factorization_ok: cf_deviation.iter().all(|&d| d <= cf_bound),
        grid,
        cf_deviation,
        cf_bound,
    }
}

fn sample_pairs(spec: &FieldSampleSpec) -> Vec<(f64, f64)> {
    (0..spec.sample_count as u64)
        .into_par_iter()
        .map(|i| field_sample(spec.mode_count, &mut stream_rng(spec.seed, i)))
        .collect()
}

/// Correlation and characteristic-function factorization of (E_z, dE_z/dx).
pub fn gaussian_independence_test(spec: &FieldSampleSpec) -> Result<IndependenceReport> {
    spec.validate()?;
    Ok(analyse(&sample_pairs(spec)))
}

/// The same test with Y replaced by X, which must fail.
pub fn gaussian_independence_control(spec: &FieldSampleSpec) -> Result<IndependenceReport> {
    spec.validate()?;
    let pairs: Vec<(f64, f64)> = sample_pairs(spec).iter().map(|p| (p.0, p.0)).collect();
    Ok(analyse(&pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_components_are_independent() {
        let spec = FieldSampleSpec {
            mode_count: 100,
            sample_count: 10_000,
            seed: 5,
        };
        let r = gaussian_independence_test(&spec).unwrap();
        assert!(r.passed(), "{r:?}");
        let c = gaussian_independence_control(&spec).unwrap();
        assert!(!c.factorization_ok);
        assert!(!c.correlation_ok);
    }

    #[test]
    fn small_specs_rejected() {
        let spec = FieldSampleSpec {
            mode_count: 10,
            sample_count: 10_000,
            seed: 0,
        };
        assert!(gaussian_independence_test(&spec).is_err());
    }
}
