//! Monte Carlo checks.
//!
//! Every random stream is a ChaCha8 generator keyed by (seed, stream index),
//! so work split over threads gives bit-identical results for a given seed.
//! Reductions run in stream order after a parallel map.

mod fields;
mod kicks;
mod ou;

pub use fields::{
    gaussian_independence_control, gaussian_independence_test, FieldSampleSpec, IndependenceReport,
};
pub use kicks::{
    recoil_second_moment, simulate_kicks, KickProcessSpec, KickResult, RecoilSampling,
};
pub use ou::{ou_path_samples, ou_trajectories, OuEnsemble, OuScheme, OuSpec};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    pub(crate) fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_error: (var / n).sqrt(),
            samples: values.len() as u64,
        }
    }

    /// |mean - target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.std_error
        }
    }
}
