//! Deterministic seeded measurement noise.
//!
//! Noise is sampled once per integration step and held for the whole step
//! (zero-order hold), modeling sensor noise rather than process noise. The
//! stream is fully determined by its 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Which measured signal the noise corrupts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    /// Plant performance output `y`.
    OutputY,
    /// Longitudinal acceleration measurement (braking scenarios).
    AccelerationVdot,
    /// No injection.
    None,
}

/// Gaussian measurement-noise specification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Standard deviation, in the units of the targeted signal.
    pub sigma: f64,
    pub seed: u64,
    pub target: NoiseTarget,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { sigma: 0.0, seed: 0, target: NoiseTarget::None }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::config(format!("noise.sigma: must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Stream seeded from this spec alone.
    pub fn stream(&self) -> NoiseStream {
        self.stream_with_seed(self.seed)
    }

    /// Stream with an externally combined seed (scenario ⊕ spec).
    pub fn stream_with_seed(&self, seed: u64) -> NoiseStream {
        let active = self.sigma > 0.0 && self.target != NoiseTarget::None;
        NoiseStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            normal: active.then(|| {
                Normal::new(0.0, self.sigma).expect("sigma validated non-negative")
            }),
        }
    }
}

/// Seeded Gaussian sample stream; yields exactly zero when inactive.
pub struct NoiseStream {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl NoiseStream {
    pub fn next_sample(&mut self) -> f64 {
        match &self.normal {
            Some(normal) => normal.sample(&mut self.rng),
            None => 0.0,
        }
    }
}
