//! Extremum seeking with recursive-least-squares gradient estimation.
//!
//! This crate implements two model-free extremum seeking (ES) schemes for
//! steering a plant input toward the maximizer of a measured performance
//! output:
//!
//! * an RLS-based scheme, in which the output sensitivity `∂y/∂θ` is
//!   estimated online by a continuous-time recursive least squares
//!   estimator with exponential forgetting ([`rls`]), driven by filtered
//!   regressor signals that require no differentiation of the measured
//!   output ([`filters`]); and
//! * the classical perturbation baseline, which demodulates a sinusoidal
//!   probing signal to recover the same gradient ([`classic`]).
//!
//! Both schemes close the loop through `θ̇ = k ĥ` and are exercised against
//! three benchmark plants ([`plants`]): a scalar concave friction-style map,
//! a two-channel rational map, and a single-wheel braking model whose slip
//! reference is tuned to maximize deceleration.
//!
//! The [`engine`] module composes plant, filters, estimator and control law
//! into one fixed-step RK4 integration, with deterministic seeded
//! measurement noise, CSV trajectory export, an independent brute-force
//! oracle for the true extrema, and convergence metrics.
//!
//! ```
//! use rls_es::engine::{oracle_extremum, run_scenario, PlantConfig};
//!
//! let plant = PlantConfig::ScalarMap { k1: 1.05, k2: 23.0, k3: 0.52, gain: 10.0 };
//! let peak = oracle_extremum(&plant).unwrap();
//! assert!((peak.theta_star[0] - 0.16688).abs() < 1e-3);
//! ```

pub mod classic;
pub mod dither;
pub mod engine;
pub mod filters;
pub mod grid;
pub mod noise;
pub mod param;
pub mod plants;
pub mod presets;
pub mod rls;

pub use classic::ClassicEs;
pub use dither::{DemodSpec, DitherSpec};
pub use filters::{direct_regressors, RegressorFilter};
pub use grid::TimeGrid;
pub use noise::{NoiseSpec, NoiseStream, NoiseTarget};
pub use param::ParamVec;
pub use rls::Rls;

/// Errors from configuration validation and numerical failures.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A configuration value violates an invariant; the message names the
    /// offending field.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A signal fed to a step function was NaN or infinite.
    #[error("non-finite {0}")]
    NonFinite(&'static str),

    /// Demodulation is undefined when a dither amplitude is zero.
    #[error("demodulation undefined: dither amplitude {0} is zero")]
    ZeroDitherAmplitude(usize),

    /// A covariance entry exceeded the configured ceiling, which indicates
    /// loss of excitation under forgetting.
    #[error("covariance diverged: an entry exceeds the bound {bound:e}")]
    CovarianceDiverged { bound: f64 },

    /// The covariance lost symmetry or positive definiteness.
    #[error("covariance is no longer positive definite")]
    CovarianceNotPd,

    /// Grid search found several well-separated near-optimal maxima.
    #[error("map does not look concave: {candidates} separated near-optimal maxima")]
    NonConcave { candidates: usize },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

/// Validates that every entry of `values` is finite, naming `what` on failure.
pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<(), Error> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
