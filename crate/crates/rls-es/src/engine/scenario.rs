//! Scenario description: plant, scheme, grid, gains and initial conditions.

use serde::{Deserialize, Serialize};

use crate::noise::NoiseTarget;
use crate::plants::{AbsWheelPlant, ScalarFrictionMap, VectorRationalMap};
use crate::{DitherSpec, Error, NoiseSpec, ParamVec, TimeGrid};

/// Which estimator closes the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rls,
    Classic,
}

/// Plant selection plus its constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantConfig {
    /// Scalar concave map `y = gain (k1 (1 − e^{−k2 θ}) − k3 θ)`.
    ScalarMap { k1: f64, k2: f64, k3: f64, gain: f64 },
    /// Two-channel rational map parametrized by its per-channel peaks.
    VectorMap { peak_inputs: [f64; 2], peak_outputs: [f64; 2] },
    /// Single-wheel braking; the tuned parameter is the slip reference.
    AbsBraking {
        mass: f64,
        radius: f64,
        inertia: f64,
        bearing: f64,
        /// Normal load; defaults to `mass · 9.81`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<f64>,
        mu_max: f64,
        lambda_star: f64,
        v0: f64,
        /// Initial wheel rate; defaults to free rolling `v0 / radius`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega0: Option<f64>,
        #[serde(default = "default_v_stop")]
        v_stop: f64,
        #[serde(default = "default_tau_max")]
        tau_max: f64,
        #[serde(default = "default_slip_gain")]
        slip_gain: f64,
    },
}

fn default_v_stop() -> f64 {
    0.5
}

fn default_tau_max() -> f64 {
    4000.0
}

fn default_slip_gain() -> f64 {
    50.0
}

impl PlantConfig {
    /// Dimension of the tuned parameter vector.
    pub fn dim(&self) -> usize {
        match self {
            PlantConfig::ScalarMap { .. } | PlantConfig::AbsBraking { .. } => 1,
            PlantConfig::VectorMap { .. } => 2,
        }
    }

    pub fn is_braking(&self) -> bool {
        matches!(self, PlantConfig::AbsBraking { .. })
    }

    pub(crate) fn scalar_map(&self) -> Option<ScalarFrictionMap> {
        match self {
            PlantConfig::ScalarMap { k1, k2, k3, gain } => {
                Some(ScalarFrictionMap { k1: *k1, k2: *k2, k3: *k3, gain: *gain })
            }
            _ => None,
        }
    }

    pub(crate) fn vector_map(&self) -> Option<VectorRationalMap> {
        match self {
            PlantConfig::VectorMap { peak_inputs, peak_outputs } => {
                Some(VectorRationalMap { peak_inputs: *peak_inputs, peak_outputs: *peak_outputs })
            }
            _ => None,
        }
    }

    /// Wheel-plant view of a braking config (available for tools/tests).
    pub fn wheel_plant_for_tuning(&self) -> AbsWheelPlant {
        self.wheel_plant().expect("braking plant config")
    }

    pub(crate) fn wheel_plant(&self) -> Option<AbsWheelPlant> {
        match self {
            PlantConfig::AbsBraking {
                mass,
                radius,
                inertia,
                bearing,
                weight,
                mu_max,
                lambda_star,
                v_stop,
                tau_max,
                slip_gain,
                ..
            } => Some(AbsWheelPlant {
                mass: *mass,
                radius: *radius,
                inertia: *inertia,
                bearing: *bearing,
                weight: weight.unwrap_or(mass * crate::plants::GRAVITY),
                mu_max: *mu_max,
                lambda_star: *lambda_star,
                v_stop: *v_stop,
                tau_max: *tau_max,
                slip_gain: *slip_gain,
            }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if let Some(map) = self.scalar_map() {
            ScalarFrictionMap::new(map.k1, map.k2, map.k3, map.gain)?;
        }
        if let Some(map) = self.vector_map() {
            VectorRationalMap::new(map.peak_inputs, map.peak_outputs)?;
        }
        if let PlantConfig::AbsBraking { v0, omega0, .. } = self {
            let plant = self.wheel_plant().expect("matched above");
            plant.validate()?;
            if !v0.is_finite() || *v0 <= plant.v_stop {
                return Err(Error::config(format!(
                    "abs.v0: must exceed v_stop {}, got {v0}",
                    plant.v_stop
                )));
            }
            if let Some(w0) = omega0 {
                if !w0.is_finite() || *w0 < 0.0 {
                    return Err(Error::config("abs.omega0: must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Estimator and filter gains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    /// Adaptation gain per channel, `θ̂̇ = k ∘ gradient estimate`.
    pub k: Vec<f64>,
    /// Forgetting factor β, 1/s (RLS scheme).
    pub beta: f64,
    /// Initial covariance scale, `P(0) = p0 I` (RLS scheme).
    pub p0: f64,
    /// Covariance ceiling; exceeding any entry aborts with a divergence
    /// error rather than clamping.
    #[serde(default = "default_p_max")]
    pub p_max: f64,
    /// Regressor/demodulation filter pole(s). The RLS scheme uses a single
    /// shared pole; the baseline accepts one per channel.
    pub omega_l: Vec<f64>,
    /// Output low-pass gain(s) of the baseline.
    pub omega_h: Vec<f64>,
}

fn default_p_max() -> f64 {
    crate::rls::DEFAULT_COVARIANCE_BOUND
}

/// Optional overrides for internal filter initial states.
///
/// All filter states default to zero; scenarios may override them, e.g. to
/// start the washout pre-settled at the initial output level.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi0: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub washout0: Option<f64>,
    /// Baseline low-pass output state; pre-settling it at the initial
    /// objective level models switching the seeker on mid-operation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
}

/// Complete description of one deterministic closed-loop experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub plant: PlantConfig,
    pub scheme: Scheme,
    pub grid: TimeGrid,
    pub dither: DitherSpec,
    pub noise: NoiseSpec,
    pub gains: Gains,
    pub theta0: ParamVec,
    #[serde(default)]
    pub init: InitOverrides,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.plant.dim();
        self.plant.validate()?;
        self.grid.validate()?;
        self.dither.validate()?;
        self.noise.validate()?;

        if self.theta0.dim() != n {
            return Err(Error::config(format!(
                "theta0: expected {n} entries for this plant, got {}",
                self.theta0.dim()
            )));
        }
        if self.dither.dim() != n {
            return Err(Error::config(format!(
                "dither: expected {n} channels, got {}",
                self.dither.dim()
            )));
        }
        if self.gains.k.len() != n {
            return Err(Error::config(format!(
                "gains.k: expected {n} entries, got {}",
                self.gains.k.len()
            )));
        }
        crate::ensure_finite(&self.gains.k, "gains.k")?;
        if !self.gains.beta.is_finite() || self.gains.beta < 0.0 {
            return Err(Error::config(format!("gains.beta: must be >= 0, got {}", self.gains.beta)));
        }
        if !self.gains.p0.is_finite() || self.gains.p0 <= 0.0 {
            return Err(Error::config(format!("gains.p0: must be > 0, got {}", self.gains.p0)));
        }
        if !self.gains.p_max.is_finite() || self.gains.p_max <= 0.0 {
            return Err(Error::config(format!(
                "gains.p_max: must be > 0, got {}",
                self.gains.p_max
            )));
        }
        if self.gains.omega_l.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::config("gains.omega_l: entries must be > 0"));
        }
        if self.gains.omega_h.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::config("gains.omega_h: entries must be > 0"));
        }

        match self.scheme {
            Scheme::Rls => {
                if self.gains.omega_l.len() != 1 {
                    return Err(Error::config(
                        "gains.omega_l: the rls scheme shares one filter pole across channels",
                    ));
                }
            }
            Scheme::Classic => {
                if !self.dither.enabled() {
                    return Err(Error::config(
                        "scheme=classic requires an enabled dither (probing signal)",
                    ));
                }
                if self.gains.omega_l.len() != n || self.gains.omega_h.len() != n {
                    return Err(Error::config(format!(
                        "gains.omega_l/omega_h: the classic scheme needs {n} entries each"
                    )));
                }
                // demodulation must be well defined at construction time
                self.dither.demod_value(0.0)?;
            }
        }

        if let Some(phi0) = &self.init.phi0 {
            if phi0.len() != n {
                return Err(Error::config(format!(
                    "init.phi0: expected {n} entries, got {}",
                    phi0.len()
                )));
            }
            crate::ensure_finite(phi0, "init.phi0")?;
        }
        if let Some(w0) = self.init.washout0 {
            if !w0.is_finite() {
                return Err(Error::NonFinite("init.washout0"));
            }
        }
        if let Some(e0) = self.init.eta0 {
            if !e0.is_finite() {
                return Err(Error::NonFinite("init.eta0"));
            }
        }

        let noise_ok = match (&self.plant, self.noise.target) {
            (_, NoiseTarget::None) => true,
            (PlantConfig::AbsBraking { .. }, NoiseTarget::AccelerationVdot) => true,
            (PlantConfig::AbsBraking { .. }, NoiseTarget::OutputY) => false,
            (_, NoiseTarget::OutputY) => true,
            (_, NoiseTarget::AccelerationVdot) => false,
        };
        if !noise_ok {
            return Err(Error::config(
                "noise.target: static maps take output_y, braking takes acceleration_vdot",
            ));
        }
        Ok(())
    }

    /// Effective seed for the measurement noise stream: the scenario seed
    /// combined with the noise spec's own seed.
    pub fn noise_seed(&self) -> u64 {
        self.seed ^ self.noise.seed
    }
}
