//! Closed-loop execution: plant, regressor filters, estimator and control
//! law advanced together by one fixed-step RK4 integrator.
//!
//! Measurement noise is sampled once per grid step and held across the
//! step's RK4 stages (zero-order hold). Runs are bit-deterministic given
//! the scenario, including its seed.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::record::{EventKind, RunEvent, RunRecord};
use super::scenario::{PlantConfig, Scenario, Scheme};
use crate::classic::ClassicEs;
use crate::filters;
use crate::plants::{AbsWheelPlant, ScalarFrictionMap, VectorRationalMap, WheelState};
use crate::rls::{check_covariance, symmetrize, Rls};
use crate::{Error, NoiseTarget};

/// A run that aborted mid-flight; the partial record is preserved.
#[derive(Debug)]
pub struct RunError {
    pub time: f64,
    pub source: Error,
    pub record: Box<RunRecord>,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run failed at t = {} s: {}", self.time, self.source)
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Executes a scenario to completion (or a terminal event) and returns the
/// sampled trajectory.
pub fn run_scenario(scenario: &Scenario) -> Result<RunRecord, RunError> {
    scenario.validate().map_err(|source| RunError {
        time: scenario.grid.t0,
        source,
        record: Box::new(RunRecord::with_capacity(
            scenario.plant.dim(),
            scenario.scheme,
            0,
            scenario.plant.is_braking(),
        )),
    })?;
    match scenario.scheme {
        Scheme::Rls => RlsLoop::new(scenario).run(),
        Scheme::Classic => ClassicLoop::new(scenario).run(),
    }
}

// ---------------------------------------------------------------------------
// Plant binding
// ---------------------------------------------------------------------------

enum Plant {
    Scalar(ScalarFrictionMap),
    Vector(VectorRationalMap),
    Braking(AbsWheelPlant),
}

struct Observation {
    /// Clean measured objective: map output, or `v̇` when braking.
    y: f64,
    wheel_rates: Option<(f64, f64)>,
}

impl Plant {
    fn from_config(config: &PlantConfig) -> Plant {
        if let Some(map) = config.scalar_map() {
            Plant::Scalar(map)
        } else if let Some(map) = config.vector_map() {
            Plant::Vector(map)
        } else {
            Plant::Braking(config.wheel_plant().expect("exhaustive plant match"))
        }
    }

    fn observe(&self, theta: &DVector<f64>, wheel: &Option<WheelState>) -> Observation {
        match self {
            Plant::Scalar(map) => Observation { y: map.eval(theta[0]), wheel_rates: None },
            Plant::Vector(map) => {
                Observation { y: map.eval(theta.as_slice()), wheel_rates: None }
            }
            Plant::Braking(plant) => {
                let state = wheel.as_ref().expect("braking runs carry a wheel state");
                let tau = plant.tracking_torque(theta[0], state);
                let (v_dot, omega_dot) = plant.rates(state, tau);
                Observation { y: v_dot, wheel_rates: Some((v_dot, omega_dot)) }
            }
        }
    }

    fn braking(&self) -> Option<&AbsWheelPlant> {
        match self {
            Plant::Braking(p) => Some(p),
            _ => None,
        }
    }
}

fn initial_wheel(config: &PlantConfig) -> Option<WheelState> {
    match config {
        PlantConfig::AbsBraking { v0, omega0, radius, .. } => {
            Some(WheelState { v: *v0, omega: omega0.unwrap_or(v0 / radius) })
        }
        _ => None,
    }
}

fn wheel_advanced(state: &Option<WheelState>, rates: &Option<(f64, f64)>, c: f64) -> Option<WheelState> {
    match (state, rates) {
        (Some(s), Some((dv, dw))) => Some(WheelState { v: s.v + c * dv, omega: s.omega + c * dw }),
        (Some(s), None) => Some(*s),
        _ => None,
    }
}

fn wheel_rk4(
    state: &Option<WheelState>,
    k: [&Option<(f64, f64)>; 4],
    dt: f64,
) -> Option<WheelState> {
    match (state, k[0], k[1], k[2], k[3]) {
        (Some(s), Some(d1), Some(d2), Some(d3), Some(d4)) => Some(WheelState {
            v: s.v + dt / 6.0 * (d1.0 + 2.0 * d2.0 + 2.0 * d3.0 + d4.0),
            omega: s.omega + dt / 6.0 * (d1.1 + 2.0 * d2.1 + 2.0 * d3.1 + d4.1),
        }),
        _ => None,
    }
}

/// Appends the wheel columns for the current sample, if this is a braking run.
fn push_wheel_sample(record: &mut RunRecord, plant: &Plant, wheel: &Option<WheelState>, theta0: f64) {
    if let (Some(series), Some(state)) = (record.wheel.as_mut(), wheel.as_ref()) {
        let plant = plant.braking().expect("wheel series implies braking plant");
        series.v.push(state.v);
        series.omega.push(state.omega);
        series.slip.push(plant.slip(state));
        series.torque.push(plant.tracking_torque(theta0, state));
    }
}

/// Clamps wheel lock-up (with a one-shot event) and reports the stop time
/// when the speed threshold is reached.
fn wheel_post_checks(
    wheel: &mut Option<WheelState>,
    plant: &Plant,
    t: f64,
    record: &mut RunRecord,
    clamp_logged: &mut bool,
) -> Option<f64> {
    let state = wheel.as_mut()?;
    let plant = plant.braking()?;
    if state.omega < 0.0 {
        state.omega = 0.0;
        if !*clamp_logged {
            record.events.push(RunEvent { time: t, kind: EventKind::WheelSpinClamped });
            *clamp_logged = true;
        }
    }
    if state.v <= plant.v_stop {
        record.events.push(RunEvent { time: t, kind: EventKind::VehicleStopped });
        return Some(t);
    }
    None
}

// ---------------------------------------------------------------------------
// RLS scheme
// ---------------------------------------------------------------------------

struct RlsState {
    theta_hat: DVector<f64>,
    washout: f64,
    phi: DVector<f64>,
    grad: DVector<f64>,
    cov: DMatrix<f64>,
    wheel: Option<WheelState>,
}

struct RlsRates {
    theta_hat: DVector<f64>,
    washout: f64,
    phi: DVector<f64>,
    grad: DVector<f64>,
    cov: DMatrix<f64>,
    wheel: Option<(f64, f64)>,
}

impl RlsState {
    fn advanced(&self, d: &RlsRates, c: f64) -> RlsState {
        RlsState {
            theta_hat: &self.theta_hat + &d.theta_hat * c,
            washout: self.washout + c * d.washout,
            phi: &self.phi + &d.phi * c,
            grad: &self.grad + &d.grad * c,
            cov: &self.cov + &d.cov * c,
            wheel: wheel_advanced(&self.wheel, &d.wheel, c),
        }
    }

    fn rk4(&self, k: [&RlsRates; 4], dt: f64) -> RlsState {
        RlsState {
            theta_hat: &self.theta_hat
                + (&k[0].theta_hat + &k[1].theta_hat * 2.0 + &k[2].theta_hat * 2.0
                    + &k[3].theta_hat)
                    * (dt / 6.0),
            washout: self.washout
                + dt / 6.0
                    * (k[0].washout + 2.0 * k[1].washout + 2.0 * k[2].washout + k[3].washout),
            phi: &self.phi
                + (&k[0].phi + &k[1].phi * 2.0 + &k[2].phi * 2.0 + &k[3].phi) * (dt / 6.0),
            grad: &self.grad
                + (&k[0].grad + &k[1].grad * 2.0 + &k[2].grad * 2.0 + &k[3].grad) * (dt / 6.0),
            cov: &self.cov
                + (&k[0].cov + &k[1].cov * 2.0 + &k[2].cov * 2.0 + &k[3].cov) * (dt / 6.0),
            wheel: wheel_rk4(&self.wheel, [&k[0].wheel, &k[1].wheel, &k[2].wheel, &k[3].wheel], dt),
        }
    }
}

struct RlsLoop<'a> {
    scenario: &'a Scenario,
    plant: Plant,
    gain: DVector<f64>,
    pole: f64,
    noise_on_y: bool,
}

impl<'a> RlsLoop<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        RlsLoop {
            scenario,
            plant: Plant::from_config(&scenario.plant),
            gain: DVector::from_row_slice(&scenario.gains.k),
            pole: scenario.gains.omega_l[0],
            noise_on_y: scenario.noise.target != NoiseTarget::None,
        }
    }

    fn field(&self, t: f64, s: &RlsState, held_noise: f64) -> RlsRates {
        let dither = &self.scenario.dither;
        let theta = &s.theta_hat + dither.value(t).as_vector();
        let obs = self.plant.observe(&theta, &s.wheel);
        let y_meas = obs.y + if self.noise_on_y { held_noise } else { 0.0 };
        let theta_dot_cmd = self.gain.component_mul(&s.grad) + dither.rate(t).as_vector();
        let z = filters::washout_output(self.pole, s.washout, y_meas);
        let est = Rls::rates(&s.grad, &s.cov, self.scenario.gains.beta, z, &s.phi);
        RlsRates {
            theta_hat: self.gain.component_mul(&s.grad),
            washout: filters::washout_rate(self.pole, s.washout, y_meas),
            phi: s.phi.zip_map(&theta_dot_cmd, |p, rate| filters::phi_rate(self.pole, p, rate)),
            grad: est.grad,
            cov: est.covariance,
            wheel: obs.wheel_rates,
        }
    }

    fn push_sample(&self, record: &mut RunRecord, t: f64, s: &RlsState, held_noise: f64) {
        let dither = &self.scenario.dither;
        let theta = &s.theta_hat + dither.value(t).as_vector();
        let obs = self.plant.observe(&theta, &s.wheel);
        let y_noisy = obs.y + if self.noise_on_y { held_noise } else { 0.0 };
        record.t.push(t);
        record.theta.push(theta.as_slice().to_vec());
        record.theta_hat.push(s.theta_hat.as_slice().to_vec());
        record.y_clean.push(obs.y);
        record.y_noisy.push(y_noisy);
        record.z.push(filters::washout_output(self.pole, s.washout, y_noisy));
        record.phi.push(s.phi.as_slice().to_vec());
        record.grad.push(s.grad.as_slice().to_vec());
        record.p_trace.push(s.cov.trace());
        push_wheel_sample(record, &self.plant, &s.wheel, theta[0]);
    }

    fn run(self) -> Result<RunRecord, RunError> {
        let scenario = self.scenario;
        let n = scenario.plant.dim();
        let grid = scenario.grid;
        let steps = grid.steps();
        let mut noise = scenario.noise.stream_with_seed(scenario.noise_seed());

        let mut state = RlsState {
            theta_hat: scenario.theta0.as_vector().clone(),
            washout: scenario.init.washout0.unwrap_or(0.0),
            phi: match &scenario.init.phi0 {
                Some(p) => DVector::from_row_slice(p),
                None => DVector::zeros(n),
            },
            grad: DVector::zeros(n),
            cov: DMatrix::identity(n, n) * scenario.gains.p0,
            wheel: initial_wheel(&scenario.plant),
        };

        let mut record =
            RunRecord::with_capacity(n, Scheme::Rls, steps + 1, scenario.plant.is_braking());
        let mut clamp_logged = false;

        for i in 0..=steps {
            let t = grid.time_at(i);
            let held_noise = noise.next_sample();
            self.push_sample(&mut record, t, &state, held_noise);
            if i == steps {
                break;
            }

            let dt = grid.dt;
            let k1 = self.field(t, &state, held_noise);
            let k2 = self.field(t + dt / 2.0, &state.advanced(&k1, dt / 2.0), held_noise);
            let k3 = self.field(t + dt / 2.0, &state.advanced(&k2, dt / 2.0), held_noise);
            let k4 = self.field(t + dt, &state.advanced(&k3, dt), held_noise);
            state = state.rk4([&k1, &k2, &k3, &k4], dt);

            let t_next = grid.time_at(i + 1);
            symmetrize(&mut state.cov);
            if let Err(source) = self.post_checks(&state) {
                return Err(RunError { time: t_next, source, record: Box::new(record) });
            }
            if let Some(stopped) = wheel_post_checks(
                &mut state.wheel,
                &self.plant,
                t_next,
                &mut record,
                &mut clamp_logged,
            ) {
                self.push_sample(&mut record, t_next, &state, held_noise);
                record.stopped_at = Some(stopped);
                break;
            }
        }
        Ok(record)
    }

    fn post_checks(&self, state: &RlsState) -> Result<(), Error> {
        crate::ensure_finite(state.theta_hat.as_slice(), "theta_hat")?;
        if !state.washout.is_finite() {
            return Err(Error::NonFinite("washout state"));
        }
        crate::ensure_finite(state.phi.as_slice(), "phi")?;
        crate::ensure_finite(state.grad.as_slice(), "gradient estimate")?;
        check_covariance(&state.cov, self.scenario.gains.p_max)
    }
}

// ---------------------------------------------------------------------------
// Classic scheme
// ---------------------------------------------------------------------------

struct ClassicState {
    theta_hat: DVector<f64>,
    grad_est: DVector<f64>,
    lowpass: f64,
    wheel: Option<WheelState>,
}

struct ClassicRates {
    theta_hat: DVector<f64>,
    grad_est: DVector<f64>,
    lowpass: f64,
    wheel: Option<(f64, f64)>,
}

impl ClassicState {
    fn advanced(&self, d: &ClassicRates, c: f64) -> ClassicState {
        ClassicState {
            theta_hat: &self.theta_hat + &d.theta_hat * c,
            grad_est: &self.grad_est + &d.grad_est * c,
            lowpass: self.lowpass + c * d.lowpass,
            wheel: wheel_advanced(&self.wheel, &d.wheel, c),
        }
    }

    fn rk4(&self, k: [&ClassicRates; 4], dt: f64) -> ClassicState {
        ClassicState {
            theta_hat: &self.theta_hat
                + (&k[0].theta_hat + &k[1].theta_hat * 2.0 + &k[2].theta_hat * 2.0
                    + &k[3].theta_hat)
                    * (dt / 6.0),
            grad_est: &self.grad_est
                + (&k[0].grad_est + &k[1].grad_est * 2.0 + &k[2].grad_est * 2.0 + &k[3].grad_est)
                    * (dt / 6.0),
            lowpass: self.lowpass
                + dt / 6.0
                    * (k[0].lowpass + 2.0 * k[1].lowpass + 2.0 * k[2].lowpass + k[3].lowpass),
            wheel: wheel_rk4(&self.wheel, [&k[0].wheel, &k[1].wheel, &k[2].wheel, &k[3].wheel], dt),
        }
    }
}

struct ClassicLoop<'a> {
    scenario: &'a Scenario,
    plant: Plant,
    es: ClassicEs,
    noise_on_y: bool,
}

impl<'a> ClassicLoop<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let es = ClassicEs::new(
            scenario.theta0.as_slice(),
            &scenario.gains.k,
            &scenario.gains.omega_h,
            &scenario.gains.omega_l,
        )
        .expect("scenario validated");
        ClassicLoop {
            scenario,
            plant: Plant::from_config(&scenario.plant),
            es,
            noise_on_y: scenario.noise.target != NoiseTarget::None,
        }
    }

    fn field(&self, t: f64, s: &ClassicState, held_noise: f64) -> ClassicRates {
        let dither = &self.scenario.dither;
        let theta = &s.theta_hat + dither.value(t).as_vector();
        let obs = self.plant.observe(&theta, &s.wheel);
        let y_meas = obs.y + if self.noise_on_y { held_noise } else { 0.0 };
        let demod = dither.demod_value(t).expect("validated demodulable");
        let rates = self.es.rates(&s.theta_hat, &s.grad_est, s.lowpass, y_meas, &demod);
        ClassicRates {
            theta_hat: rates.theta_hat,
            grad_est: rates.grad_est,
            lowpass: rates.output_lowpass,
            wheel: obs.wheel_rates,
        }
    }

    fn push_sample(&self, record: &mut RunRecord, t: f64, s: &ClassicState, held_noise: f64) {
        let dither = &self.scenario.dither;
        let theta = &s.theta_hat + dither.value(t).as_vector();
        let obs = self.plant.observe(&theta, &s.wheel);
        let y_noisy = obs.y + if self.noise_on_y { held_noise } else { 0.0 };
        let demod = dither.demod_value(t).expect("validated demodulable");
        let err = y_noisy - s.lowpass;
        record.t.push(t);
        record.theta.push(theta.as_slice().to_vec());
        record.theta_hat.push(s.theta_hat.as_slice().to_vec());
        record.y_clean.push(obs.y);
        record.y_noisy.push(y_noisy);
        record.z.push(err);
        record.phi.push(demod.iter().map(|m| m * err).collect());
        record.grad.push(s.grad_est.as_slice().to_vec());
        record.p_trace.push(0.0);
        push_wheel_sample(record, &self.plant, &s.wheel, theta[0]);
    }

    fn run(self) -> Result<RunRecord, RunError> {
        let scenario = self.scenario;
        let n = scenario.plant.dim();
        let grid = scenario.grid;
        let steps = grid.steps();
        let mut noise = scenario.noise.stream_with_seed(scenario.noise_seed());

        let mut state = ClassicState {
            theta_hat: scenario.theta0.as_vector().clone(),
            grad_est: DVector::zeros(n),
            lowpass: scenario.init.eta0.unwrap_or(0.0),
            wheel: initial_wheel(&scenario.plant),
        };

        let mut record =
            RunRecord::with_capacity(n, Scheme::Classic, steps + 1, scenario.plant.is_braking());
        let mut clamp_logged = false;

        for i in 0..=steps {
            let t = grid.time_at(i);
            let held_noise = noise.next_sample();
            self.push_sample(&mut record, t, &state, held_noise);
            if i == steps {
                break;
            }

            let dt = grid.dt;
            let k1 = self.field(t, &state, held_noise);
            let k2 = self.field(t + dt / 2.0, &state.advanced(&k1, dt / 2.0), held_noise);
            let k3 = self.field(t + dt / 2.0, &state.advanced(&k2, dt / 2.0), held_noise);
            let k4 = self.field(t + dt, &state.advanced(&k3, dt), held_noise);
            state = state.rk4([&k1, &k2, &k3, &k4], dt);

            let t_next = grid.time_at(i + 1);
            if let Err(source) = classic_post_checks(&state) {
                return Err(RunError { time: t_next, source, record: Box::new(record) });
            }
            if let Some(stopped) = wheel_post_checks(
                &mut state.wheel,
                &self.plant,
                t_next,
                &mut record,
                &mut clamp_logged,
            ) {
                self.push_sample(&mut record, t_next, &state, held_noise);
                record.stopped_at = Some(stopped);
                break;
            }
        }
        Ok(record)
    }
}

fn classic_post_checks(state: &ClassicState) -> Result<(), Error> {
    crate::ensure_finite(state.theta_hat.as_slice(), "theta_hat")?;
    crate::ensure_finite(state.grad_est.as_slice(), "gradient estimate")?;
    if !state.lowpass.is_finite() {
        return Err(Error::NonFinite("output low-pass state"));
    }
    Ok(())
}
