//! Benchmark plants: two static maps and a single-wheel braking model.

use serde::{Deserialize, Serialize};

use crate::Error;

pub const GRAVITY: f64 = 9.81;

/// Scalar concave map `y = gain · (k1 (1 − e^{−k2 u}) − k3 u)`.
///
/// Strictly concave for positive constants; the maximizer is interior when
/// `k1 k2 > k3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarFrictionMap {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub gain: f64,
}

impl ScalarFrictionMap {
    pub fn new(k1: f64, k2: f64, k3: f64, gain: f64) -> Result<Self, Error> {
        if !(k1.is_finite() && k2.is_finite() && k3.is_finite() && gain.is_finite()) {
            return Err(Error::NonFinite("scalar map constant"));
        }
        if k1 <= 0.0 || k2 <= 0.0 || k3 <= 0.0 {
            return Err(Error::config("scalar map: k1, k2, k3 must be > 0"));
        }
        Ok(ScalarFrictionMap { k1, k2, k3, gain })
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.gain * (self.k1 * (1.0 - (-self.k2 * u).exp()) - self.k3 * u)
    }
}

/// Two-channel rational map `y = Σ_i p_i · 2 u*_i u_i / (u*_i² + u_i²)`.
///
/// Channel `i` peaks at `u_i = u*_i` with value `p_i`, so the joint maximum
/// is `Σ p_i` at `u = u*`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorRationalMap {
    pub peak_inputs: [f64; 2],
    pub peak_outputs: [f64; 2],
}

impl VectorRationalMap {
    pub fn new(peak_inputs: [f64; 2], peak_outputs: [f64; 2]) -> Result<Self, Error> {
        crate::ensure_finite(&peak_inputs, "vector map peak input")?;
        crate::ensure_finite(&peak_outputs, "vector map peak output")?;
        if peak_inputs.iter().any(|u| *u <= 0.0) || peak_outputs.iter().any(|p| *p <= 0.0) {
            return Err(Error::config("vector map: peaks must be > 0"));
        }
        Ok(VectorRationalMap { peak_inputs, peak_outputs })
    }

    pub fn channel(&self, i: usize, u: f64) -> f64 {
        let u_star = self.peak_inputs[i];
        self.peak_outputs[i] * 2.0 * u_star * u / (u_star * u_star + u * u)
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.channel(0, u[0]) + self.channel(1, u[1])
    }
}

/// Single-wheel longitudinal braking model.
///
/// ```text
/// m v̇ = N μ(λ),      I ω̇ = −B ω − N R μ(λ) + τ,      λ = (R ω − v) / v,
/// ```
///
/// with the rational friction curve `μ(λ) = 2 μ_max λ* λ / (λ*² + λ²)`.
/// During braking the wheel runs slower than the vehicle, so `λ < 0`,
/// `μ(λ) < 0` and `v̇ < 0`; peak deceleration is at `λ = −λ*`. Braking
/// torque is negative in this sign convention.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsWheelPlant {
    pub mass: f64,
    pub radius: f64,
    pub inertia: f64,
    pub bearing: f64,
    /// Normal load on the wheel; defaults to `mass · g` at construction.
    pub weight: f64,
    pub mu_max: f64,
    /// Slip magnitude at the friction peak (stored positive).
    pub lambda_star: f64,
    /// Forward speed below which slip is singular and the run terminates.
    pub v_stop: f64,
    /// Torque magnitude limit for the inner slip controller.
    pub tau_max: f64,
    /// Proportional gain of the inner slip-tracking loop, 1/s.
    pub slip_gain: f64,
}

/// Wheel/vehicle state: forward speed and wheel angular rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WheelState {
    pub v: f64,
    pub omega: f64,
}

impl WheelState {
    /// Free rolling at forward speed `v` (zero slip).
    pub fn free_rolling(v: f64, radius: f64) -> Self {
        WheelState { v, omega: v / radius }
    }
}

/// Outcome of one braking integration step.
#[derive(Clone, Copy, Debug)]
pub struct AbsStep {
    pub state: WheelState,
    pub slip: f64,
    pub v_dot: f64,
    /// Wheel spin was clamped at zero (lock-up) during this step.
    pub wheel_clamped: bool,
    /// Forward speed reached `v_stop` during this step.
    pub stopped: bool,
}

impl AbsWheelPlant {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mass: f64,
        radius: f64,
        inertia: f64,
        bearing: f64,
        weight: Option<f64>,
        mu_max: f64,
        lambda_star: f64,
    ) -> Result<Self, Error> {
        let plant = AbsWheelPlant {
            mass,
            radius,
            inertia,
            bearing,
            weight: weight.unwrap_or(mass * GRAVITY),
            mu_max,
            lambda_star,
            v_stop: 0.5,
            tau_max: 4000.0,
            slip_gain: 50.0,
        };
        plant.validate()?;
        Ok(plant)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("mass", self.mass),
            ("radius", self.radius),
            ("inertia", self.inertia),
            ("weight", self.weight),
            ("mu_max", self.mu_max),
            ("lambda_star", self.lambda_star),
            ("v_stop", self.v_stop),
            ("slip_gain", self.slip_gain),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::config(format!("abs.{name}: must be > 0, got {value}")));
            }
        }
        if !self.bearing.is_finite() || self.bearing < 0.0 {
            return Err(Error::config("abs.bearing: must be >= 0"));
        }
        if !self.tau_max.is_finite() || self.tau_max < 0.0 {
            return Err(Error::config("abs.tau_max: must be >= 0"));
        }
        Ok(())
    }

    /// Friction coefficient `μ(λ)`; odd in `λ`, bounded by `μ_max`.
    pub fn friction(&self, slip: f64) -> f64 {
        let ls = self.lambda_star;
        2.0 * self.mu_max * ls * slip / (ls * ls + slip * slip)
    }

    /// Wheel slip `λ = (R ω − v) / v` (requires `v > 0`).
    pub fn slip(&self, state: &WheelState) -> f64 {
        (self.radius * state.omega - state.v) / state.v
    }

    /// State derivatives `(v̇, ω̇)` under braking torque `τ`.
    pub fn rates(&self, state: &WheelState, tau: f64) -> (f64, f64) {
        let mu = self.friction(self.slip(state));
        let v_dot = self.weight / self.mass * mu;
        let omega_dot = (-self.bearing * state.omega - self.weight * self.radius * mu + tau)
            / self.inertia;
        (v_dot, omega_dot)
    }

    /// One RK4 step of the two-state model with `τ` held over the step.
    ///
    /// The entry state must have `v > v_stop`. Wheel spin is clamped at
    /// zero (lock-up) and `stopped` is set when the exit speed falls to
    /// `v_stop`.
    pub fn step(&self, state: &WheelState, tau: f64, dt: f64) -> Result<AbsStep, Error> {
        if !tau.is_finite() {
            return Err(Error::NonFinite("braking torque"));
        }
        if dt <= 0.0 {
            return Err(Error::config("abs step: dt must be > 0"));
        }
        if state.v <= self.v_stop {
            return Err(Error::config(format!(
                "abs step: entry speed {} at or below v_stop {}",
                state.v, self.v_stop
            )));
        }

        let f = |s: WheelState| {
            let (dv, dw) = self.rates(&s, tau);
            (dv, dw)
        };
        let s = *state;
        let k1 = f(s);
        let mid1 = WheelState { v: s.v + 0.5 * dt * k1.0, omega: s.omega + 0.5 * dt * k1.1 };
        let k2 = f(mid1);
        let mid2 = WheelState { v: s.v + 0.5 * dt * k2.0, omega: s.omega + 0.5 * dt * k2.1 };
        let k3 = f(mid2);
        let end = WheelState { v: s.v + dt * k3.0, omega: s.omega + dt * k3.1 };
        let k4 = f(end);

        let mut next = WheelState {
            v: s.v + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            omega: s.omega + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        };
        let wheel_clamped = next.omega < 0.0;
        if wheel_clamped {
            next.omega = 0.0;
        }
        let stopped = next.v <= self.v_stop;
        let slip_state = if stopped { s } else { next };
        let slip = self.slip(&slip_state);
        let (v_dot, _) = self.rates(&slip_state, tau);
        Ok(AbsStep { state: next, slip, v_dot, wheel_clamped, stopped })
    }

    /// Braking torque that makes the slip track `slip_ref` by feedback
    /// linearization of the slip dynamics plus a proportional correction.
    ///
    /// The result is clamped to `[−tau_max, B ω]`: the lower bound is the
    /// actuator limit, the upper bound compensates bearing drag at most, so
    /// the net torque can never spin the wheel up.
    pub fn tracking_torque(&self, slip_ref: f64, state: &WheelState) -> f64 {
        let slip = self.slip(state);
        let mu = self.friction(slip);
        let v_dot = self.weight / self.mass * mu;
        let want = self.slip_gain * (slip_ref - slip);
        // invert λ̇ = (R ω̇ − (1 + λ) v̇) / v for the torque in ω̇
        let tau = self.inertia / self.radius * (want * state.v + (1.0 + slip) * v_dot)
            + self.bearing * state.omega
            + self.weight * self.radius * mu;
        tau.clamp(-self.tau_max, self.bearing * state.omega)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn study_map() -> ScalarFrictionMap {
        ScalarFrictionMap::new(1.05, 23.0, 0.52, 10.0).unwrap()
    }

    fn study_vector() -> VectorRationalMap {
        VectorRationalMap::new([0.2, 0.3], [5.0, 9.0]).unwrap()
    }

    fn wet_wheel() -> AbsWheelPlant {
        AbsWheelPlant::new(400.0, 0.3, 1.7, 0.01, None, 0.4, 0.25).unwrap()
    }

    #[test]
    fn scalar_map_reference_values() {
        let m = study_map();
        assert_eq!(m.eval(0.0), 0.0);
        assert_abs_diff_eq!(m.eval(0.3), 8.9294, epsilon = 1e-3);
        // closed-form argmax ln(k1 k2 / k3)/k2, cross-checked by fine grid
        let argmax = (m.k1 * m.k2 / m.k3).ln() / m.k2;
        assert_abs_diff_eq!(argmax, 0.16688, epsilon = 1e-5);
        assert_abs_diff_eq!(m.eval(argmax), 9.4059, epsilon = 1e-3);
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 0..=1_000_000 {
            let u = i as f64 * 1e-6;
            let y = m.eval(u);
            if y > best.1 {
                best = (u, y);
            }
        }
        assert_abs_diff_eq!(best.0, argmax, epsilon = 2e-6);
    }

    #[test]
    fn scalar_map_is_strictly_concave_on_unit_interval() {
        let m = study_map();
        let n = 1000;
        let h = 1.0 / n as f64;
        for i in 1..n {
            let u = i as f64 * h;
            let second = (m.eval(u + h) - 2.0 * m.eval(u) + m.eval(u - h)) / (h * h);
            assert!(second < 0.0, "second difference {second} at u = {u}");
        }
    }

    #[test]
    fn vector_map_reference_values() {
        let m = study_vector();
        assert_abs_diff_eq!(m.eval(&[0.2, 0.3]), 14.0, epsilon = 1e-12);
        assert_eq!(m.eval(&[0.0, 0.0]), 0.0);
        assert_abs_diff_eq!(m.eval(&[0.2, 0.0]), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn vector_map_grid_argmax_is_at_peaks() {
        let m = study_vector();
        let res = 0.002;
        let steps = ((1.0 - 0.01) / res) as usize;
        let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
        for i in 0..=steps {
            for j in 0..=steps {
                let u = [0.01 + i as f64 * res, 0.01 + j as f64 * res];
                let y = m.eval(&u);
                if y > best.1 {
                    best = (u, y);
                }
            }
        }
        assert!((best.0[0] - 0.2).abs() <= res && (best.0[1] - 0.3).abs() <= res);
    }

    #[test]
    fn friction_curve_peak_and_symmetry() {
        let p = wet_wheel();
        assert_eq!(p.friction(0.0), 0.0);
        assert_abs_diff_eq!(p.friction(0.25), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(p.friction(-0.25), -0.4, epsilon = 1e-12);
        // |μ| never exceeds μ_max anywhere
        for i in -4000..=4000 {
            let lam = i as f64 * 1e-3;
            assert!(p.friction(lam).abs() <= p.mu_max + 1e-12);
        }
    }

    #[test]
    fn braking_only_decelerates() {
        // τ <= 0 with λ in (−1, 0]: forward speed never increases
        let p = wet_wheel();
        let mut s = WheelState::free_rolling(33.3, p.radius);
        let dt = 1e-3;
        let mut prev_v = s.v;
        for i in 0..6000 {
            let tau = if i < 300 { 0.0 } else { -800.0 };
            let out = p.step(&s, tau, dt).unwrap();
            s = out.state;
            assert!(s.v <= prev_v + 1e-12, "speed increased under braking");
            assert!(out.slip <= 1e-9, "slip went positive under braking");
            prev_v = s.v;
            if out.stopped {
                break;
            }
        }
    }

    #[test]
    fn tracking_torque_holds_equilibrium() {
        let p = wet_wheel();
        // put the wheel exactly at λ = λ_ref and verify λ̇ ≈ 0 over one step
        let v = 25.0;
        let slip_ref = -0.15;
        let omega = (1.0 + slip_ref) * v / p.radius;
        let s = WheelState { v, omega };
        let tau = p.tracking_torque(slip_ref, &s);
        let out = p.step(&s, tau, 1e-3).unwrap();
        let new_slip = p.slip(&out.state);
        assert_abs_diff_eq!(new_slip, slip_ref, epsilon = 1e-6);
    }

    #[test]
    fn tracking_torque_free_rolling_compensates_bearing_only() {
        let p = wet_wheel();
        let s = WheelState::free_rolling(30.0, p.radius);
        let tau = p.tracking_torque(0.0, &s);
        // feedforward equals bearing drag; clamp admits exactly that much
        assert_abs_diff_eq!(tau, p.bearing * s.omega, epsilon = 1e-9);
        assert!(tau.abs() < 2.0);
    }

    #[test]
    fn zero_gain_controller_is_pure_feedforward() {
        let mut p = wet_wheel();
        p.slip_gain = 1e-12; // effectively zero, keeps validate() happy
        let v = 20.0;
        let slip_ref = -0.1;
        let omega = (1.0 + slip_ref) * v / p.radius;
        let s = WheelState { v, omega };
        let tau = p.tracking_torque(slip_ref, &s);
        let out = p.step(&s, tau, 1e-3).unwrap();
        assert_abs_diff_eq!(p.slip(&out.state), slip_ref, epsilon = 1e-6);
    }

    #[test]
    fn stop_event_fires_below_threshold() {
        let p = wet_wheel();
        let mut s = WheelState { v: 0.6, omega: 0.5 * 0.6 / p.radius };
        let mut stopped = false;
        for _ in 0..20_000 {
            let tau = p.tracking_torque(-p.lambda_star, &s);
            let out = p.step(&s, tau, 1e-3).unwrap();
            s = out.state;
            if out.stopped {
                stopped = true;
                break;
            }
        }
        assert!(stopped);
        assert!(p.step(&s, 0.0, 1e-3).is_err(), "stepping past the stop must fail");
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ScalarFrictionMap::new(0.0, 23.0, 0.52, 10.0).is_err());
        assert!(VectorRationalMap::new([0.0, 0.3], [5.0, 9.0]).is_err());
        assert!(AbsWheelPlant::new(400.0, -0.3, 1.7, 0.01, None, 0.4, 0.25).is_err());
    }
}
