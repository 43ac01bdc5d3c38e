//! Regressor generation for the linear parametric model `z = ĥᵀφ`.
//!
//! The derivative surrogate `z` comes from the washout `s/(s+ω_l)` applied
//! to the measured output, realized in proper state-space form
//!
//! ```text
//! ẋ = −ω_l x + y,      z = y − ω_l x,
//! ```
//!
//! so the measurement is never differentiated. The companion filter
//! `φ̇ = −ω_l φ + θ̇` is driven by the *commanded* parameter rate (which the
//! controller knows in closed form), and shares the washout pole so that a
//! static gain `g` in `y = g·θ` appears exactly as `z/φ → g`.

use nalgebra::DVector;

use crate::Error;

/// Washout and rate-filter state with a common pole.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressorFilter {
    pole: f64,
    washout_state: f64,
    phi: DVector<f64>,
}

impl RegressorFilter {
    /// Zero-initialized filter bank for an `n`-dimensional parameter.
    pub fn new(n: usize, pole: f64) -> Result<Self, Error> {
        Self::with_initial(n, pole, 0.0, None)
    }

    /// Filter bank with explicit initial states (scenario overrides).
    pub fn with_initial(
        n: usize,
        pole: f64,
        washout_state: f64,
        phi0: Option<&[f64]>,
    ) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::config("regressor filter needs at least one channel"));
        }
        if !pole.is_finite() || pole <= 0.0 {
            return Err(Error::config(format!("omega_l: must be > 0, got {pole}")));
        }
        if !washout_state.is_finite() {
            return Err(Error::NonFinite("washout initial state"));
        }
        let phi = match phi0 {
            Some(values) => {
                if values.len() != n {
                    return Err(Error::config(format!(
                        "phi0: expected {n} entries, got {}",
                        values.len()
                    )));
                }
                crate::ensure_finite(values, "phi initial state")?;
                DVector::from_row_slice(values)
            }
            None => DVector::zeros(n),
        };
        Ok(RegressorFilter { pole, washout_state, phi })
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn pole(&self) -> f64 {
        self.pole
    }

    pub fn washout_state(&self) -> f64 {
        self.washout_state
    }

    pub fn phi(&self) -> &DVector<f64> {
        &self.phi
    }

    /// Derivative surrogate for the measurement `y` at the current state.
    pub fn output(&self, y: f64) -> f64 {
        washout_output(self.pole, self.washout_state, y)
    }

    /// Advances the washout one RK4 step with `y` held, returning `z`.
    pub fn washout_step(&mut self, y: f64, dt: f64) -> Result<f64, Error> {
        if !y.is_finite() {
            return Err(Error::NonFinite("washout input y"));
        }
        if dt <= 0.0 {
            return Err(Error::config("washout_step: dt must be > 0"));
        }
        let f = |x: f64| washout_rate(self.pole, x, y);
        let x = self.washout_state;
        let k1 = f(x);
        let k2 = f(x + 0.5 * dt * k1);
        let k3 = f(x + 0.5 * dt * k2);
        let k4 = f(x + dt * k3);
        self.washout_state = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        Ok(self.output(y))
    }

    /// Advances `φ̇ = −ω_l φ + θ̇` one RK4 step with `θ̇` held.
    pub fn phi_step(&mut self, theta_dot: &[f64], dt: f64) -> Result<(), Error> {
        if theta_dot.len() != self.dim() {
            return Err(Error::config(format!(
                "phi_step: expected {} rates, got {}",
                self.dim(),
                theta_dot.len()
            )));
        }
        crate::ensure_finite(theta_dot, "phi_step input theta_dot")?;
        if dt <= 0.0 {
            return Err(Error::config("phi_step: dt must be > 0"));
        }
        let pole = self.pole;
        for (phi, rate) in self.phi.iter_mut().zip(theta_dot) {
            let f = |p: f64| -pole * p + rate;
            let p = *phi;
            let k1 = f(p);
            let k2 = f(p + 0.5 * dt * k1);
            let k3 = f(p + 0.5 * dt * k2);
            let k4 = f(p + dt * k3);
            *phi = p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Ok(())
    }
}

/// Washout state derivative `ẋ = −ω_l x + y`.
pub fn washout_rate(pole: f64, washout_state: f64, y: f64) -> f64 {
    -pole * washout_state + y
}

/// Washout read-out `z = y − ω_l x`.
pub fn washout_output(pole: f64, washout_state: f64, y: f64) -> f64 {
    y - pole * washout_state
}

/// Rate-filter derivative `φ̇_i = −ω_l φ_i + θ̇_i`.
pub fn phi_rate(pole: f64, phi_i: f64, theta_dot_i: f64) -> f64 {
    -pole * phi_i + theta_dot_i
}

/// Identity regressors for when the output derivative is measured directly:
/// `z = ẏ`, `φ = θ̇`.
pub fn direct_regressors(y_dot: f64, theta_dot: &[f64]) -> (f64, Vec<f64>) {
    (y_dot, theta_dot.to_vec())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn dc_at_fixed_point_is_rejected_exactly() {
        let c = 3.7;
        let pole = 0.8;
        let mut f = RegressorFilter::with_initial(1, pole, c / pole, None).unwrap();
        for _ in 0..1000 {
            let z = f.washout_step(c, 1e-2).unwrap();
            assert_abs_diff_eq!(z, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dc_transient_decays_like_exponential() {
        let c = 2.0;
        let pole = 0.8;
        let dt = 1e-3;
        let mut f = RegressorFilter::new(1, pole).unwrap();
        let mut t = 0.0;
        for _ in 0..5000 {
            let z = f.washout_step(c, dt).unwrap();
            t += dt;
            let expected = c * (-pole * t).exp();
            assert_abs_diff_eq!(z, expected, epsilon = 1e-9 * c);
        }
    }

    #[test]
    fn ramp_settles_to_inverse_pole() {
        // final value theorem on s/(s+ω_l) · 1/s²
        let pole = 2.0;
        let dt = 1e-3;
        let mut f = RegressorFilter::new(1, pole).unwrap();
        let mut z = 0.0;
        for i in 0..20_000 {
            let t = i as f64 * dt;
            z = f.washout_step(t, dt).unwrap();
        }
        // the held (staircase) input biases the settled value by O(dt)
        assert_abs_diff_eq!(z, 1.0 / pole, epsilon = 5e-3 / pole);
    }

    #[test]
    fn phi_decays_and_tracks_constant_rate() {
        let pole = 0.8;
        let dt = 1e-3;

        // θ̇ = 0 from φ(0) = φ0: pure exponential decay
        let phi0 = 0.7;
        let mut f = RegressorFilter::with_initial(1, pole, 0.0, Some(&[phi0])).unwrap();
        for i in 1..=4000 {
            f.phi_step(&[0.0], dt).unwrap();
            let t = i as f64 * dt;
            assert_abs_diff_eq!(f.phi()[0], phi0 * (-pole * t).exp(), epsilon = 1e-10);
        }

        // constant θ̇ = c from zero: settles at c/ω_l
        let c = 0.25;
        let mut f = RegressorFilter::new(1, pole).unwrap();
        for _ in 0..20_000 {
            f.phi_step(&[c], dt).unwrap();
        }
        assert_abs_diff_eq!(f.phi()[0], c / pole, epsilon = 1e-6);

        // zero stays zero
        let mut f = RegressorFilter::new(2, pole).unwrap();
        for _ in 0..100 {
            f.phi_step(&[0.0, 0.0], dt).unwrap();
        }
        assert_eq!(f.phi().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn washout_is_linear_in_input() {
        let pole = 1.3;
        let dt = 1e-3;
        let (a, b) = (0.7, -2.1);
        let y1 = |t: f64| (0.9 * t).sin();
        let y2 = |t: f64| 0.3 * t;

        let mut fa = RegressorFilter::new(1, pole).unwrap();
        let mut fb = RegressorFilter::new(1, pole).unwrap();
        let mut fc = RegressorFilter::new(1, pole).unwrap();
        for i in 0..2000 {
            let t = i as f64 * dt;
            let za = fa.washout_step(y1(t), dt).unwrap();
            let zb = fb.washout_step(y2(t), dt).unwrap();
            let zc = fc.washout_step(a * y1(t) + b * y2(t), dt).unwrap();
            assert_abs_diff_eq!(zc, a * za + b * zb, epsilon = 1e-10);
        }
    }

    #[test]
    fn swept_gain_recovers_static_slope() {
        // y = g θ with constant θ̇: after 5/ω_l the ratio z/φ is g within 1%
        let g = 42.0;
        let pole = 0.8;
        let dt = 1e-3;
        let theta_dot = 0.05;
        let mut f = RegressorFilter::new(1, pole).unwrap();
        let mut theta = 0.0;
        let mut t = 0.0;
        let mut ratio = 0.0;
        while t < 8.0 / pole {
            let y = g * theta;
            let z = f.washout_step(y, dt).unwrap();
            f.phi_step(&[theta_dot], dt).unwrap();
            theta += theta_dot * dt;
            t += dt;
            if t > 5.0 / pole {
                ratio = z / f.phi()[0];
                assert!((ratio - g).abs() <= 0.01 * g.abs(), "ratio {ratio} at t={t}");
            }
        }
        assert!((ratio - g).abs() <= 0.01 * g.abs());
    }

    #[test]
    fn direct_regressors_is_identity() {
        assert_eq!(direct_regressors(0.0, &[0.0]), (0.0, vec![0.0]));
        let (z, phi) = direct_regressors(3.2, &[1.0, -0.5]);
        assert_eq!(z, 3.2);
        assert_eq!(phi, vec![1.0, -0.5]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut f = RegressorFilter::new(1, 0.8).unwrap();
        assert!(f.washout_step(f64::NAN, 1e-3).is_err());
        assert!(f.phi_step(&[f64::INFINITY], 1e-3).is_err());
        assert!(f.phi_step(&[0.0, 0.0], 1e-3).is_err());
        assert!(RegressorFilter::new(1, 0.0).is_err());
        assert!(RegressorFilter::new(0, 1.0).is_err());
    }
}
