//! Classical perturbation-based extremum seeking baseline.
//!
//! The tuned parameter is `θ(t) = θ̂(t) + S(t)` and the estimate evolves as
//!
//! ```text
//! θ̂̇ = k Ĝ,
//! Ĝ̇ = ω_l M(t) (y − η) − ω_l Ĝ,
//! η̇ = ω_h (y − η),
//! ```
//!
//! where `M(t)` is the demodulation waveform from [`DitherSpec`]. The
//! filter gains may differ per channel; the low-pass output estimate `η`
//! is shared by all channels (single measured output) and uses the first
//! `ω_h` entry.
//!
//! Without dither the demodulated drive vanishes and `Ĝ` decays to zero,
//! so the baseline cannot seek; construction therefore requires an enabled
//! dither at step time.

use nalgebra::DVector;

use crate::{DitherSpec, Error, ParamVec};

/// State of the perturbation baseline estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicEs {
    theta_hat: DVector<f64>,
    grad_est: DVector<f64>,
    output_lowpass: f64,
    gain: DVector<f64>,
    omega_h: DVector<f64>,
    omega_l: DVector<f64>,
}

/// Time derivatives of the baseline state.
pub struct ClassicRates {
    pub theta_hat: DVector<f64>,
    pub grad_est: DVector<f64>,
    pub output_lowpass: f64,
}

impl ClassicEs {
    pub fn new(
        theta0: &[f64],
        gain: &[f64],
        omega_h: &[f64],
        omega_l: &[f64],
    ) -> Result<Self, Error> {
        let n = theta0.len();
        if n == 0 {
            return Err(Error::config("classic: needs at least one channel"));
        }
        if gain.len() != n || omega_h.len() != n || omega_l.len() != n {
            return Err(Error::config(format!(
                "classic: gain/omega_h/omega_l must all have {n} entries"
            )));
        }
        crate::ensure_finite(theta0, "classic theta0")?;
        crate::ensure_finite(gain, "classic gain")?;
        if omega_h.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::config("omega_h: must be > 0"));
        }
        if omega_l.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::config("omega_l: must be > 0"));
        }
        Ok(ClassicEs {
            theta_hat: DVector::from_row_slice(theta0),
            grad_est: DVector::zeros(n),
            output_lowpass: 0.0,
            gain: DVector::from_row_slice(gain),
            omega_h: DVector::from_row_slice(omega_h),
            omega_l: DVector::from_row_slice(omega_l),
        })
    }

    pub fn dim(&self) -> usize {
        self.theta_hat.len()
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    pub fn grad_est(&self) -> &DVector<f64> {
        &self.grad_est
    }

    pub fn output_lowpass(&self) -> f64 {
        self.output_lowpass
    }

    /// Overrides the low-pass output state (warm start).
    pub fn set_output_lowpass(&mut self, eta: f64) -> Result<(), Error> {
        if !eta.is_finite() {
            return Err(Error::NonFinite("classic eta"));
        }
        self.output_lowpass = eta;
        Ok(())
    }

    /// Baseline vector field at the given state and measurement.
    pub fn rates(
        &self,
        theta_hat: &DVector<f64>,
        grad_est: &DVector<f64>,
        output_lowpass: f64,
        y: f64,
        demod: &ParamVec,
    ) -> ClassicRates {
        let _ = theta_hat;
        let err = y - output_lowpass;
        let mut grad_rate = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            grad_rate[i] = self.omega_l[i] * (demod[i] * err - grad_est[i]);
        }
        ClassicRates {
            theta_hat: self.gain.component_mul(grad_est),
            grad_est: grad_rate,
            output_lowpass: self.omega_h[0] * err,
        }
    }

    /// Advances all three laws one RK4 step with `y` held over the step.
    pub fn step(&mut self, y: f64, dither: &DitherSpec, t: f64, dt: f64) -> Result<(), Error> {
        if !y.is_finite() {
            return Err(Error::NonFinite("classic input y"));
        }
        if dt <= 0.0 {
            return Err(Error::config("classic step: dt must be > 0"));
        }
        if dither.dim() != self.dim() {
            return Err(Error::config("classic step: dither dimension mismatch"));
        }

        let eval = |th: &DVector<f64>, g: &DVector<f64>, eta: f64, at: f64| {
            let demod = dither.demod_value(at)?;
            Ok::<ClassicRates, Error>(self.rates(th, g, eta, y, &demod))
        };

        let k1 = eval(&self.theta_hat, &self.grad_est, self.output_lowpass, t)?;
        let th2 = &self.theta_hat + &k1.theta_hat * (dt / 2.0);
        let g2 = &self.grad_est + &k1.grad_est * (dt / 2.0);
        let e2 = self.output_lowpass + k1.output_lowpass * (dt / 2.0);
        let k2 = eval(&th2, &g2, e2, t + dt / 2.0)?;
        let th3 = &self.theta_hat + &k2.theta_hat * (dt / 2.0);
        let g3 = &self.grad_est + &k2.grad_est * (dt / 2.0);
        let e3 = self.output_lowpass + k2.output_lowpass * (dt / 2.0);
        let k3 = eval(&th3, &g3, e3, t + dt / 2.0)?;
        let th4 = &self.theta_hat + &k3.theta_hat * dt;
        let g4 = &self.grad_est + &k3.grad_est * dt;
        let e4 = self.output_lowpass + k3.output_lowpass * dt;
        let k4 = eval(&th4, &g4, e4, t + dt)?;

        self.theta_hat +=
            (k1.theta_hat + k2.theta_hat * 2.0 + k3.theta_hat * 2.0 + k4.theta_hat) * (dt / 6.0);
        self.grad_est +=
            (k1.grad_est + k2.grad_est * 2.0 + k3.grad_est * 2.0 + k4.grad_est) * (dt / 6.0);
        self.output_lowpass += (k1.output_lowpass
            + k2.output_lowpass * 2.0
            + k3.output_lowpass * 2.0
            + k4.output_lowpass)
            * (dt / 6.0);

        crate::ensure_finite(self.theta_hat.as_slice(), "classic theta_hat")?;
        crate::ensure_finite(self.grad_est.as_slice(), "classic grad estimate")?;
        if !self.output_lowpass.is_finite() {
            return Err(Error::NonFinite("classic eta"));
        }
        Ok(())
    }

    /// Applied parameter `θ = θ̂ + S(t)`.
    pub fn output(&self, dither: &DitherSpec, t: f64) -> ParamVec {
        let s = dither.value(t);
        let values = self
            .theta_hat
            .iter()
            .zip(s.iter())
            .map(|(th, si)| th + si)
            .collect();
        ParamVec::new(values).expect("finite by construction")
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn unit_dither() -> DitherSpec {
        DitherSpec::new(vec![0.01], vec![3.0]).unwrap()
    }

    #[test]
    fn constant_output_with_warm_lowpass_freezes() {
        // y ≡ c with η(0) = c: η stays, Ĝ decays exponentially, θ̂ freezes
        let c = 4.2;
        let dither = unit_dither();
        let mut es = ClassicEs::new(&[0.1], &[0.08], &[0.6], &[0.8]).unwrap();
        es.set_output_lowpass(c).unwrap();
        let dt = 1e-3;
        for i in 0..2000 {
            es.step(c, &dither, i as f64 * dt, dt).unwrap();
        }
        assert_abs_diff_eq!(es.output_lowpass(), c, epsilon = 1e-12);
        // Ĝ(0) = 0 so it never moves and θ̂ stays put
        assert_abs_diff_eq!(es.grad_est()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(es.theta_hat()[0], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn grad_estimate_decays_from_nonzero_without_error_signal() {
        let c = 1.0;
        let dither = unit_dither();
        let mut es = ClassicEs::new(&[0.0], &[0.0], &[0.6], &[0.8]).unwrap();
        es.set_output_lowpass(c).unwrap();
        es.grad_est[0] = 2.0;
        let dt = 1e-3;
        let mut t = 0.0;
        for _ in 0..3000 {
            es.step(c, &dither, t, dt).unwrap();
            t += dt;
        }
        // y − η ≡ 0 leaves Ĝ̇ = −ω_l Ĝ regardless of M(t)
        assert_abs_diff_eq!(es.grad_est()[0], 2.0 * (-0.8 * t).exp(), epsilon = 1e-9);
    }

    #[test]
    fn output_adds_the_probing_signal() {
        let es = ClassicEs::new(&[0.1], &[0.08], &[0.6], &[0.8]).unwrap();
        let off = DitherSpec::disabled(1);
        assert_eq!(es.output(&off, 7.7).as_slice(), &[0.1]);

        let dither = unit_dither();
        let out = es.output(&dither, std::f64::consts::PI / 6.0);
        assert_abs_diff_eq!(out[0], 0.11, epsilon = 1e-12);

        // identity θ − θ̂ = S(t) to machine precision at arbitrary times
        for i in 0..50 {
            let t = 0.37 * i as f64;
            let out = es.output(&dither, t);
            assert_abs_diff_eq!(out[0] - es.theta_hat()[0], dither.value(t)[0], epsilon = 1e-15);
        }
    }

    #[test]
    fn lowpass_tracks_dc_of_oscillating_output() {
        // y = c + A sin(ωt) with ω >> ω_h: steady-state mean(η) near c
        let (c, amp, w) = (5.0_f64, 1.0_f64, 40.0_f64);
        let dither = unit_dither();
        let mut es = ClassicEs::new(&[0.0], &[0.0], &[0.6], &[0.8]).unwrap();
        let dt = 1e-3;
        let mut t = 0.0;
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..40_000 {
            let y = c + amp * (w * t).sin();
            es.step(y, &dither, t, dt).unwrap();
            t += dt;
            if t > 20.0 {
                sum += es.output_lowpass();
                count += 1;
            }
        }
        let mean = sum / count as f64;
        assert!((mean - c).abs() <= amp * 0.6 / w + 1e-3, "mean η = {mean}");
    }

    #[test]
    fn zero_dither_cannot_seek() {
        // with zero probing amplitude the demodulation is undefined and the
        // baseline refuses to run rather than silently drifting
        let off = DitherSpec::disabled(1);
        let mut es = ClassicEs::new(&[0.1], &[0.08], &[0.6], &[0.8]).unwrap();
        assert!(es.step(1.0, &off, 0.0, 1e-3).is_err());
    }

    #[test]
    fn vector_channels_use_their_own_gains() {
        let dither = DitherSpec::new(vec![0.01, 0.01], vec![1.0, 2.0]).unwrap();
        let mut es =
            ClassicEs::new(&[0.1, 0.1], &[0.02, 0.01], &[0.6, 0.6], &[0.8, 0.8]).unwrap();
        for i in 0..100 {
            es.step((0.5 * i as f64 * 1e-3).sin(), &dither, i as f64 * 1e-3, 1e-3).unwrap();
        }
        assert_eq!(es.dim(), 2);
    }
}
