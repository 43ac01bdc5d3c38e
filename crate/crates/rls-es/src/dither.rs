//! Sinusoidal probing (dither) signal and its demodulation companion.
//!
//! The probing signal added to the nominal parameter is
//! `S_i(t) = a_i sin(ω_i t)`; its analytic rate `Ṡ_i(t) = a_i ω_i cos(ω_i t)`
//! feeds the regressor filter so that no signal is ever differentiated
//! numerically. The perturbation baseline demodulates with
//! `M_i(t) = (2 / a_i) sin(ω_i t)` by default; a few benchmark
//! configurations print demodulation waveforms that do not follow the
//! `2 / a_i` pattern, so an explicit override is allowed.

use serde::{Deserialize, Serialize};

use crate::{Error, ParamVec};

/// Demodulation waveform override `M_i(t) = m_i sin(ν_i t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemodSpec {
    pub amplitudes: Vec<f64>,
    pub frequencies: Vec<f64>,
}

/// Per-channel dither amplitudes and frequencies.
///
/// Either every amplitude is positive (dither enabled, pairwise-distinct
/// positive frequencies required) or every amplitude is zero (disabled).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DitherSpec {
    pub amplitudes: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Demodulation override; `None` derives `M_i = 2/a_i sin(ω_i t)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demod: Option<DemodSpec>,
}

impl DitherSpec {
    pub fn new(amplitudes: Vec<f64>, frequencies: Vec<f64>) -> Result<Self, Error> {
        let spec = DitherSpec { amplitudes, frequencies, demod: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Disabled dither (zero vector) of dimension `n`.
    pub fn disabled(n: usize) -> Self {
        DitherSpec { amplitudes: vec![0.0; n], frequencies: vec![0.0; n], demod: None }
    }

    /// Attaches a demodulation override `M_i(t) = m_i sin(ν_i t)`.
    pub fn with_demod(mut self, amplitudes: Vec<f64>, frequencies: Vec<f64>) -> Result<Self, Error> {
        self.demod = Some(DemodSpec { amplitudes, frequencies });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.amplitudes.is_empty() {
            return Err(Error::config("dither: needs at least one channel"));
        }
        if self.amplitudes.len() != self.frequencies.len() {
            return Err(Error::config(format!(
                "dither: {} amplitudes vs {} frequencies",
                self.amplitudes.len(),
                self.frequencies.len()
            )));
        }
        crate::ensure_finite(&self.amplitudes, "dither amplitude")?;
        crate::ensure_finite(&self.frequencies, "dither frequency")?;
        let enabled = self.amplitudes.iter().any(|a| *a != 0.0);
        if enabled {
            if self.amplitudes.iter().any(|a| *a <= 0.0) {
                return Err(Error::config(
                    "dither.amplitudes: must be all positive or all zero",
                ));
            }
            if self.frequencies.iter().any(|w| *w <= 0.0) {
                return Err(Error::config("dither.frequencies: must be positive when enabled"));
            }
            for i in 0..self.frequencies.len() {
                for j in (i + 1)..self.frequencies.len() {
                    if self.frequencies[i] == self.frequencies[j] {
                        return Err(Error::config(format!(
                            "dither.frequencies: channels {i} and {j} coincide"
                        )));
                    }
                }
            }
        }
        if let Some(demod) = &self.demod {
            if demod.amplitudes.len() != self.amplitudes.len()
                || demod.frequencies.len() != self.amplitudes.len()
            {
                return Err(Error::config("dither.demod: dimension mismatch"));
            }
            crate::ensure_finite(&demod.amplitudes, "demod amplitude")?;
            crate::ensure_finite(&demod.frequencies, "demod frequency")?;
            if demod.amplitudes.iter().any(|m| *m <= 0.0) {
                return Err(Error::config("dither.demod.amplitudes: must be positive"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn enabled(&self) -> bool {
        self.amplitudes.iter().any(|a| *a > 0.0)
    }

    /// Probing signal `S(t)`; zero vector when disabled.
    pub fn value(&self, t: f64) -> ParamVec {
        let values = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .map(|(a, w)| a * (w * t).sin())
            .collect();
        ParamVec::new(values).expect("dither sample is finite by construction")
    }

    /// Analytic rate `Ṡ(t)` with components `a_i ω_i cos(ω_i t)`.
    pub fn rate(&self, t: f64) -> ParamVec {
        let values = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .map(|(a, w)| a * w * (w * t).cos())
            .collect();
        ParamVec::new(values).expect("dither rate is finite by construction")
    }

    /// Demodulation signal `M(t)`.
    ///
    /// Fails when no override is present and some amplitude is zero, since
    /// `2 / a_i` is then undefined.
    pub fn demod_value(&self, t: f64) -> Result<ParamVec, Error> {
        let values: Vec<f64> = match &self.demod {
            Some(demod) => demod
                .amplitudes
                .iter()
                .zip(&demod.frequencies)
                .map(|(m, w)| m * (w * t).sin())
                .collect(),
            None => {
                if let Some(i) = self.amplitudes.iter().position(|a| *a == 0.0) {
                    return Err(Error::ZeroDitherAmplitude(i));
                }
                self.amplitudes
                    .iter()
                    .zip(&self.frequencies)
                    .map(|(a, w)| 2.0 / a * (w * t).sin())
                    .collect()
            }
        };
        ParamVec::new(values)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn value_at_reference_points() {
        let d = DitherSpec::new(vec![0.01], vec![3.0]).unwrap();
        assert_eq!(d.value(0.0).as_slice(), &[0.0]);
        assert_abs_diff_eq!(d.value(PI / 6.0)[0], 0.01, epsilon = 1e-15);

        let d2 = DitherSpec::new(vec![0.01, 0.01], vec![7.0, 10.0]).unwrap();
        let s = d2.value(0.1);
        assert_abs_diff_eq!(s[0], 0.01 * 0.7f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[1], 0.01 * 1.0f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn rate_at_reference_points() {
        let d = DitherSpec::new(vec![0.01], vec![3.0]).unwrap();
        assert_abs_diff_eq!(d.rate(0.0)[0], 0.03, epsilon = 1e-15);

        let off = DitherSpec::disabled(2);
        assert_eq!(off.rate(12.3).as_slice(), &[0.0, 0.0]);

        let d2 = DitherSpec::new(vec![0.01, 0.01], vec![7.0, 10.0]).unwrap();
        let r = d2.rate(0.0);
        assert_abs_diff_eq!(r[0], 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 0.10, epsilon = 1e-15);
    }

    #[test]
    fn demod_default_and_override() {
        let d = DitherSpec::new(vec![0.01], vec![3.0]).unwrap();
        assert_abs_diff_eq!(d.demod_value(PI / 6.0).unwrap()[0], 200.0, epsilon = 1e-9);
        assert_abs_diff_eq!(d.demod_value(0.0).unwrap()[0], 0.0, epsilon = 1e-15);

        // an amplitude of 2 makes the derived waveform exactly sin(ωt)
        let unit = DitherSpec::new(vec![2.0], vec![3.0]).unwrap();
        let m = unit.demod_value(0.4).unwrap();
        assert_abs_diff_eq!(m[0], (3.0 * 0.4f64).sin(), epsilon = 1e-15);

        // same waveform expressed as an override on a small dither
        let overridden = DitherSpec::new(vec![0.01], vec![3.0])
            .unwrap()
            .with_demod(vec![1.0], vec![3.0])
            .unwrap();
        assert_abs_diff_eq!(overridden.demod_value(0.4).unwrap()[0], m[0], epsilon = 1e-15);

        let off = DitherSpec::disabled(1);
        assert!(matches!(off.demod_value(0.0), Err(Error::ZeroDitherAmplitude(0))));
    }

    #[test]
    fn rejects_mixed_and_duplicate_channels() {
        assert!(DitherSpec::new(vec![0.01, 0.0], vec![1.0, 2.0]).is_err());
        assert!(DitherSpec::new(vec![0.01, 0.01], vec![3.0, 3.0]).is_err());
        assert!(DitherSpec::new(vec![0.01], vec![-3.0]).is_err());
        assert!(DitherSpec::new(vec![], vec![]).is_err());
    }

    proptest! {
        // central difference of S matches Ṡ to O(h²)
        #[test]
        fn rate_is_derivative_of_value(
            a in 1e-3f64..1.0,
            w in 0.1f64..20.0,
            t in -50.0f64..50.0,
        ) {
            let d = DitherSpec::new(vec![a], vec![w]).unwrap();
            let h = 1e-6;
            let numeric = (d.value(t + h)[0] - d.value(t - h)[0]) / (2.0 * h);
            prop_assert!((numeric - d.rate(t)[0]).abs() < 1e-6);
        }

        // componentwise M·S = 2 sin²(ωt) ∈ [0, 2] for the derived waveform
        #[test]
        fn demod_product_bounded(
            a in 1e-3f64..1.0,
            w in 0.1f64..20.0,
            t in -50.0f64..50.0,
        ) {
            let d = DitherSpec::new(vec![a], vec![w]).unwrap();
            let p = d.demod_value(t).unwrap()[0] * d.value(t)[0];
            prop_assert!((-1e-12..=2.0 + 1e-12).contains(&p));
            let expected = 2.0 * (w * t).sin().powi(2);
            prop_assert!((p - expected).abs() < 1e-9);
        }
    }
}
