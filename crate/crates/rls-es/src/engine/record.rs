//! Sampled closed-loop trajectories and their CSV serialization.

use std::io::{self, Write};

use super::scenario::Scheme;

/// Terminal and exceptional events observed during a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    /// Forward speed reached the stop threshold; the record ends here.
    VehicleStopped,
    /// Wheel spin was clamped at zero (lock-up) for at least one step.
    WheelSpinClamped,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// Extra per-sample series recorded for braking runs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WheelSeries {
    pub v: Vec<f64>,
    pub omega: Vec<f64>,
    pub slip: Vec<f64>,
    pub torque: Vec<f64>,
}

/// Complete sampled trajectory of one scenario run.
///
/// All series share the time grid; `grad` holds the RLS gradient estimate
/// or the baseline's demodulated estimate depending on the scheme. For the
/// baseline, `z` is the high-passed output `y − η` and `phi` the
/// demodulated drive `M(t)(y − η)`; `p_trace` is zero (no covariance).
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub dim: usize,
    pub scheme: Scheme,
    pub t: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub theta_hat: Vec<Vec<f64>>,
    pub y_clean: Vec<f64>,
    pub y_noisy: Vec<f64>,
    pub z: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub grad: Vec<Vec<f64>>,
    pub p_trace: Vec<f64>,
    pub wheel: Option<WheelSeries>,
    pub events: Vec<RunEvent>,
    pub stopped_at: Option<f64>,
}

impl RunRecord {
    pub(crate) fn with_capacity(dim: usize, scheme: Scheme, capacity: usize, wheel: bool) -> Self {
        RunRecord {
            dim,
            scheme,
            t: Vec::with_capacity(capacity),
            theta: Vec::with_capacity(capacity),
            theta_hat: Vec::with_capacity(capacity),
            y_clean: Vec::with_capacity(capacity),
            y_noisy: Vec::with_capacity(capacity),
            z: Vec::with_capacity(capacity),
            phi: Vec::with_capacity(capacity),
            grad: Vec::with_capacity(capacity),
            p_trace: Vec::with_capacity(capacity),
            wheel: wheel.then(WheelSeries::default),
            events: Vec::new(),
            stopped_at: None,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Index of the first sample in the trailing `fraction` of the record.
    pub fn tail_start(&self, fraction: f64) -> usize {
        let n = self.len();
        ((n as f64) * (1.0 - fraction)).floor() as usize
    }

    /// Writes the record as CSV: a fixed header with per-channel columns,
    /// one row per grid step, floats printed as shortest round-trip
    /// decimals. Braking runs append `v,omega,lambda,tau` columns.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.dim {
            header.push_str(&format!(",theta_{i}"));
        }
        for i in 1..=self.dim {
            header.push_str(&format!(",theta_hat_{i}"));
        }
        header.push_str(",y_clean,y_noisy,z");
        for i in 1..=self.dim {
            header.push_str(&format!(",phi_{i}"));
        }
        for i in 1..=self.dim {
            header.push_str(&format!(",hhat_{i}"));
        }
        header.push_str(",P_trace");
        if self.wheel.is_some() {
            header.push_str(",v,omega,lambda,tau");
        }
        writeln!(w, "{header}")?;

        let mut line = String::new();
        for row in 0..self.len() {
            line.clear();
            push_num(&mut line, self.t[row], true);
            for v in &self.theta[row] {
                push_num(&mut line, *v, false);
            }
            for v in &self.theta_hat[row] {
                push_num(&mut line, *v, false);
            }
            push_num(&mut line, self.y_clean[row], false);
            push_num(&mut line, self.y_noisy[row], false);
            push_num(&mut line, self.z[row], false);
            for v in &self.phi[row] {
                push_num(&mut line, *v, false);
            }
            for v in &self.grad[row] {
                push_num(&mut line, *v, false);
            }
            push_num(&mut line, self.p_trace[row], false);
            if let Some(wheel) = &self.wheel {
                push_num(&mut line, wheel.v[row], false);
                push_num(&mut line, wheel.omega[row], false);
                push_num(&mut line, wheel.slip[row], false);
                push_num(&mut line, wheel.torque[row], false);
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("CSV output is ASCII")
    }
}

fn push_num(line: &mut String, value: f64, first: bool) {
    use std::fmt::Write as _;
    if !first {
        line.push(',');
    }
    write!(line, "{value}").expect("formatting f64 cannot fail");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_record() -> RunRecord {
        RunRecord {
            dim: 2,
            scheme: Scheme::Rls,
            t: vec![0.0, 0.001],
            theta: vec![vec![0.1, 0.2], vec![0.11, 0.21]],
            theta_hat: vec![vec![0.1, 0.2], vec![0.105, 0.205]],
            y_clean: vec![1.0, 1.5],
            y_noisy: vec![1.05, 1.45],
            z: vec![0.0, 0.1],
            phi: vec![vec![0.0, 0.0], vec![0.01, 0.02]],
            grad: vec![vec![0.0, 0.0], vec![0.5, -0.25]],
            p_trace: vec![2e4, 1.9e4],
            wheel: None,
            events: vec![],
            stopped_at: None,
        }
    }

    #[test]
    fn csv_header_matches_contract() {
        let csv = tiny_record().csv_string();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "t,theta_1,theta_2,theta_hat_1,theta_hat_2,y_clean,y_noisy,z,phi_1,phi_2,hhat_1,hhat_2,P_trace"
        );
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn csv_floats_round_trip() {
        let rec = tiny_record();
        let csv = rec.csv_string();
        let second: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(second[0].parse::<f64>().unwrap(), 0.001);
        assert_eq!(second[5].parse::<f64>().unwrap(), 1.5);
        assert_eq!(second[11].parse::<f64>().unwrap(), -0.25);
    }

    #[test]
    fn tail_start_covers_last_fifth() {
        let rec = tiny_record();
        assert_eq!(rec.tail_start(1.0), 0);
        let mut rec = rec;
        rec.t = (0..100).map(|i| i as f64).collect();
        assert_eq!(rec.tail_start(0.2), 80);
    }
}
