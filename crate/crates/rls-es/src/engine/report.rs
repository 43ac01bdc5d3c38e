//! Convergence metrics and scheme-versus-scheme comparison.

use serde::Serialize;

use super::record::RunRecord;
use super::run::{run_scenario, RunError};
use super::scenario::Scenario;
use crate::Error;

/// Convergence summary of one run against an oracle target.
///
/// `t_conv` is the first time after which the max-norm parameter error
/// stays within `delta` for the remainder of the record; `None` means the
/// run never settled ("did not converge" is a valid result).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub t_conv: Option<f64>,
    /// Time-averaged max-norm parameter error over the trailing 20%.
    pub steady_state_error: f64,
    /// `y* − mean(y_clean)` over the trailing 20%.
    pub output_gap: f64,
    /// Stop time for braking runs that reached the speed threshold.
    pub stopped_at: Option<f64>,
    pub delta: f64,
}

/// Max-norm distance between a sample and the target.
fn sample_error(sample: &[f64], target: &[f64]) -> f64 {
    sample
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Computes convergence metrics for a completed record.
pub fn convergence_report(
    record: &RunRecord,
    theta_star: &[f64],
    y_star: f64,
    delta: f64,
) -> ConvergenceReport {
    assert_eq!(theta_star.len(), record.dim, "oracle dimension mismatch");
    assert!(!record.is_empty(), "record must hold at least one sample");

    // scan from the end: find the first index from which the error bound
    // holds through the remainder
    let mut settled_from: Option<usize> = None;
    for i in (0..record.len()).rev() {
        if sample_error(&record.theta[i], theta_star) <= delta {
            settled_from = Some(i);
        } else {
            break;
        }
    }

    let tail = record.tail_start(0.2);
    let count = (record.len() - tail).max(1) as f64;
    let steady_state_error: f64 = (tail..record.len())
        .map(|i| sample_error(&record.theta[i], theta_star))
        .sum::<f64>()
        / count;
    let mean_y: f64 = record.y_clean[tail..].iter().sum::<f64>() / count;

    ConvergenceReport {
        t_conv: settled_from.map(|i| record.t[i]),
        steady_state_error,
        output_gap: y_star - mean_y,
        stopped_at: record.stopped_at,
        delta,
    }
}

/// Paired outcome of running the same experiment under two schemes.
#[derive(Debug)]
pub struct SchemeComparison {
    pub report_a: ConvergenceReport,
    pub report_b: ConvergenceReport,
    pub record_a: RunRecord,
    pub record_b: RunRecord,
    /// `stopped_at(a) − stopped_at(b)` when both runs stopped.
    pub stop_time_delta: Option<f64>,
}

/// Comparison failure: either the pairing is invalid or a run aborted.
#[derive(Debug, thiserror::Error)]
pub enum CompareError {
    #[error("scenarios are not comparable: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// Runs two scenarios that share plant, grid and seeds, and pairs their
/// convergence reports against the same oracle target.
pub fn compare_schemes(
    a: &Scenario,
    b: &Scenario,
    theta_star: &[f64],
    y_star: f64,
    delta: f64,
) -> Result<SchemeComparison, CompareError> {
    ensure_comparable(a, b).map_err(|e| CompareError::Mismatch(e.to_string()))?;
    let record_a = run_scenario(a)?;
    let record_b = run_scenario(b)?;
    let report_a = convergence_report(&record_a, theta_star, y_star, delta);
    let report_b = convergence_report(&record_b, theta_star, y_star, delta);
    let stop_time_delta = match (report_a.stopped_at, report_b.stopped_at) {
        (Some(sa), Some(sb)) => Some(sa - sb),
        _ => None,
    };
    Ok(SchemeComparison { report_a, report_b, record_a, record_b, stop_time_delta })
}

/// Both scenarios must drive the same plant on the same grid with the same
/// noise realization.
pub fn ensure_comparable(a: &Scenario, b: &Scenario) -> Result<(), Error> {
    if a.plant != b.plant {
        return Err(Error::config("compare: plants differ"));
    }
    if a.grid != b.grid {
        return Err(Error::config("compare: time grids differ"));
    }
    if a.seed != b.seed || a.noise.seed != b.noise.seed {
        return Err(Error::config("compare: seeds differ"));
    }
    if a.noise.sigma != b.noise.sigma {
        return Err(Error::config("compare: noise levels differ"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::super::scenario::Scheme;
    use super::*;

    fn record_from_theta(t: Vec<f64>, theta: Vec<f64>, y: Vec<f64>) -> RunRecord {
        let n = t.len();
        RunRecord {
            dim: 1,
            scheme: Scheme::Rls,
            t,
            theta: theta.iter().map(|v| vec![*v]).collect(),
            theta_hat: theta.iter().map(|v| vec![*v]).collect(),
            y_clean: y.clone(),
            y_noisy: y,
            z: vec![0.0; n],
            phi: vec![vec![0.0]; n],
            grad: vec![vec![0.0]; n],
            p_trace: vec![0.0; n],
            wheel: None,
            events: vec![],
            stopped_at: None,
        }
    }

    #[test]
    fn already_converged_reports_t0() {
        let r = record_from_theta(
            (0..100).map(|i| i as f64 * 0.1).collect(),
            vec![0.3; 100],
            vec![1.0; 100],
        );
        let rep = convergence_report(&r, &[0.3], 1.0, 0.02);
        assert_eq!(rep.t_conv, Some(0.0));
        assert_eq!(rep.steady_state_error, 0.0);
        assert_abs_diff_eq!(rep.output_gap, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_approach_converges_at_log_ratio() {
        // θ(t) = θ* + e^{−t}, δ = e^{−5}: t_conv = 5
        let dt = 1e-3;
        let n = 10_000;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let theta: Vec<f64> = t.iter().map(|t| 0.3 + (-t).exp()).collect();
        let y = vec![0.0; n];
        let r = record_from_theta(t, theta, y);
        let rep = convergence_report(&r, &[0.3], 0.0, (-5.0f64).exp());
        assert_abs_diff_eq!(rep.t_conv.unwrap(), 5.0, epsilon = 2.0 * dt);
    }

    #[test]
    fn non_convergence_is_reported_as_none() {
        let r = record_from_theta(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0], vec![0.0; 3]);
        let rep = convergence_report(&r, &[5.0], 0.0, 0.1);
        assert_eq!(rep.t_conv, None);
    }
}
