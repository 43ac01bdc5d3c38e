//! Fixed-step time grid shared by every closed-loop integration.

use serde::{Deserialize, Serialize};

use crate::Error;

/// Uniform time grid `t0, t0 + dt, …, t0 + steps·dt`.
///
/// The step count is `round((t_end − t0) / dt)`, so the final grid point
/// lands within `dt/2` of `t_end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t_end: f64, dt: f64) -> Result<Self, Error> {
        let grid = TimeGrid { t0, t_end, dt };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.t0.is_finite() || !self.t_end.is_finite() || !self.dt.is_finite() {
            return Err(Error::config("grid: t0, t_end and dt must be finite"));
        }
        if self.dt <= 0.0 {
            return Err(Error::config(format!("grid.dt: must be > 0, got {}", self.dt)));
        }
        if self.t_end <= self.t0 {
            return Err(Error::config(format!(
                "grid.t_end: must exceed t0 = {}, got {}",
                self.t0, self.t_end
            )));
        }
        if self.steps() == 0 {
            return Err(Error::config("grid: span shorter than half a step"));
        }
        Ok(())
    }

    /// Number of integration steps (one less than the number of grid points).
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round() as usize
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    /// Same span with half the step, for integration-order checks.
    pub fn halved(&self) -> TimeGrid {
        TimeGrid { t0: self.t0, t_end: self.t_end, dt: self.dt / 2.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_count_rounds_to_nearest() {
        let g = TimeGrid::new(0.0, 20.0, 1e-3).unwrap();
        assert_eq!(g.steps(), 20_000);
        // span that is not an exact multiple still lands within dt/2
        let g = TimeGrid::new(0.0, 1.0004, 1e-3).unwrap();
        assert_eq!(g.steps(), 1000);
        assert!((g.time_at(g.steps()) - g.t_end).abs() <= g.dt / 2.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(TimeGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(TimeGrid::new(0.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn halving_doubles_steps() {
        let g = TimeGrid::new(0.0, 2.0, 0.01).unwrap();
        assert_eq!(g.halved().steps(), 2 * g.steps());
    }
}
