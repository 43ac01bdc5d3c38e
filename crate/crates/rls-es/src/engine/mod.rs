//! Closed-loop composition: scenario description, fixed-step integration,
//! noise injection, trajectory records, the independent extremum oracle and
//! convergence metrics.

mod oracle;
mod record;
mod report;
mod run;
mod scenario;

pub use oracle::{es_target, oracle_extremum, Extremum};
pub use record::{EventKind, RunEvent, RunRecord, WheelSeries};
pub use report::{
    compare_schemes, convergence_report, ensure_comparable, CompareError, ConvergenceReport,
    SchemeComparison,
};
pub use run::{run_scenario, RunError};
pub use scenario::{Gains, InitOverrides, PlantConfig, Scenario, Scheme};
