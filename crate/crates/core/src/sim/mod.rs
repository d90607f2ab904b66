//! Deterministic memory-pool contention simulator.
//!
//! Phase runtimes follow the roofline overlap assumption: a phase takes as
//! long as its slowest resource. Remote traffic shares the link with a
//! background injector in proportion to demand and pays a queueing
//! multiplier that grows with link utilization.

mod contention;
mod ic;
mod runtime;
mod schedule;

pub use contention::{contention_factor, ContentionParams};
pub use ic::{phase_ic, predict_ic, probe_demand};
pub use runtime::{app_runtime, phase_runtime, sensitivity_curve, SensitivityPoint};
pub use schedule::{
    percentile, scheduler_experiment, AppSummary, ExperimentResult, LoISchedule, Policy, RunRecord,
    RuntimeStats, ScheduleExperimentConfig,
};

use crate::error::{Error, Result};

fn check_loi(loi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&loi) {
        Ok(())
    } else {
        Err(Error::invalid(format!("LoI {loi} outside [0, 1]")))
    }
}
