//! Scenario description and the sample-serial simulation loop.

mod run;
mod scenario;

pub use run::{
    run_scenario, run_varying_environment, PhaseSummary, RunOutput, RunStatus, RunSummary,
    Signals, TrajectoryRecord, CONVERGENCE_TOLERANCE, STEADY_STATE_FRACTION,
};
pub use scenario::{PathChange, ScenarioConfig, SIGMA_D_PREAMBLE};
