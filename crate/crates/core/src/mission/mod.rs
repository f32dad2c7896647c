//! Mission loop, triggering, logging, metrics and batch evaluation.

mod batch;
mod config;
mod log;
mod mailbox;
mod metrics;
mod replay;
mod runner;
mod trigger;

pub use batch::{run_batch, save_outcome, standard_worlds, BatchConfig, BatchReport, BatchRow, COLUMNS};
pub use config::{ControllerConfig, ExecutionMode, MetricsConfig, MissionConfig, PlannerConfig, PlannerKind, Variant, WorldSpec};
pub use log::{EndReason, Failure, GoalSource, LogHeader, MissionLog, Record, LOG_SCHEMA, LOG_VERSION};
pub use mailbox::{Delivery, Mailbox};
pub use metrics::{
    coverage_percent, coverage_rate, efficiency, in_view, mission_time, mission_time_coral, mission_time_dream, CoverageTracker, MissionSummary, TimeMode,
};
pub use replay::{diff_summaries, final_chain, replay_grid, summarize_log};
pub use runner::{build_planner, run_mission, run_mission_in, MissionOutcome};
pub use trigger::{accept_new_goal, Trigger, TriggerCause, TriggerConfig};
