//! Low-level control: horizon schedule, vehicle model, rollouts and MPPI.

mod dynamics;
mod field;
mod mppi;
mod pd;
mod rollout;
mod schedule;

pub use dynamics::{step_dynamics, Control, DynamicsParams, RobotState};
pub use field::ObstacleField;
pub use mppi::{MppiConfig, MppiController, MppiOutput};
pub use pd::{pd_control, PdGains};
pub use rollout::{boundary_points, rollout, rollout_planned, CostTerms, CostWeights, Rollout, RolloutConfig, RolloutPlan};
pub use schedule::{DdpSchedule, Fidelity};
