//! Heading/speed tracking controller without collision awareness.

use serde::{Deserialize, Serialize};

use super::dynamics::{Control, DynamicsParams, RobotState};
use crate::geometry::{wrap_angle, Vec2};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct PdGains<S> {
    pub k_heading: S,
    pub k_yaw_rate: S,
    pub k_speed: S,
    /// Desired speed per meter of remaining distance.
    pub k_approach: S,
}

impl<S: Real> Default for PdGains<S> {
    fn default() -> Self {
        Self { k_heading: S::lit(2.0), k_yaw_rate: S::lit(1.5), k_speed: S::lit(1.0), k_approach: S::lit(0.5) }
    }
}

/// Turns toward `goal` and drives at a speed that shrinks with heading error and distance.
pub fn pd_control<S: Real>(s: &RobotState<S>, goal: Vec2<S>, gains: &PdGains<S>, params: &DynamicsParams<S>) -> Control<S> {
    let d = goal - s.position();
    let dist = d.norm();
    let err = if dist > S::lit(1e-9) { wrap_angle(d.y.atan2(d.x) - s.theta) } else { S::zero() };
    let alpha = gains.k_heading * err - gains.k_yaw_rate * s.omega;
    let v_des = (params.v_max * err.cos().max(S::zero())).min(gains.k_approach * dist);
    let a = gains.k_speed * (v_des - s.v);
    params.saturate(Control::new(a, alpha))
}
