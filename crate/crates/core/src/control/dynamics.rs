//! Planar underactuated vehicle model.

use serde::{Deserialize, Serialize};

use super::schedule::Fidelity;
use crate::geometry::{wrap_angle, Pose2, Vec2};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState<S> {
    pub x: S,
    pub y: S,
    pub theta: S,
    /// Surge speed, m/s.
    pub v: S,
    /// Yaw rate, rad/s.
    pub omega: S,
}

impl<S: Real> RobotState<S> {
    pub fn at_rest(pose: Pose2<S>) -> Self {
        Self { x: pose.position.x, y: pose.position.y, theta: pose.heading, v: S::zero(), omega: S::zero() }
    }

    pub fn position(&self) -> Vec2<S> {
        Vec2::new(self.x, self.y)
    }

    pub fn pose(&self) -> Pose2<S> {
        Pose2::new(self.x, self.y, self.theta)
    }
}

/// Surge acceleration `a` (m/s²) and yaw acceleration `alpha` (rad/s²).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Control<S> {
    pub a: S,
    pub alpha: S,
}

impl<S: Real> Control<S> {
    pub fn new(a: S, alpha: S) -> Self {
        Self { a, alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct DynamicsParams<S> {
    pub v_max: S,
    pub omega_max: S,
    pub a_max: S,
    pub alpha_max: S,
    /// Linear surge drag, 1/s.
    pub k_d: S,
    /// Linear yaw drag, 1/s.
    pub k_r: S,
}

impl<S: Real> Default for DynamicsParams<S> {
    fn default() -> Self {
        Self {
            v_max: S::lit(0.8),
            omega_max: S::lit(1.0),
            a_max: S::lit(0.5),
            alpha_max: S::lit(1.0),
            k_d: S::lit(0.5),
            k_r: S::lit(0.8),
        }
    }
}

fn clamp<S: Real>(x: S, m: S) -> S {
    x.max(-m).min(m)
}

impl<S: Real> DynamicsParams<S> {
    pub fn saturate(&self, u: Control<S>) -> Control<S> {
        Control { a: clamp(u.a, self.a_max), alpha: clamp(u.alpha, self.alpha_max) }
    }

    /// Control that drives `(v, ω)` toward zero within one step of length `dt`.
    pub fn brake(&self, s: &RobotState<S>, dt: S) -> Control<S> {
        self.saturate(Control { a: -s.v / dt, alpha: -s.omega / dt })
    }
}

/// Advances `s` by `dt` under control `u` (saturated first).
///
/// `Full`: `v̇ = a − k_d v`, `ω̇ = α − k_r ω`, semi-implicit Euler (velocities first, then heading
/// and position from the new velocities). `Kinematic`: drag dropped, velocities jump to the
/// commanded `v + a·dt`, `ω + α·dt`. Velocities are saturated in both cases; heading
/// is wrapped to (−π, π].
pub fn step_dynamics<S: Real>(s: &RobotState<S>, u: Control<S>, dt: S, fidelity: Fidelity, p: &DynamicsParams<S>) -> RobotState<S> {
    let u = p.saturate(u);
    let (v_dot, w_dot) = match fidelity {
        Fidelity::Full => (u.a - p.k_d * s.v, u.alpha - p.k_r * s.omega),
        Fidelity::Kinematic => (u.a, u.alpha),
    };
    let v = clamp(s.v + v_dot * dt, p.v_max);
    let omega = clamp(s.omega + w_dot * dt, p.omega_max);
    let theta = s.theta + omega * dt;
    let (sin, cos) = theta.sin_cos();
    RobotState { x: s.x + v * cos * dt, y: s.y + v * sin * dt, theta: wrap_angle(theta), v, omega }
}
