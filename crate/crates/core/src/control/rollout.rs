//! Variable-fidelity rollout with sparse boundary-point collision checks.

use serde::{Deserialize, Serialize};

use super::dynamics::{step_dynamics, Control, DynamicsParams, RobotState};
use super::field::ObstacleField;
use super::schedule::{DdpSchedule, Fidelity};
use crate::geometry::Vec2;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct CostWeights<S> {
    pub goal: S,
    pub obs: S,
    pub speed: S,
    pub path: S,
}

impl<S: Real> Default for CostWeights<S> {
    fn default() -> Self {
        Self { goal: S::lit(0.6), obs: S::lit(0.5), speed: S::lit(0.3), path: S::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostTerms<S> {
    /// Terminal distance to the goal.
    pub goal: S,
    /// `Σ max(0, 1 − d_obs / d_sense)` over rollout states.
    pub obs: S,
    /// `Σ (v − v_ref)²`.
    pub speed: S,
    /// `Σ` distance from the start→goal segment. Placeholder, weighted 0 by default.
    pub path: S,
}

impl<S: Real> CostTerms<S> {
    pub fn weighted(&self, w: &CostWeights<S>) -> S {
        w.goal * self.goal + w.obs * self.obs + w.speed * self.speed + w.path * self.path
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct RolloutConfig<S> {
    pub robot_radius: S,
    /// Extra clearance around obstacle cells, meters.
    pub inflation: S,
    pub d_sense: S,
    /// Preferred cruise speed, m/s.
    pub v_cruise: S,
    /// Within this distance of the goal the reference speed ramps down linearly.
    pub slow_radius: S,
    pub weights: CostWeights<S>,
}

impl<S: Real> Default for RolloutConfig<S> {
    fn default() -> Self {
        Self {
            robot_radius: S::lit(0.3),
            inflation: S::lit(0.2),
            d_sense: S::lit(4.0),
            v_cruise: S::lit(0.6),
            slow_radius: S::lit(1.0),
            weights: CostWeights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout<S> {
    /// Initial state followed by one state per completed step.
    pub trajectory: Vec<RobotState<S>>,
    pub terms: CostTerms<S>,
    pub cost: S,
    pub feasible: bool,
}

/// `n` points evenly spaced on the robot circle, the first one straight ahead.
pub fn boundary_points<S: Real>(s: &RobotState<S>, n: usize, radius: S) -> impl Iterator<Item = Vec2<S>> + '_ {
    let step = S::TAU() / S::lit(n as f64);
    (0..n).map(move |k| {
        let a = s.theta + step * S::lit(k as f64);
        Vec2::new(s.x + radius * a.cos(), s.y + radius * a.sin())
    })
}

fn segment_distance<S: Real>(p: Vec2<S>, a: Vec2<S>, b: Vec2<S>) -> S {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 <= S::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).max(S::zero()).min(S::one());
    p.distance(a + ab * t)
}

/// Per-step quantities of a schedule, computed once and shared by every rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutPlan<S> {
    pub intervals: Vec<S>,
    pub fidelity: Vec<Fidelity>,
    /// Unit offsets `(cos, sin)` of the boundary points of step `t`, relative to the heading.
    pub circles: Vec<Vec<(S, S)>>,
}

impl<S: Real> RolloutPlan<S> {
    pub fn new(sched: &DdpSchedule<S>) -> Self {
        let circles = (0..sched.steps)
            .map(|t| {
                let n = sched.boundary_points_at(t).unwrap_or(1);
                let step = S::TAU() / S::lit(n as f64);
                (0..n).map(|k| (step * S::lit(k as f64)).sin_cos()).map(|(s, c)| (c, s)).collect()
            })
            .collect();
        Self { intervals: sched.intervals(), fidelity: (0..sched.steps).map(|t| sched.fidelity(t)).collect(), circles }
    }
}

/// Rolls `controls` out from `s0`. Stops at the first step whose boundary points touch the
/// inflated obstacle set; such rollouts are infeasible and their cost is not meaningful.
pub fn rollout<S: Real>(
    s0: &RobotState<S>,
    controls: &[Control<S>],
    sched: &DdpSchedule<S>,
    params: &DynamicsParams<S>,
    field: &ObstacleField,
    goal: Vec2<S>,
    cfg: &RolloutConfig<S>,
) -> Rollout<S> {
    rollout_planned(s0, controls, &RolloutPlan::new(sched), params, field, goal, cfg)
}

/// `rollout` with the schedule already expanded.
pub fn rollout_planned<S: Real>(
    s0: &RobotState<S>,
    controls: &[Control<S>],
    plan: &RolloutPlan<S>,
    params: &DynamicsParams<S>,
    field: &ObstacleField,
    goal: Vec2<S>,
    cfg: &RolloutConfig<S>,
) -> Rollout<S> {
    debug_assert_eq!(controls.len(), plan.intervals.len());
    let mut trajectory = Vec::with_capacity(controls.len() + 1);
    trajectory.push(*s0);
    let mut terms = CostTerms::default();
    let mut s = *s0;
    let start = s0.position();
    let mut feasible = true;
    for (t, (&u, &dt)) in controls.iter().zip(&plan.intervals).enumerate() {
        s = step_dynamics(&s, u, dt, plan.fidelity[t], params);
        trajectory.push(s);
        let (sin, cos) = s.theta.sin_cos();
        let r = cfg.robot_radius;
        let hit = plan.circles[t].iter().any(|&(c, k)| {
            let p = Vec2::new(s.x + r * (cos * c - sin * k), s.y + r * (sin * c + cos * k));
            field.blocked(p, cfg.inflation)
        });
        if hit {
            feasible = false;
            break;
        }
        let p = s.position();
        let d_obs = field.clearance(p).min(cfg.d_sense);
        terms.obs += (S::one() - d_obs / cfg.d_sense).max(S::zero());
        let to_goal = p.distance(goal);
        let v_ref = cfg.v_cruise * (to_goal / cfg.slow_radius).min(S::one());
        terms.speed += (s.v - v_ref).powi(2);
        terms.path += segment_distance(p, start, goal);
    }
    terms.goal = s.position().distance(goal);
    Rollout { trajectory, cost: terms.weighted(&cfg.weights), terms, feasible }
}
