//! Condition-based planner triggering.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::raster::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TriggerConfig {
    /// Distance to the goal that counts as reached, meters.
    pub d_trig: f64,
    /// Maximum displacement over the stuck window, meters.
    pub dp_stuck: f64,
    /// Maximum speed during the stuck window, m/s.
    pub v_stuck: f64,
    /// Stuck window, seconds.
    pub t_stuck: f64,
    /// Consecutive failures that fire the failure trigger.
    pub n_fail_max: u32,
    /// Minimum time between distance/failure-triggered queries, seconds.
    pub t_cooldown: f64,
    /// Minimum separation between consecutive goals, meters.
    pub dd_min: f64,
}

impl Default for TriggerConfig {
    fn default() -> Self {
        Self { d_trig: 2.5, dp_stuck: 0.1, v_stuck: 0.1, t_stuck: 20.0, n_fail_max: 2, t_cooldown: 50.0, dd_min: 1.0 }
    }
}

impl TriggerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let ok = [self.d_trig, self.dp_stuck, self.v_stuck, self.t_stuck, self.t_cooldown, self.dd_min].iter().all(|&v| v > 0.0 && v.is_finite());
        if !ok || self.n_fail_max == 0 {
            return Err(Error::Config("trigger thresholds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerCause {
    Dist,
    Stuck,
    Fail,
    /// Fixed-rate query of the step-wise baseline.
    Step,
}

/// Sliding-window trigger state, advanced once per tick.
#[derive(Debug, Clone)]
pub struct Trigger {
    cfg: TriggerConfig,
    window_ticks: u64,
    cooldown_ticks: u64,
    history: VecDeque<(u64, Point, f64)>,
    last_fire: Option<u64>,
}

impl Trigger {
    pub fn new(cfg: TriggerConfig, dt: f64) -> Self {
        Self {
            cfg,
            window_ticks: (cfg.t_stuck / dt).round() as u64,
            cooldown_ticks: (cfg.t_cooldown / dt).round() as u64,
            history: VecDeque::new(),
            last_fire: None,
        }
    }

    pub fn config(&self) -> &TriggerConfig {
        &self.cfg
    }

    pub fn in_cooldown(&self, tick: u64) -> bool {
        self.last_fire.is_some_and(|t| tick < t + self.cooldown_ticks)
    }

    /// Appends the state at `tick` to the stuck window.
    pub fn observe(&mut self, tick: u64, position: Point, speed: f64) {
        self.history.push_back((tick, position, speed.abs()));
        while self.history.front().is_some_and(|&(t, _, _)| t + self.window_ticks < tick) {
            self.history.pop_front();
        }
    }

    /// Firing cause at `tick`, if any; firing starts the cooldown and restarts the window.
    ///
    /// Stuck: the window spans `t_stuck`, endpoint displacement is under `dp_stuck` and every
    /// recorded speed is under `v_stuck`. It ignores the cooldown. Dist and Fail are
    /// suppressed for `t_cooldown` after any fire.
    pub fn check(&mut self, tick: u64, position: Point, goal: Option<Point>, n_fail: u32) -> Option<TriggerCause> {
        let cause = if self.is_stuck(tick) {
            Some(TriggerCause::Stuck)
        } else if self.in_cooldown(tick) {
            None
        } else if goal.is_some_and(|g| position.distance(g) < self.cfg.d_trig) {
            Some(TriggerCause::Dist)
        } else if n_fail >= self.cfg.n_fail_max {
            Some(TriggerCause::Fail)
        } else {
            None
        };
        if cause.is_some() {
            self.fired(tick);
        }
        cause
    }

    /// `observe` followed by `check`.
    pub fn evaluate(&mut self, tick: u64, position: Point, speed: f64, goal: Option<Point>, n_fail: u32) -> Option<TriggerCause> {
        self.observe(tick, position, speed);
        self.check(tick, position, goal, n_fail)
    }

    fn is_stuck(&self, tick: u64) -> bool {
        let (Some(&(t0, p0, _)), Some(&(_, p1, _))) = (self.history.front(), self.history.back()) else {
            return false;
        };
        tick >= t0 + self.window_ticks && p0.distance(p1) < self.cfg.dp_stuck && self.history.iter().all(|&(_, _, v)| v < self.cfg.v_stuck)
    }

    /// Marks a query submitted at `tick` (for queries not raised by `evaluate`).
    pub fn fired(&mut self, tick: u64) {
        self.last_fire = Some(tick);
        self.history.clear();
    }

    /// Restarts the stuck window without touching the cooldown.
    pub fn reset_window(&mut self) {
        self.history.clear();
    }
}

/// A new goal must be at least `dd_min` from the current one.
pub fn accept_new_goal(p_new: Point, current: Option<Point>, dd_min: f64) -> bool {
    current.is_none_or(|c| p_new.distance(c) >= dd_min)
}
