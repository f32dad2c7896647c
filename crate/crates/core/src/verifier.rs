//! Geometric validation of planner waypoints.
//!
//! A waypoint is rejected when it lies behind the robot (checked at the pose of the request and
//! at the pose of delivery), when it falls back behind the previous waypoint, or when it turns
//! too far away from the local trend of the centroid chain. Every rejection carries a feedback
//! sentence for the next planner query.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{angle_between, Pose2, Vec2};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "S: Real")]
pub struct VerifierConfig<S> {
    /// Radians.
    pub theta_back: S,
    /// Radians.
    pub theta_behind: S,
    /// Meters.
    pub d_exempt: S,
    /// Once the robot is this close to the previous waypoint the behind-previous check is moot.
    pub d_prev_reached: S,
    /// Radians.
    pub theta_dev: S,
    /// Meters.
    pub d_fwd_ref: S,
    /// Meters.
    pub d_lat_ref: S,
    /// Explored cells required before deviation checks activate.
    pub min_map_cells: usize,
    /// Feedback re-queries allowed after the first response.
    pub max_requeries: u32,
}

impl<S: Real> Default for VerifierConfig<S> {
    fn default() -> Self {
        Self {
            theta_back: S::lit(100f64.to_radians()),
            theta_behind: S::lit(60f64.to_radians()),
            d_exempt: S::lit(6.0),
            d_prev_reached: S::lit(0.5),
            theta_dev: S::lit(75f64.to_radians()),
            d_fwd_ref: S::lit(1.0),
            d_lat_ref: S::lit(3.0),
            min_map_cells: 500,
            max_requeries: 3,
        }
    }
}

impl<S: Real> VerifierConfig<S> {
    pub fn validate(&self) -> Result<(), Error> {
        let angle_ok = |a: S| a > S::zero() && a < S::PI();
        if !(angle_ok(self.theta_back) && angle_ok(self.theta_behind) && angle_ok(self.theta_dev)) {
            return Err(Error::Config("verifier angles must lie in (0, π)".into()));
        }
        if !(self.d_exempt > S::zero() && self.d_fwd_ref > S::zero() && self.d_lat_ref > S::zero() && self.d_prev_reached >= S::zero()) {
            return Err(Error::Config("verifier distances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    BehindRobot,
    BehindPrev,
    Deviated,
    InvalidIndex,
    None,
}

impl FailureMode {
    /// Rejections that count as deviations in the metrics.
    pub fn is_deviation(self) -> bool {
        matches!(self, Self::BehindRobot | Self::BehindPrev | Self::Deviated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accepted: bool,
    pub failure_mode: FailureMode,
    pub feedback: String,
}

impl Verdict {
    pub fn accept() -> Self {
        Self { accepted: true, failure_mode: FailureMode::None, feedback: String::new() }
    }

    pub fn reject(mode: FailureMode, feedback: impl Into<String>) -> Self {
        Self { accepted: false, failure_mode: mode, feedback: feedback.into() }
    }

    pub fn invalid_index(index: i64, len: usize) -> Self {
        let msg = if len == 0 {
            format!("The selected centroid index {index} is invalid because no centroids are labeled.")
        } else {
            format!("The selected centroid index {index} is invalid; choose an index from 0 to {}.", len - 1)
        };
        Self::reject(FailureMode::InvalidIndex, msg)
    }
}

/// True iff the angle between `p − robot` and the heading exceeds `theta_back`.
pub fn behind_robot<S: Real>(p: Vec2<S>, robot: &Pose2<S>, theta_back: S) -> Result<bool, Error> {
    let a = angle_between(p - robot.position, robot.forward())
        .ok_or_else(|| Error::InvalidInput("waypoint coincides with the robot position".into()))?;
    Ok(a > theta_back)
}

/// Angle between `p_new − p_prev` and `robot − p_prev`. Zero progress (`p_new = p_prev`) counts
/// as angle 0; a robot standing on `p_prev` gives no direction and yields `None`.
fn behind_prev_angle<S: Real>(p_new: Vec2<S>, p_prev: Vec2<S>, robot: Vec2<S>) -> Option<S> {
    let n = p_new - p_prev;
    let b = robot - p_prev;
    if n.norm_sq() == S::zero() {
        return Some(S::zero());
    }
    angle_between(n, b)
}

pub fn behind_prev<S: Real>(p_new: Vec2<S>, p_prev: Vec2<S>, robot: Vec2<S>, theta_behind: S, d_exempt: S, has_forward_centroids: bool) -> bool {
    match behind_prev_angle(p_new, p_prev, robot) {
        Some(a) => a < theta_behind && p_new.distance(p_prev) < d_exempt && has_forward_centroids,
        None => false,
    }
}

/// Chain reference used by the deviation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendReference<S> {
    pub centroid: Vec2<S>,
    /// Unit direction of the local chain trend.
    pub direction: Vec2<S>,
    pub forward: bool,
}

/// Farthest forward centroid inside the lateral band, else the farthest rearward one.
pub fn trend_reference<S: Real>(robot: &Pose2<S>, chain: &[Vec2<S>], d_fwd_ref: S, d_lat_ref: S) -> Option<TrendReference<S>> {
    let pick = |sign: S| {
        chain
            .iter()
            .filter_map(|&c| {
                let (f, l) = robot.to_local(c);
                (sign * f >= d_fwd_ref && l.abs() < d_lat_ref).then_some((sign * f, c))
            })
            .fold(None, |best: Option<(S, Vec2<S>)>, cand| match best {
                Some(b) if b.0 >= cand.0 => Some(b),
                _ => Some(cand),
            })
            .map(|(_, c)| c)
    };
    if let Some(c) = pick(S::one()) {
        let direction = (c - robot.position).normalized()?;
        return Some(TrendReference { centroid: c, direction, forward: true });
    }
    let c = pick(-S::one())?;
    let direction = (robot.position - c).normalized()?;
    Some(TrendReference { centroid: c, direction, forward: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationCheck<S> {
    pub deviated: bool,
    pub angle: Option<S>,
    pub side: Option<Side>,
    pub reference: Option<TrendReference<S>>,
    /// Why the check did not run, if it did not.
    pub skipped: Option<&'static str>,
}

pub const COINCIDE_TOLERANCE: f64 = 1e-6;

pub fn is_deviated<S: Real>(p_new: Vec2<S>, robot: &Pose2<S>, chain: &[Vec2<S>], cfg: &VerifierConfig<S>, map_cells_seen: usize) -> DeviationCheck<S> {
    let skip = |why, reference| DeviationCheck { deviated: false, angle: None, side: None, reference, skipped: Some(why) };
    if map_cells_seen < cfg.min_map_cells {
        return skip("map below activation size", None);
    }
    let Some(r) = trend_reference(robot, chain, cfg.d_fwd_ref, cfg.d_lat_ref) else {
        return skip("no reference centroid", None);
    };
    if p_new.distance(r.centroid) <= S::lit(COINCIDE_TOLERANCE) {
        return skip("waypoint is the reference centroid", Some(r));
    }
    let wp = p_new - robot.position;
    let Some(angle) = angle_between(r.direction, wp) else {
        return skip("waypoint at robot position", Some(r));
    };
    let side = if r.direction.cross(wp) > S::zero() { Side::Left } else { Side::Right };
    DeviationCheck { deviated: angle > cfg.theta_dev, angle: Some(angle), side: Some(side), reference: Some(r), skipped: None }
}

/// Waypoint kind, used only for the wording of feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaypointKind {
    Centroid,
    Free,
}

impl WaypointKind {
    fn noun(self) -> &'static str {
        match self {
            Self::Centroid => "centroid",
            Self::Free => "waypoint",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyContext<'a, S> {
    pub request_pose: Pose2<S>,
    pub delivery_pose: Pose2<S>,
    pub previous: Option<Vec2<S>>,
    /// Chain centroid positions.
    pub chain: &'a [Vec2<S>],
    pub map_cells_seen: usize,
    pub kind: WaypointKind,
}

/// Every predicate value behind a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport<S> {
    pub verdict: Verdict,
    pub behind_robot_request: bool,
    pub behind_robot_delivery: bool,
    pub behind_prev: bool,
    pub deviated: bool,
    pub has_forward_centroids: bool,
    /// Degrees, waypoint vs heading at delivery.
    pub heading_angle_deg: Option<S>,
    /// Degrees, behind-previous angle.
    pub prev_angle_deg: Option<S>,
    /// Degrees, waypoint vs chain trend.
    pub deviation_angle_deg: Option<S>,
    pub deviation_skipped: Option<String>,
}

pub fn has_forward_centroids<S: Real>(robot: &Pose2<S>, chain: &[Vec2<S>], d_min: S) -> bool {
    chain.iter().any(|&c| robot.to_local(c).0 >= d_min)
}

pub fn verify<S: Real>(p_new: Vec2<S>, ctx: &VerifyContext<'_, S>, cfg: &VerifierConfig<S>) -> VerifyReport<S> {
    let deg = |a: S| a.to_degrees();
    // a waypoint on the robot itself has no direction and makes no progress
    let back_req = behind_robot(p_new, &ctx.request_pose, cfg.theta_back).unwrap_or(true);
    let back_del = behind_robot(p_new, &ctx.delivery_pose, cfg.theta_back).unwrap_or(true);
    let robot = ctx.delivery_pose.position;
    let forward = has_forward_centroids(&ctx.delivery_pose, ctx.chain, cfg.d_fwd_ref);
    let (prev, prev_angle) = match ctx.previous {
        Some(pp) => (
            robot.distance(pp) >= cfg.d_prev_reached && behind_prev(p_new, pp, robot, cfg.theta_behind, cfg.d_exempt, forward),
            behind_prev_angle(p_new, pp, robot),
        ),
        None => (false, None),
    };
    let dev = is_deviated(p_new, &ctx.delivery_pose, ctx.chain, cfg, ctx.map_cells_seen);
    let noun = ctx.kind.noun();
    let verdict = if back_req || back_del {
        Verdict::reject(FailureMode::BehindRobot, format!("The selected {noun} is behind the robot."))
    } else if prev {
        Verdict::reject(FailureMode::BehindPrev, format!("The selected {noun} is behind the previous target waypoint."))
    } else if dev.deviated {
        let side = match dev.side {
            Some(Side::Left) => "left",
            _ => "right",
        };
        Verdict::reject(FailureMode::Deviated, format!("The selected {noun} deviates to the {side} of the chain trend."))
    } else {
        Verdict::accept()
    };
    VerifyReport {
        verdict,
        behind_robot_request: back_req,
        behind_robot_delivery: back_del,
        behind_prev: prev,
        deviated: dev.deviated,
        has_forward_centroids: forward,
        heading_angle_deg: angle_between(p_new - robot, ctx.delivery_pose.forward()).map(deg),
        prev_angle_deg: prev_angle.map(deg),
        deviation_angle_deg: dev.angle.map(deg),
        deviation_skipped: dev.skipped.map(str::to_owned),
    }
}
