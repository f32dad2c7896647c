use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::CentroidChain;
use crate::control::RobotState;
use crate::map::OccupancyGrid;
use crate::raster::Point;
use crate::world::SensorFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerMode {
    CentroidSelect,
    FreeWaypoint,
}

/// Everything a planner may look at. Built from read-only snapshots owned by the query.
#[derive(Debug, Clone)]
pub struct PlannerQuery {
    pub mode: PlannerMode,
    pub chain: CentroidChain<f64>,
    pub robot: RobotState<f64>,
    pub frame: SensorFrame,
    pub grid: Arc<OccupancyGrid>,
    pub trajectory: Arc<Vec<Point>>,
    /// Rejection sentence from the previous attempt of the same request.
    pub feedback: Option<String>,
    /// Waypoints already rejected within the same request.
    pub rejected: Vec<Point>,
    /// Goal the robot is currently driving to.
    pub goal: Option<Point>,
    /// 0 for the first attempt, then one per feedback re-query.
    pub attempt: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    CentroidIndex,
    RelativeMove,
    None,
}

/// Parsed planner answer. Distances are whole meters in the robot frame (`d_lat > 0` is left).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerResponse {
    pub kind: ResponseKind,
    pub index: Option<i64>,
    pub d_fwd: Option<i32>,
    pub d_lat: Option<i32>,
    pub reason: String,
}

impl PlannerResponse {
    pub fn centroid(index: i64, reason: impl Into<String>) -> Self {
        Self { kind: ResponseKind::CentroidIndex, index: Some(index), d_fwd: None, d_lat: None, reason: reason.into() }
    }

    pub fn relative(d_fwd: i32, d_lat: i32, reason: impl Into<String>) -> Self {
        Self { kind: ResponseKind::RelativeMove, index: None, d_fwd: Some(d_fwd), d_lat: Some(d_lat), reason: reason.into() }
    }

    pub fn none(reason: impl Into<String>) -> Self {
        Self { kind: ResponseKind::None, index: None, d_fwd: None, d_lat: None, reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error("planner timed out after {0:.1} s")]
    Timeout(f64),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("scripted planner has no responses left")]
    Exhausted,
    #[error("unparseable planner response: {0}")]
    Parse(String),
}

/// How long the answer took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Latency {
    /// Simulated, in control ticks.
    Ticks(u64),
    /// Measured wall time, seconds.
    Wall(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    pub latency: Latency,
}
