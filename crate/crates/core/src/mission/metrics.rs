//! Coverage, timing and efficiency metrics.

use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Pose2};
use crate::raster::Point;
use crate::world::{SensorConfig, WorldModel};

/// Whether `p` lies in the field-of-view sector of radius `d_max` at `pose`.
pub fn in_view(pose: &Pose2<f64>, p: Point, sensor: &SensorConfig) -> bool {
    let d = p - pose.position;
    let r = d.norm();
    if r > sensor.d_max {
        return false;
    }
    r == 0.0 || wrap_angle(d.y.atan2(d.x) - pose.heading).abs() <= sensor.fov / 2.0
}

#[derive(Debug, Clone)]
struct ClusterView {
    cells: Vec<Point>,
    seen: Vec<bool>,
    n_seen: usize,
    center: Point,
    /// Largest distance from `center` to a member cell.
    reach: f64,
    covered: bool,
}

/// Incremental per-cluster view bookkeeping. Occlusion is ignored.
#[derive(Debug, Clone)]
pub struct CoverageTracker {
    sensor: SensorConfig,
    fraction: f64,
    clusters: Vec<ClusterView>,
    covered: usize,
}

impl CoverageTracker {
    pub fn new(world: &WorldModel, sensor: SensorConfig, fraction: f64) -> Self {
        let frame = world.frame();
        let clusters = world
            .clusters
            .iter()
            .map(|c| {
                let cells: Vec<Point> = c.cells.iter().map(|&cell| frame.cell_center(cell)).collect();
                let center = c.centroid_gt;
                let reach = cells.iter().map(|&p| p.distance(center)).fold(0.0, f64::max);
                ClusterView { seen: vec![false; cells.len()], cells, n_seen: 0, center, reach, covered: false }
            })
            .collect();
        Self { sensor, fraction, clusters, covered: 0 }
    }

    /// Accounts for one pose; returns how many clusters became covered.
    pub fn observe(&mut self, pose: &Pose2<f64>) -> usize {
        let before = self.covered;
        for c in self.clusters.iter_mut() {
            if c.covered || c.center.distance(pose.position) > self.sensor.d_max + c.reach {
                continue;
            }
            for (p, seen) in c.cells.iter().zip(c.seen.iter_mut()) {
                if !*seen && in_view(pose, *p, &self.sensor) {
                    *seen = true;
                    c.n_seen += 1;
                }
            }
            if meets_fraction(c.n_seen, c.cells.len(), self.fraction) {
                c.covered = true;
                self.covered += 1;
            }
        }
        self.covered - before
    }

    pub fn covered(&self) -> usize {
        self.covered
    }

    pub fn total(&self) -> usize {
        self.clusters.len()
    }

    /// Covered share of clusters, percent. A world without clusters reports 0.
    pub fn percent(&self) -> f64 {
        coverage_percent(self.covered, self.total())
    }

    pub fn complete(&self) -> bool {
        self.total() > 0 && self.covered == self.total()
    }

    /// Observed fraction of each cluster.
    pub fn fractions(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| if c.cells.is_empty() { 0.0 } else { c.n_seen as f64 / c.cells.len() as f64 }).collect()
    }
}

fn meets_fraction(seen: usize, total: usize, fraction: f64) -> bool {
    total > 0 && seen as f64 >= fraction * total as f64 - 1e-9
}

pub fn coverage_percent(covered: usize, total: usize) -> f64 {
    if total == 0 { 0.0 } else { covered as f64 / total as f64 * 100.0 }
}

/// Coverage over a pose history, percent.
pub fn coverage_rate(poses: &[Pose2<f64>], world: &WorldModel, sensor: &SensorConfig, fraction: f64) -> f64 {
    let mut t = CoverageTracker::new(world, *sensor, fraction);
    for p in poses {
        t.observe(p);
    }
    t.percent()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// Step-wise: every step waits for the planner.
    Dream,
    /// Continuous control plus idle time from rejected answers.
    Coral,
}

/// `N · (1 + t̄)`: one second of motion plus the mean planner latency per step.
pub fn mission_time_dream(n_steps: u64, mean_latency_s: f64) -> f64 {
    n_steps as f64 * (1.0 + mean_latency_s)
}

/// `N · Δt + T_idle`.
pub fn mission_time_coral(n_steps: u64, dt: f64, t_idle: f64) -> f64 {
    n_steps as f64 * dt + t_idle
}

pub fn mission_time(mode: TimeMode, n_steps: u64, mean_latency_s: f64, dt: f64, t_idle: f64) -> f64 {
    match mode {
        TimeMode::Dream => mission_time_dream(n_steps, mean_latency_s),
        TimeMode::Coral => mission_time_coral(n_steps, dt, t_idle),
    }
}

/// Steps per percent of coverage; absent at zero coverage.
pub fn efficiency(steps: u64, coverage_percent: f64) -> Option<f64> {
    (coverage_percent > 0.0).then(|| steps as f64 / coverage_percent)
}

/// Final statistics of one mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSummary {
    pub steps: u64,
    pub clusters_total: usize,
    pub clusters_covered: usize,
    pub coverage_percent: f64,
    /// Sim time at which coverage first reached the configured level, seconds.
    pub cov_time: Option<f64>,
    pub collisions: u64,
    /// Submitted planner queries, feedback re-queries included.
    pub vlm_calls: u64,
    /// Planner answers the verifier flagged.
    pub deviations: u64,
    pub t_idle: f64,
    pub mission_time: f64,
    pub efficiency: Option<f64>,
    pub mean_latency_s: f64,
}
