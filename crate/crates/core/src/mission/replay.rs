//! Metrics and maps reconstructed from a saved log.

use std::collections::HashMap;

use super::config::Variant;
use super::log::{MissionLog, Record};
use super::metrics::{efficiency, mission_time, CoverageTracker, MissionSummary, TimeMode};
use crate::geometry::Pose2;
use crate::map::{CameraModel, OccupancyGrid};
use crate::raster::Point;
use crate::world::{render_sensor, WorldModel};

/// Recomputes the summary from the records alone (plus the ground-truth world for coverage).
pub fn summarize_log(log: &MissionLog, world: &WorldModel) -> MissionSummary {
    let cfg = &log.header.config;
    let mut coverage = CoverageTracker::new(world, cfg.sensor, cfg.metrics.cover_fraction);
    let mut cov_time = None;
    let (mut steps, mut collisions, mut in_collision) = (0u64, 0u64, false);
    let (mut vlm_calls, mut deviations) = (0u64, 0u64);
    let (mut t_idle, mut latency_sum, mut latency_n) = (0.0, 0.0, 0u64);
    let mut attempts: HashMap<u64, u32> = HashMap::new();
    for r in &log.records {
        match r {
            Record::Tick { t, pose, collision, .. } => {
                steps += 1;
                if *collision && !in_collision {
                    collisions += 1;
                }
                in_collision = *collision;
                coverage.observe(&Pose2::new(pose[0], pose[1], pose[2]));
                if cov_time.is_none() && coverage.total() > 0 && coverage.percent() >= cfg.metrics.cov_time_percent {
                    cov_time = Some(*t);
                }
            }
            Record::Query { query, attempt, .. } => {
                vlm_calls += 1;
                attempts.insert(*query, *attempt);
            }
            Record::Response { query, latency_ticks, .. } => {
                let s = *latency_ticks as f64 * cfg.dt;
                latency_sum += s;
                latency_n += 1;
                if attempts.get(query).is_some_and(|&a| a > 0) {
                    t_idle += s;
                }
            }
            Record::Verdict { verdict, .. } if !verdict.accepted => deviations += 1,
            _ => {}
        }
    }
    let mean_latency_s = if latency_n == 0 { 0.0 } else { latency_sum / latency_n as f64 };
    let mode = if cfg.variant == Variant::Dream { TimeMode::Dream } else { TimeMode::Coral };
    let n = if mode == TimeMode::Dream { vlm_calls } else { steps };
    let coverage_percent = coverage.percent();
    MissionSummary {
        steps,
        clusters_total: coverage.total(),
        clusters_covered: coverage.covered(),
        coverage_percent,
        cov_time,
        collisions,
        vlm_calls,
        deviations,
        t_idle,
        mission_time: mission_time(mode, n, mean_latency_s, cfg.dt, t_idle),
        efficiency: efficiency(steps, coverage_percent),
        mean_latency_s,
    }
}

/// Field-by-field differences, as `name: logged vs recomputed`.
pub fn diff_summaries(logged: &MissionSummary, recomputed: &MissionSummary) -> Vec<String> {
    let a = serde_json::to_value(logged).expect("summary serializes");
    let b = serde_json::to_value(recomputed).expect("summary serializes");
    let (Some(a), Some(b)) = (a.as_object(), b.as_object()) else { return Vec::new() };
    a.iter().filter(|(k, v)| b.get(*k) != Some(*v)).map(|(k, v)| format!("{k}: {v} vs {}", b.get(k).unwrap_or(&serde_json::Value::Null))).collect()
}

/// Rebuilds the occupancy grid by re-sensing at every logged pose. Sensing happens before each
/// step, so the pose after the last tick is not integrated.
pub fn replay_grid(log: &MissionLog, world: &WorldModel) -> OccupancyGrid {
    let sensor = log.header.config.sensor;
    let mut grid = OccupancyGrid::new(world.frame());
    let mut poses = vec![world.start];
    let logged = log.poses();
    poses.extend(logged.iter().take(logged.len().saturating_sub(1)));
    for pose in &poses {
        let frame = render_sensor(world, pose, &sensor);
        grid.integrate_frame(&frame, &CameraModel::scanline(pose, &sensor));
    }
    grid
}

/// Last chain snapshot in the log.
pub fn final_chain(log: &MissionLog) -> Vec<Point> {
    log.records
        .iter()
        .rev()
        .find_map(|r| match r {
            Record::Chain { positions, .. } => Some(positions.clone()),
            _ => None,
        })
        .unwrap_or_default()
}
