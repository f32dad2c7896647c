//! Geometric heuristic planner.

use super::mode::D_MIN;
use super::parse::format_response;
use super::types::{Latency, PlannerError, PlannerMode, PlannerQuery, PlannerResponse, Reply, ResponseKind};
use super::Planner;
use crate::map::CellClass;
use crate::raster::{Cell, Point};

/// Candidates this close to an already rejected waypoint are skipped, meters.
const SAME_POINT: f64 = 0.5;
/// A centroid the trajectory has passed this close to counts as reached, meters.
const REACHED: f64 = 1.0;
/// Radius around a free-mode candidate in which unexplored cells are counted, meters.
const FRONTIER_RADIUS: f64 = 1.5;

/// Nearest unvisited centroid not yet passed in centroid mode; in free mode, or when no centroid is left,
/// the discrete move whose neighbourhood holds the most unexplored cells.
#[derive(Debug, Clone, Default)]
pub struct RuleBasedPlanner {
    pub latency_ticks: u64,
}

impl RuleBasedPlanner {
    pub fn new(latency_ticks: u64) -> Self {
        Self { latency_ticks }
    }

    pub fn decide(&self, q: &PlannerQuery) -> PlannerResponse {
        match q.mode {
            PlannerMode::CentroidSelect => {
                let r = plan_rule_based(q);
                if r.kind == ResponseKind::None { plan_frontier(q) } else { r }
            }
            PlannerMode::FreeWaypoint => plan_frontier(q),
        }
    }
}

/// Not rejected earlier in this request and far enough from the current goal to replace it.
fn admissible(q: &PlannerQuery, p: Point) -> bool {
    !q.rejected.iter().any(|r| r.distance(p) <= SAME_POINT) && q.goal.is_none_or(|g| g.distance(p) >= D_MIN)
}

fn reached(q: &PlannerQuery, p: Point) -> bool {
    q.robot.position().distance(p) < REACHED || q.trajectory.iter().any(|t| t.distance(p) < REACHED)
}

/// Closest unvisited, unreached centroid, ties to the lower track id.
pub fn plan_rule_based(q: &PlannerQuery) -> PlannerResponse {
    let robot = q.robot.position();
    q.chain
        .links
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.visited && admissible(q, l.position) && !reached(q, l.position))
        .min_by(|(_, a), (_, b)| robot.distance(a.position).total_cmp(&robot.distance(b.position)).then(a.id.cmp(&b.id)))
        .map(|(i, l)| PlannerResponse::centroid(i as i64, format!("nearest unvisited centroid, track {}", l.id)))
        .unwrap_or_else(|| PlannerResponse::none("all centroids visited"))
}

fn plan_frontier(q: &PlannerQuery) -> PlannerResponse {
    let pose = q.robot.pose();
    let g = &q.grid;
    let f = &g.frame;
    let r_cells = (FRONTIER_RADIUS * f.resolution).ceil() as i32;
    let mut best: Option<((usize, i32, i32), i32, i32)> = None;
    for fwd in 1..=6 {
        for lat in -4i32..=4 {
            let w = pose.to_world(fwd as f64, lat as f64);
            if !admissible(q, w) {
                continue;
            }
            let Some(c) = f.cell_of(w) else { continue };
            if g.class(c) == Some(CellClass::Obstacle) {
                continue;
            }
            let mut unknown = 0usize;
            for dr in -r_cells..=r_cells {
                for dc in -r_cells..=r_cells {
                    if dr * dr + dc * dc > r_cells * r_cells {
                        continue;
                    }
                    let n = Cell::new(c.col + dc, c.row + dr);
                    if f.contains(n) && !g.is_explored(n) {
                        unknown += 1;
                    }
                }
            }
            // more unknown first, then smaller lateral offset, then farther forward
            let key = (unknown, -lat.abs(), fwd);
            if best.as_ref().is_none_or(|b| key > b.0) {
                best = Some((key, fwd, lat));
            }
        }
    }
    match best {
        Some((_, fwd, lat)) => PlannerResponse::relative(fwd, lat, "move toward the largest unexplored neighbourhood"),
        None => PlannerResponse::none("no admissible move"),
    }
}

impl Planner for RuleBasedPlanner {
    fn name(&self) -> &'static str {
        "rule_based"
    }

    fn respond(&mut self, q: &PlannerQuery, _prompt: &str) -> Result<Reply, PlannerError> {
        Ok(Reply { text: format_response(&self.decide(q)), latency: Latency::Ticks(self.latency_ticks) })
    }

    fn simulated_latency_ticks(&self) -> Option<u64> {
        Some(self.latency_ticks)
    }
}
