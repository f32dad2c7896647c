use super::types::PlannerMode;
use crate::chain::CentroidChain;
use crate::geometry::Pose2;

/// Forward distance a centroid needs before centroid selection is offered.
pub const D_MIN: f64 = 1.0;

/// Centroid selection when some centroid lies at least `d_min` ahead. Coming back from free
/// waypoint mode additionally needs two distinct centroids, since a single centroid is what a
/// collapsed strip-like cluster looks like.
pub fn select_mode(chain: &CentroidChain<f64>, robot: &Pose2<f64>, d_min: f64, previous: Option<PlannerMode>) -> PlannerMode {
    let forward = chain.links.iter().any(|l| robot.to_local(l.position).0 >= d_min);
    let enough = previous != Some(PlannerMode::FreeWaypoint) || chain.len() >= 2;
    if forward && enough {
        PlannerMode::CentroidSelect
    } else {
        PlannerMode::FreeWaypoint
    }
}
