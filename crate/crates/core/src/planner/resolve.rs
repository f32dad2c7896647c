use super::types::{PlannerResponse, ResponseKind};
use crate::chain::CentroidChain;
use crate::geometry::Pose2;
use crate::raster::Point;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("centroid index {index} outside chain of length {len}")]
    InvalidIndex { index: i64, len: usize },
    #[error("response carries no waypoint")]
    NoWaypoint,
}

/// World coordinates of a response. Relative moves are taken in the frame of `robot`.
pub fn resolve_waypoint(resp: &PlannerResponse, chain: &CentroidChain<f64>, robot: &Pose2<f64>) -> Result<Point, ResolveError> {
    match resp.kind {
        ResponseKind::CentroidIndex => {
            let index = resp.index.ok_or(ResolveError::NoWaypoint)?;
            usize::try_from(index)
                .ok()
                .and_then(|i| chain.links.get(i))
                .map(|l| l.position)
                .ok_or(ResolveError::InvalidIndex { index, len: chain.len() })
        }
        ResponseKind::RelativeMove => {
            let (f, l) = (resp.d_fwd.ok_or(ResolveError::NoWaypoint)?, resp.d_lat.ok_or(ResolveError::NoWaypoint)?);
            Ok(robot.to_world(f as f64, l as f64))
        }
        ResponseKind::None => Err(ResolveError::NoWaypoint),
    }
}
