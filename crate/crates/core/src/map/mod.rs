//! Persistent occupancy grid built from scanline frames.

mod camera;
mod grid;
mod persist;
mod render;

pub use camera::{backproject, CameraModel, Rigid3};
pub use grid::{CellClass, IntegrateStats, OccupancyGrid};
pub use persist::{dump_grid, load_grid, GRID_HEADER};
pub use render::{encode_png, export_map_image, render_map, MapOverlay};

/// Fixed map palette.
pub mod palette {
    pub use super::render::{CENTROID, CHAIN_EDGE, FREE, LABEL, LEFT_AXIS, OBSTACLE, ROBOT, TARGET, TRAJECTORY, UNKNOWN};
}
