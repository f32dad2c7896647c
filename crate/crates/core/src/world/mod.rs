//! Ground-truth reef environments: layout generation, scanline sensing and collision tests.

mod generate;
mod io;
mod sensor;
mod spine;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Pose2;
use crate::raster::{Cell, GridFrame, Point};

pub use generate::{generate_world, generate_world_with, GenerateParams};
pub use io::{parse_world, write_world, WORLD_HEADER};
pub use sensor::{render_sensor, FloorReturn, Label, SensorConfig, SensorFrame};
pub use spine::{spine_template, Spine};

/// Robot radius used everywhere a default is needed.
pub const ROBOT_RADIUS: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    L,
    S,
    K,
    E,
    O,
}

impl Topology {
    pub const ALL: [Topology; 5] = [Topology::L, Topology::S, Topology::K, Topology::E, Topology::O];
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Topology::L => "L",
            Topology::S => "S",
            Topology::K => "K",
            Topology::E => "E",
            Topology::O => "O",
        };
        f.write_str(s)
    }
}

impl FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "L" => Ok(Topology::L),
            "S" => Ok(Topology::S),
            "K" => Ok(Topology::K),
            "E" => Ok(Topology::E),
            "O" => Ok(Topology::O),
            other => Err(format!("unknown topology {other:?}")),
        }
    }
}

/// Axis-aligned rectangle, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn centered(size: f64) -> Self {
        let h = size / 2.0;
        Self { min: Point::new(-h, -h), max: Point::new(h, h) }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Nearest point at least `margin` inside the rectangle (the center if it is too small).
    pub fn clamp_inside(&self, p: Point, margin: f64) -> Point {
        let c = self.center();
        let clamp = |v: f64, lo: f64, hi: f64, mid: f64| if lo > hi { mid } else { v.clamp(lo, hi) };
        Point::new(
            clamp(p.x, self.min.x + margin, self.max.x - margin, c.x),
            clamp(p.y, self.min.y + margin, self.max.y - margin, c.y),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCluster {
    pub id: u32,
    pub cells: Vec<Cell>,
    pub centroid_gt: Point,
}

impl TargetCluster {
    /// Builds a cluster and its ground-truth centroid (mean of cell centers).
    pub fn from_cells(id: u32, mut cells: Vec<Cell>, frame: &GridFrame) -> Self {
        cells.sort();
        cells.dedup();
        let n = cells.len().max(1) as f64;
        let sum = cells.iter().fold(Point::zero(), |acc, &c| acc + frame.cell_center(c));
        Self { id, centroid_gt: sum * (1.0 / n), cells }
    }
}

/// Ground-truth environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldModel {
    pub bounds: Bounds,
    pub topology: Topology,
    /// Raster resolution of cluster cells, cells per meter.
    pub resolution: f64,
    pub clusters: Vec<TargetCluster>,
    pub obstacles: Vec<Obstacle>,
    pub start: Pose2<f64>,
    pub spine: Spine,
    pub seed: u64,
}

impl WorldModel {
    /// Lattice on which cluster cells are defined; shared with the occupancy grid.
    pub fn frame(&self) -> GridFrame {
        GridFrame::covering(self.bounds.center(), self.bounds.width(), self.bounds.height(), self.resolution)
    }

    /// Dense per-cell cluster lookup (`Some(cluster index)` for target cells).
    pub fn target_raster(&self) -> TargetRaster {
        let frame = self.frame();
        let mut owner = vec![u32::MAX; frame.len()];
        for (k, cl) in self.clusters.iter().enumerate() {
            for &c in &cl.cells {
                if frame.contains(c) {
                    owner[frame.index(c)] = k as u32;
                }
            }
        }
        TargetRaster { frame, owner }
    }

    pub fn total_target_cells(&self) -> usize {
        self.clusters.iter().map(|c| c.cells.len()).sum()
    }

    /// Set of all target cells, mostly for tests.
    pub fn target_cells(&self) -> HashSet<Cell> {
        self.clusters.iter().flat_map(|c| c.cells.iter().copied()).collect()
    }
}

/// Cluster ownership per lattice cell.
#[derive(Debug, Clone)]
pub struct TargetRaster {
    pub frame: GridFrame,
    owner: Vec<u32>,
}

impl TargetRaster {
    #[inline]
    pub fn cluster_at(&self, c: Cell) -> Option<usize> {
        if !self.frame.contains(c) {
            return None;
        }
        match self.owner[self.frame.index(c)] {
            u32::MAX => None,
            k => Some(k as usize),
        }
    }
}

/// True iff the robot disc touches an obstacle or is not fully inside the bounds.
///
/// Discs that merely touch count as colliding, and so does a disc tangent to the boundary.
pub fn check_collision(world: &WorldModel, pose: &Pose2<f64>, robot_radius: f64) -> bool {
    let position = pose.position;
    let b = &world.bounds;
    if position.x - robot_radius <= b.min.x
        || position.x + robot_radius >= b.max.x
        || position.y - robot_radius <= b.min.y
        || position.y + robot_radius >= b.max.y
    {
        return true;
    }
    world
        .obstacles
        .iter()
        .any(|o| o.center.distance(position) <= o.radius + robot_radius)
}
