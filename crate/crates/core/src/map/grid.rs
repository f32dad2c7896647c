use serde::{Deserialize, Serialize};

use super::camera::CameraModel;
use crate::error::Error;
use crate::raster::{traverse, Cell, GridFrame, Point};
use crate::world::{Label, SensorFrame};

/// Cell class, ordered by update priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[repr(u8)]
pub enum CellClass {
    #[default]
    Unknown = 0,
    Free = 1,
    Obstacle = 2,
    Target = 3,
}

/// Counts of cells that changed during one integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntegrateStats {
    pub newly_explored: usize,
    pub new_targets: usize,
    pub new_obstacles: usize,
}

/// Persistent class map plus explored mask.
///
/// Updates only ever raise a cell's class (`Target > Obstacle > Free > Unknown`) and only ever
/// set explored bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub frame: GridFrame,
    cells: Vec<CellClass>,
    explored: Vec<bool>,
    explored_count: usize,
    target_count: usize,
    obstacle_count: usize,
}

impl OccupancyGrid {
    pub fn new(frame: GridFrame) -> Self {
        Self {
            frame,
            cells: vec![CellClass::Unknown; frame.len()],
            explored: vec![false; frame.len()],
            explored_count: 0,
            target_count: 0,
            obstacle_count: 0,
        }
    }

    pub(crate) fn from_parts(frame: GridFrame, cells: Vec<CellClass>, explored: Vec<bool>) -> Self {
        let mut g = Self::new(frame);
        g.cells = cells;
        g.explored = explored;
        g.explored_count = g.explored.iter().filter(|&&e| e).count();
        g.target_count = g.cells.iter().filter(|&&c| c == CellClass::Target).count();
        g.obstacle_count = g.cells.iter().filter(|&&c| c == CellClass::Obstacle).count();
        g
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.frame.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.frame.height
    }

    pub fn class(&self, c: Cell) -> Option<CellClass> {
        self.frame.contains(c).then(|| self.cells[self.frame.index(c)])
    }

    pub fn is_explored(&self, c: Cell) -> bool {
        self.frame.contains(c) && self.explored[self.frame.index(c)]
    }

    pub fn classes(&self) -> &[CellClass] {
        &self.cells
    }

    pub fn explored_mask(&self) -> &[bool] {
        &self.explored
    }

    pub fn explored_count(&self) -> usize {
        self.explored_count
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    pub fn obstacle_count(&self) -> usize {
        self.obstacle_count
    }

    /// Row-major mask of target cells.
    pub fn target_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|&c| c == CellClass::Target).collect()
    }

    /// Raises `c` to at least `class` and marks it explored. Cells outside the grid are ignored.
    pub fn mark(&mut self, c: Cell, class: CellClass, stats: &mut IntegrateStats) {
        if !self.frame.contains(c) {
            return;
        }
        let i = self.frame.index(c);
        if !self.explored[i] {
            self.explored[i] = true;
            self.explored_count += 1;
            stats.newly_explored += 1;
        }
        let old = self.cells[i];
        if class > old {
            self.cells[i] = class;
            match old {
                CellClass::Target => self.target_count -= 1,
                CellClass::Obstacle => self.obstacle_count -= 1,
                _ => {}
            }
            match class {
                CellClass::Target => {
                    self.target_count += 1;
                    stats.new_targets += 1;
                }
                CellClass::Obstacle => {
                    self.obstacle_count += 1;
                    stats.new_obstacles += 1;
                }
                _ => {}
            }
        }
    }

    pub fn world_to_pixel(&self, p: Point) -> Result<Cell, Error> {
        self.frame.cell_of(p).ok_or(Error::OutOfGrid { x: p.x, y: p.y })
    }

    pub fn pixel_to_world(&self, c: Cell) -> Result<Point, Error> {
        if self.frame.contains(c) {
            Ok(self.frame.cell_center(c))
        } else {
            Err(Error::OutOfGrid { x: c.col as f64, y: c.row as f64 })
        }
    }

    /// Fuses one scanline frame.
    ///
    /// Per ray: every cell the ray crosses before its end point becomes at least free and
    /// explored; the cell at the hit takes the hit's class. Frames that carry seafloor returns
    /// additionally mark target cells along the unobstructed part of the ray.
    pub fn integrate_frame(&mut self, frame: &SensorFrame, cam: &CameraModel<f64>) -> IntegrateStats {
        let mut stats = IntegrateStats::default();
        let origin = Point::new(cam.camera_to_world.translation[0], cam.camera_to_world.translation[1]);
        for i in 0..frame.width() {
            let offset = frame.config.ray_offset(i);
            let dir = ray_direction(cam, frame, i, offset, origin);
            let (extent, hit) = match frame.floor.get(i) {
                Some(fl) => (fl.extent, fl.obstacle.then_some(CellClass::Obstacle)),
                None => {
                    let d = frame.depth[i];
                    match frame.label[i] {
                        Label::Obstacle if d.is_finite() => (d, Some(CellClass::Obstacle)),
                        Label::Target if d.is_finite() => (d, Some(CellClass::Target)),
                        _ => (frame.config.d_max, None),
                    }
                }
            };
            let extent = extent.min(frame.config.d_max);
            let hit_cell = hit.map(|_| {
                let p = hit_point(cam, offset, extent).unwrap_or(origin + dir * extent);
                self.frame.cell_unchecked(p + dir * 1e-9)
            });
            let floor = frame.floor.get(i);
            for span in traverse(&self.frame, origin, dir, extent) {
                if Some(span.cell) == hit_cell {
                    continue;
                }
                let class = match floor {
                    Some(fl) if in_spans(&fl.targets, span.midpoint()) => CellClass::Target,
                    _ => CellClass::Free,
                };
                self.mark(span.cell, class, &mut stats);
            }
            if let (Some(c), Some(class)) = (hit_cell, hit) {
                self.mark(c, class, &mut stats);
            }
        }
        stats
    }
}

fn in_spans(spans: &[(f64, f64)], t: f64) -> bool {
    spans.iter().any(|&(a, b)| t >= a && t <= b)
}

/// World point at range `r` along the ray at `offset`, through the camera model.
fn hit_point(cam: &CameraModel<f64>, offset: f64, r: f64) -> Option<Point> {
    let c = offset.cos();
    if c < 1e-3 || r <= 0.0 {
        return None;
    }
    cam.backproject(cam.column_for_offset(offset), cam.cy, r * c).ok().map(|p| Point::new(p[0], p[1]))
}

fn ray_direction(cam: &CameraModel<f64>, frame: &SensorFrame, i: usize, offset: f64, origin: Point) -> Point {
    hit_point(cam, offset, 1.0)
        .and_then(|p| (p - origin).normalized())
        .unwrap_or_else(|| Point::from_angle(frame.bearing(i)))
}
