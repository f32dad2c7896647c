//! Cell indexing shared by the ground-truth world raster and the occupancy grid.
//!
//! A [`GridFrame`] is a `width × height` lattice of square cells centered on `origin`.
//! Column index grows with world `x`, row index grows with world `y`.

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

pub type Point = Vec2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: i32,
    pub row: i32,
}

impl Cell {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridFrame {
    /// Cells per meter.
    pub resolution: f64,
    /// World point at the geometric center of the lattice.
    pub origin: Point,
    pub width: usize,
    pub height: usize,
}

impl GridFrame {
    /// Lattice covering a `size_x × size_y` meter rectangle centered on `origin`.
    pub fn covering(origin: Point, size_x: f64, size_y: f64, resolution: f64) -> Self {
        Self {
            resolution,
            origin,
            width: (size_x * resolution).round().max(1.0) as usize,
            height: (size_y * resolution).round().max(1.0) as usize,
        }
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        1.0 / self.resolution
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// World coordinates of the lattice's lower-left corner.
    #[inline]
    pub fn min_corner(&self) -> Point {
        Point::new(
            self.origin.x - self.width as f64 / (2.0 * self.resolution),
            self.origin.y - self.height as f64 / (2.0 * self.resolution),
        )
    }

    #[inline]
    pub fn max_corner(&self) -> Point {
        Point::new(
            self.origin.x + self.width as f64 / (2.0 * self.resolution),
            self.origin.y + self.height as f64 / (2.0 * self.resolution),
        )
    }

    /// Continuous lattice coordinates: cell `(c, r)` spans `[c, c+1) × [r, r+1)`.
    #[inline]
    pub fn to_lattice(&self, p: Point) -> (f64, f64) {
        let m = self.min_corner();
        ((p.x - m.x) * self.resolution, (p.y - m.y) * self.resolution)
    }

    /// Cell containing `p`, whether or not it lies inside the lattice.
    #[inline]
    pub fn cell_unchecked(&self, p: Point) -> Cell {
        let (u, v) = self.to_lattice(p);
        Cell::new(u.floor() as i32, v.floor() as i32)
    }

    pub fn cell_of(&self, p: Point) -> Option<Cell> {
        let c = self.cell_unchecked(p);
        self.contains(c).then_some(c)
    }

    #[inline]
    pub fn contains(&self, c: Cell) -> bool {
        c.col >= 0 && c.row >= 0 && (c.col as usize) < self.width && (c.row as usize) < self.height
    }

    #[inline]
    pub fn cell_center(&self, c: Cell) -> Point {
        let m = self.min_corner();
        Point::new(
            m.x + (c.col as f64 + 0.5) / self.resolution,
            m.y + (c.row as f64 + 0.5) / self.resolution,
        )
    }

    /// Row-major linear index. Caller guarantees `contains(c)`.
    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.row as usize * self.width + c.col as usize
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i32, (index / self.width) as i32)
    }
}

/// One cell visited by a ray, with the ray parameters (meters) where it enters and leaves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySpan {
    pub cell: Cell,
    pub t_in: f64,
    pub t_out: f64,
}

impl RaySpan {
    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_in + self.t_out)
    }
}

/// Exact grid traversal (Amanatides–Woo) of the segment `origin + t·dir`, `t ∈ [0, t_max]`.
///
/// `dir` must be a unit vector. Every cell the segment passes through is yielded once, in
/// order, stepping one axis at a time so consecutive cells are 4-adjacent. Cells outside the
/// lattice are yielded too; callers filter with [`GridFrame::contains`].
pub fn traverse(frame: &GridFrame, origin: Point, dir: Point, t_max: f64) -> Traversal {
    let (u, v) = frame.to_lattice(origin);
    let cell = Cell::new(u.floor() as i32, v.floor() as i32);
    let res = frame.resolution;
    let axis = |pos: f64, d: f64, c: i32| -> (i32, f64, f64) {
        if d > 0.0 {
            (1, ((c as f64 + 1.0 - pos) / res) / d, 1.0 / (res * d))
        } else if d < 0.0 {
            (-1, ((pos - c as f64) / res) / -d, 1.0 / (res * -d))
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, next_x, delta_x) = axis(u, dir.x, cell.col);
    let (step_y, next_y, delta_y) = axis(v, dir.y, cell.row);
    Traversal {
        cell,
        t: 0.0,
        t_max: t_max.max(0.0),
        step_x,
        step_y,
        next_x,
        next_y,
        delta_x,
        delta_y,
        done: false,
    }
}

#[derive(Debug, Clone)]
pub struct Traversal {
    cell: Cell,
    t: f64,
    t_max: f64,
    step_x: i32,
    step_y: i32,
    next_x: f64,
    next_y: f64,
    delta_x: f64,
    delta_y: f64,
    done: bool,
}

impl Iterator for Traversal {
    type Item = RaySpan;

    fn next(&mut self) -> Option<RaySpan> {
        if self.done {
            return None;
        }
        let exit = self.next_x.min(self.next_y);
        if exit >= self.t_max {
            self.done = true;
            return Some(RaySpan { cell: self.cell, t_in: self.t, t_out: self.t_max });
        }
        let span = RaySpan { cell: self.cell, t_in: self.t, t_out: exit };
        self.t = exit;
        if self.next_x <= self.next_y {
            self.cell.col += self.step_x;
            self.next_x += self.delta_x;
        } else {
            self.cell.row += self.step_y;
            self.next_y += self.delta_y;
        }
        Some(span)
    }
}
