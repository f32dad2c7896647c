//! Obstacle clearance lookup for rollouts.

use crate::geometry::Vec2;
use crate::map::{CellClass, OccupancyGrid};
use crate::raster::{Cell, GridFrame, Point};
use crate::scalar::Real;

/// Exact Euclidean distance from every cell center to the nearest obstacle cell center,
/// treating everything outside the grid as obstacle.
#[derive(Debug, Clone)]
pub struct ObstacleField {
    frame: GridFrame,
    /// Meters, row-major.
    dist: Vec<f32>,
}

impl ObstacleField {
    pub fn from_grid(grid: &OccupancyGrid) -> Self {
        let obstacles: Vec<bool> = grid.classes().iter().map(|&c| c == CellClass::Obstacle).collect();
        Self::from_mask(grid.frame, &obstacles)
    }

    /// Field over an arbitrary obstacle mask (row-major over `frame`).
    pub fn from_mask(frame: GridFrame, obstacles: &[bool]) -> Self {
        let (w, h) = (frame.width, frame.height);
        let (pw, ph) = (w + 2, h + 2);
        const INF: f64 = 1e20;
        let mut f = vec![INF; pw * ph];
        for r in 0..ph {
            for c in 0..pw {
                let border = r == 0 || c == 0 || r == ph - 1 || c == pw - 1;
                if border || obstacles[(r - 1) * w + (c - 1)] {
                    f[r * pw + c] = 0.0;
                }
            }
        }
        let mut line = vec![0.0; pw.max(ph)];
        let mut out = vec![0.0; pw.max(ph)];
        for c in 0..pw {
            for r in 0..ph {
                line[r] = f[r * pw + c];
            }
            edt_1d(&line[..ph], &mut out[..ph]);
            for r in 0..ph {
                f[r * pw + c] = out[r];
            }
        }
        for r in 0..ph {
            edt_1d(&f[r * pw..(r + 1) * pw], &mut out[..pw]);
            f[r * pw..(r + 1) * pw].copy_from_slice(&out[..pw]);
        }
        let cell = frame.cell_size();
        let mut dist = Vec::with_capacity(w * h);
        for r in 1..=h {
            for c in 1..=w {
                dist.push((f[r * pw + c].sqrt() * cell) as f32);
            }
        }
        Self { frame, dist }
    }

    pub fn frame(&self) -> &GridFrame {
        &self.frame
    }

    /// Clearance of the cell containing `p`; zero outside the grid.
    pub fn clearance<S: Real>(&self, p: Vec2<S>) -> S {
        match self.frame.cell_of(Point::new(p.x.as_f64(), p.y.as_f64())) {
            Some(c) => S::lit(self.dist[self.frame.index(c)] as f64),
            None => S::zero(),
        }
    }

    pub fn clearance_at(&self, c: Cell) -> Option<f64> {
        self.frame.contains(c).then(|| self.dist[self.frame.index(c)] as f64)
    }

    /// True if `p` lies within `inflation` meters of an obstacle cell (or off the grid).
    pub fn blocked<S: Real>(&self, p: Vec2<S>, inflation: S) -> bool {
        self.clearance(p) <= inflation
    }
}

/// 1-D squared distance transform (lower envelope of parabolas).
fn edt_1d(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sect = |q: usize, p: usize| ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
    for q in 1..n {
        let mut s = sect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = sect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *out = (q as f64 - p as f64).powi(2) + f[p];
    }
}
