//! Two-pass 8-connected component labeling.

use super::union_find::UnionFind;
use crate::error::Error;
use crate::geometry::Vec2;
use crate::raster::{Cell, GridFrame};
use crate::scalar::Real;

/// Regions smaller than this many cells are dropped.
pub const DEFAULT_MIN_AREA: usize = 100;

/// One connected region. Cells are in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub cells: Vec<Cell>,
}

impl Region {
    pub fn area(&self) -> usize {
        self.cells.len()
    }

    /// Mean of the member cell centers.
    pub fn centroid(&self, frame: &GridFrame) -> Vec2<f64> {
        let mut sum = Vec2::zero();
        for &c in &self.cells {
            sum += frame.cell_center(c);
        }
        sum * (1.0 / self.cells.len().max(1) as f64)
    }
}

/// Labels `mask` (row-major, `width × height`) and returns regions of at least `min_area` cells,
/// ordered by their first cell in row-major order.
pub fn connected_components(mask: &[bool], width: usize, height: usize, min_area: usize) -> Vec<Region> {
    assert_eq!(mask.len(), width * height, "mask size does not match dimensions");
    const NONE: u32 = u32::MAX;
    let mut labels = vec![NONE; mask.len()];
    let mut uf = UnionFind::new(0);
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            if !mask[i] {
                continue;
            }
            // already-visited neighbours: W, NW, N, NE
            let mut found = NONE;
            let mut consider = |j: usize, labels: &[u32], uf: &mut UnionFind| {
                let l = labels[j];
                if l != NONE {
                    if found == NONE {
                        found = l;
                    } else {
                        uf.union(found as usize, l as usize);
                    }
                }
            };
            if c > 0 {
                consider(i - 1, &labels, &mut uf);
            }
            if r > 0 {
                let up = i - width;
                if c > 0 {
                    consider(up - 1, &labels, &mut uf);
                }
                consider(up, &labels, &mut uf);
                if c + 1 < width {
                    consider(up + 1, &labels, &mut uf);
                }
            }
            labels[i] = if found == NONE { uf.push() as u32 } else { found };
        }
    }

    let mut slot = vec![usize::MAX; uf.len()];
    let mut regions: Vec<Vec<Cell>> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l == NONE {
            continue;
        }
        let root = uf.find(l as usize);
        if slot[root] == usize::MAX {
            slot[root] = regions.len();
            regions.push(Vec::new());
        }
        regions[slot[root]].push(Cell::new((i % width) as i32, (i / width) as i32));
    }
    regions.into_iter().filter(|r| r.len() >= min_area).map(|cells| Region { cells }).collect()
}

/// Arithmetic mean of `points`.
pub fn region_centroid<S: Real>(points: &[Vec2<S>]) -> Result<Vec2<S>, Error> {
    if points.is_empty() {
        return Err(Error::InvalidInput("centroid of an empty region".into()));
    }
    let mut sum = Vec2::zero();
    for &p in points {
        sum += p;
    }
    Ok(sum * (S::one() / S::lit(points.len() as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(mask: &mut [bool], width: usize, c0: usize, r0: usize, w: usize, h: usize) {
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                mask[r * width + c] = true;
            }
        }
    }

    #[test]
    fn empty_mask() {
        assert!(connected_components(&[false; 64], 8, 8, 1).is_empty());
    }

    #[test]
    fn two_blobs_and_threshold() {
        let mut m = vec![false; 40 * 40];
        blob(&mut m, 40, 0, 0, 15, 10);
        blob(&mut m, 40, 20, 20, 10, 15);
        let regions = connected_components(&m, 40, 40, DEFAULT_MIN_AREA);
        assert_eq!(regions.len(), 2);
        assert!(regions.iter().all(|r| r.area() == 150));

        let mut small = vec![false; 40 * 40];
        blob(&mut small, 40, 0, 0, 11, 9);
        assert_eq!(connected_components(&small, 40, 40, 100).len(), 0);
        assert_eq!(connected_components(&small, 40, 40, 99).len(), 1);
    }

    #[test]
    fn diagonal_touch_joins() {
        let mut m = vec![false; 9];
        m[0] = true;
        m[4] = true;
        m[2] = true;
        m[6] = true;
        assert_eq!(connected_components(&m, 3, 3, 1).len(), 1);
    }

    #[test]
    fn u_shape_merges_labels() {
        // two arms that only join at the bottom row
        let w = 5;
        let rows = ["X...X", "X...X", "XXXXX"];
        let m: Vec<bool> = rows.iter().flat_map(|r| r.bytes().map(|b| b == b'X')).collect();
        let regions = connected_components(&m, w, 3, 1);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].area(), 9);
    }

    #[test]
    fn centroids() {
        let p = |x: f64, y: f64| Vec2::new(x, y);
        assert_eq!(region_centroid(&[p(3.0, 4.0)]).unwrap(), p(3.0, 4.0));
        assert_eq!(region_centroid(&[p(0.0, 0.0), p(2.0, 0.0)]).unwrap(), p(1.0, 0.0));
        let block: Vec<_> = (4..7).flat_map(|x| (4..7).map(move |y| p(x as f64, y as f64))).collect();
        assert_eq!(region_centroid(&block).unwrap(), p(5.0, 5.0));
        assert!(region_centroid::<f64>(&[]).is_err());
        let f: Vec<Vec2<f32>> = vec![Vec2::new(1.0, 1.0), Vec2::new(2.0, 3.0)];
        assert_eq!(region_centroid(&f).unwrap(), Vec2::new(1.5, 2.0));
    }
}
