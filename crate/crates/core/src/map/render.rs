//! Raster rendering of the occupancy grid with planning overlays.
//!
//! Palette (RGB, exact):
//!
//! | element            | color          |
//! |--------------------|----------------|
//! | unknown            | 255, 255, 255  |
//! | explored free      | 160, 160, 160  |
//! | obstacle           |   0,   0,   0  |
//! | target             |   0, 200,   0  |
//! | centroid dot       | 255, 140,   0  |
//! | chain edge         |   0,   0, 255  |
//! | robot, +X arrow    | 255,   0,   0  |
//! | +Y arrow           |   0,   0, 255  |
//! | trajectory         | 255, 255,   0  |
//! | centroid label     |  40,  40,  40  |

use std::path::Path;

use image::{Rgb, RgbImage};

use super::grid::{CellClass, OccupancyGrid};
use crate::error::Error;
use crate::geometry::Pose2;
use crate::raster::{Cell, Point};

pub const UNKNOWN: Rgb<u8> = Rgb([255, 255, 255]);
pub const FREE: Rgb<u8> = Rgb([160, 160, 160]);
pub const OBSTACLE: Rgb<u8> = Rgb([0, 0, 0]);
pub const TARGET: Rgb<u8> = Rgb([0, 200, 0]);
pub const CENTROID: Rgb<u8> = Rgb([255, 140, 0]);
pub const CHAIN_EDGE: Rgb<u8> = Rgb([0, 0, 255]);
pub const ROBOT: Rgb<u8> = Rgb([255, 0, 0]);
pub const LEFT_AXIS: Rgb<u8> = Rgb([0, 0, 255]);
pub const TRAJECTORY: Rgb<u8> = Rgb([255, 255, 0]);
pub const LABEL: Rgb<u8> = Rgb([40, 40, 40]);

#[derive(Debug, Clone, Default)]
pub struct MapOverlay {
    pub robot: Option<Pose2<f64>>,
    pub trajectory: Vec<Point>,
    /// Centroids in chain order; dot `k` is labeled `k`.
    pub chain: Vec<Point>,
}

const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b001, 0b001, 0b001],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

struct Canvas {
    img: RgbImage,
}

impl Canvas {
    fn put(&mut self, x: i64, y: i64, c: Rgb<u8>) {
        if x >= 0 && y >= 0 && (x as u32) < self.img.width() && (y as u32) < self.img.height() {
            self.img.put_pixel(x as u32, y as u32, c);
        }
    }

    fn line(&mut self, a: (i64, i64), b: (i64, i64), c: Rgb<u8>) {
        let (mut x, mut y) = a;
        let dx = (b.0 - a.0).abs();
        let dy = -(b.1 - a.1).abs();
        let sx = if a.0 < b.0 { 1 } else { -1 };
        let sy = if a.1 < b.1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.put(x, y, c);
            if (x, y) == b {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    fn disc(&mut self, center: (i64, i64), radius: i64, c: Rgb<u8>) {
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if dx * dx + dy * dy <= radius * radius {
                    self.put(center.0 + dx, center.1 + dy, c);
                }
            }
        }
    }

    fn text(&mut self, at: (i64, i64), s: &str, px: i64, c: Rgb<u8>) {
        let mut x0 = at.0;
        for ch in s.chars() {
            if let Some(d) = ch.to_digit(10) {
                for (row, bits) in DIGITS[d as usize].iter().enumerate() {
                    for col in 0..3 {
                        if bits & (0b100 >> col) != 0 {
                            for yy in 0..px {
                                for xx in 0..px {
                                    self.put(x0 + col * px + xx, at.1 + row as i64 * px + yy, c);
                                }
                            }
                        }
                    }
                }
            }
            x0 += 4 * px;
        }
    }
}

/// Renders `grid` at `scale` pixels per cell (`scale ≥ 1`). North (+y) is up.
pub fn render_map(grid: &OccupancyGrid, overlay: &MapOverlay, scale: u32) -> RgbImage {
    let scale = scale.max(1);
    let (w, h) = (grid.width() as u32, grid.height() as u32);
    let mut img = RgbImage::new(w * scale, h * scale);
    for row in 0..h {
        for col in 0..w {
            let class = grid.class(Cell::new(col as i32, row as i32)).unwrap_or_default();
            let color = match class {
                CellClass::Unknown => UNKNOWN,
                CellClass::Free => FREE,
                CellClass::Obstacle => OBSTACLE,
                CellClass::Target => TARGET,
            };
            let y0 = (h - 1 - row) * scale;
            for dy in 0..scale {
                for dx in 0..scale {
                    img.put_pixel(col * scale + dx, y0 + dy, color);
                }
            }
        }
    }
    let mut cv = Canvas { img };
    let s = scale as f64;
    let to_px = |p: Point| -> (i64, i64) {
        let (u, v) = grid.frame.to_lattice(p);
        ((u * s).floor() as i64, ((h as f64 - v) * s).floor() as i64)
    };
    for w in overlay.trajectory.windows(2) {
        cv.line(to_px(w[0]), to_px(w[1]), TRAJECTORY);
    }
    for w in overlay.chain.windows(2) {
        cv.line(to_px(w[0]), to_px(w[1]), CHAIN_EDGE);
    }
    let dot = (scale as i64 + 1).max(2);
    for (k, &c) in overlay.chain.iter().enumerate() {
        let p = to_px(c);
        cv.disc(p, dot, CENTROID);
        cv.text((p.0 + dot + 2, p.1 - dot - 5 * scale as i64), &k.to_string(), scale as i64, LABEL);
    }
    if let Some(pose) = overlay.robot {
        let p = to_px(pose.position);
        let arrow = 0.8;
        cv.line(p, to_px(pose.to_world(arrow, 0.0)), ROBOT);
        cv.line(p, to_px(pose.to_world(0.0, arrow)), LEFT_AXIS);
        cv.disc(p, dot, ROBOT);
    }
    cv.img
}

/// Writes the rendered map as a binary portable pixmap (P6).
pub fn export_map_image(grid: &OccupancyGrid, overlay: &MapOverlay, scale: u32, path: &Path) -> Result<(), Error> {
    let img = render_map(grid, overlay, scale);
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    let enc = image::codecs::pnm::PnmEncoder::new(&mut w)
        .with_subtype(image::codecs::pnm::PnmSubtype::Pixmap(image::codecs::pnm::SampleEncoding::Binary));
    use image::ImageEncoder;
    enc.write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)?;
    Ok(())
}

/// PNG bytes of an image, for planner attachments.
pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>, Error> {
    let mut out = Vec::new();
    img.write_to(&mut std::io::Cursor::new(&mut out), image::ImageFormat::Png)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::grid::IntegrateStats;
    use crate::raster::GridFrame;

    fn grid() -> OccupancyGrid {
        OccupancyGrid::new(GridFrame::covering(Point::zero(), 8.0, 6.0, 10.0))
    }

    fn blobs(img: &RgbImage, color: Rgb<u8>) -> usize {
        let (w, h) = img.dimensions();
        let mut seen = vec![false; (w * h) as usize];
        let mut n = 0;
        for y in 0..h {
            for x in 0..w {
                if seen[(y * w + x) as usize] || *img.get_pixel(x, y) != color {
                    continue;
                }
                n += 1;
                let mut stack = vec![(x, y)];
                seen[(y * w + x) as usize] = true;
                while let Some((cx, cy)) = stack.pop() {
                    for (dx, dy) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                        let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let i = (ny as u32 * w + nx as u32) as usize;
                        if !seen[i] && *img.get_pixel(nx as u32, ny as u32) == color {
                            seen[i] = true;
                            stack.push((nx as u32, ny as u32));
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn empty_grid_is_white() {
        let img = render_map(&grid(), &MapOverlay::default(), 2);
        assert_eq!(img.dimensions(), (160, 120));
        assert!(img.pixels().all(|p| *p == UNKNOWN));
    }

    #[test]
    fn one_obstacle_cell_is_one_black_block() {
        let mut g = grid();
        g.mark(Cell::new(5, 7), CellClass::Obstacle, &mut IntegrateStats::default());
        let scale = 3;
        let img = render_map(&g, &MapOverlay::default(), scale);
        let black: Vec<(u32, u32)> = img.enumerate_pixels().filter(|(_, _, p)| **p == OBSTACLE).map(|(x, y, _)| (x, y)).collect();
        assert_eq!(black.len(), 9);
        let y0 = (60 - 1 - 7) * scale;
        assert!(black.iter().all(|&(x, y)| (15..18).contains(&x) && (y0..y0 + 3).contains(&y)));
    }

    #[test]
    fn three_centroids_three_labeled_dots() {
        let overlay = MapOverlay {
            robot: None,
            trajectory: vec![],
            chain: vec![Point::new(-2.5, 0.0), Point::new(0.0, 1.0), Point::new(2.5, -1.0)],
        };
        let img = render_map(&grid(), &overlay, 2);
        assert_eq!(blobs(&img, CENTROID), 3);
        // glyph 1 is one connected stroke; 0 and 2 also render as single strokes
        assert_eq!(blobs(&img, LABEL), 3);
    }

    #[test]
    fn export_writes_ppm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.ppm");
        export_map_image(&grid(), &MapOverlay::default(), 1, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P6"));
        assert_eq!(bytes[bytes.len() - 3..], [255, 255, 255]);
        let bad = dir.path().join("missing").join("map.ppm");
        assert!(matches!(export_map_image(&grid(), &MapOverlay::default(), 1, &bad), Err(Error::Io(_))));
    }
}
