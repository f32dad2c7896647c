//! Horizontal scanline camera rendered from ground truth.
//!
//! Each ray reports the first obstacle or target cell it meets (`depth`, `label`). Targets
//! lie on the seafloor and do not occlude, so each ray also carries a [`FloorReturn`]: the
//! intervals along the ray covered by target cells, up to the first obstacle or `d_max`.

use serde::{Deserialize, Serialize};

use super::{TargetRaster, WorldModel};
use crate::geometry::Pose2;
use crate::raster::{traverse, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Free,
    Obstacle,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorConfig {
    /// Horizontal field of view, radians.
    pub fov: f64,
    /// Maximum range, meters.
    pub d_max: f64,
    /// Number of rays.
    pub rays: usize,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { fov: 120f64.to_radians(), d_max: 4.0, rays: 120 }
    }
}

impl SensorConfig {
    /// Bearing offset of ray `i` relative to the heading; positive is to the left.
    #[inline]
    pub fn ray_offset(&self, i: usize) -> f64 {
        self.fov * (i as f64 / (self.rays - 1) as f64 - 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FloorReturn {
    /// Range (m) to which the ray is unobstructed: first obstacle hit or `d_max`.
    pub extent: f64,
    /// Whether `extent` is an obstacle hit.
    pub obstacle: bool,
    /// Disjoint, sorted `[near, far]` intervals over target cells.
    pub targets: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub pose: Pose2<f64>,
    pub config: SensorConfig,
    /// Range of the first hit, `f64::INFINITY` when nothing is hit within `d_max`.
    pub depth: Vec<f64>,
    pub label: Vec<Label>,
    /// Seafloor returns, one per ray. Empty for scanline-only frames.
    pub floor: Vec<FloorReturn>,
}

impl SensorFrame {
    pub fn width(&self) -> usize {
        self.depth.len()
    }

    /// World bearing of ray `i`.
    pub fn bearing(&self, i: usize) -> f64 {
        self.pose.heading + self.config.ray_offset(i)
    }

    pub fn hit_count(&self, label: Label) -> usize {
        self.label.iter().filter(|&&l| l == label).count()
    }
}

/// Ray/circle intersection: smallest `t > 0` with `|o + t·d − c| = r`.
fn ray_circle(o: Point, d: Point, c: Point, r: f64) -> Option<f64> {
    let m = o - c;
    let b = m.dot(d);
    let cc = m.norm_sq() - r * r;
    if cc > 0.0 && b > 0.0 {
        return None;
    }
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    Some(if t > 0.0 { t } else { 1e-9 })
}

/// Cached renderer over one world.
#[derive(Debug, Clone)]
pub struct Scanline<'a> {
    world: &'a WorldModel,
    raster: TargetRaster,
    pub config: SensorConfig,
}

impl<'a> Scanline<'a> {
    pub fn new(world: &'a WorldModel, config: SensorConfig) -> Self {
        Self { world, raster: world.target_raster(), config }
    }

    pub fn render(&self, pose: &Pose2<f64>) -> SensorFrame {
        let cfg = self.config;
        let n = cfg.rays;
        let mut depth = Vec::with_capacity(n);
        let mut label = Vec::with_capacity(n);
        let mut floor = Vec::with_capacity(n);
        let o = pose.position;
        for i in 0..n {
            let d = Point::from_angle(pose.heading + cfg.ray_offset(i));
            let t_obs = self
                .world
                .obstacles
                .iter()
                .filter_map(|ob| ray_circle(o, d, ob.center, ob.radius))
                .fold(f64::INFINITY, f64::min);
            let extent = t_obs.min(cfg.d_max);
            let mut first_target = f64::INFINITY;
            let mut spans: Vec<(f64, f64)> = Vec::new();
            for (k, span) in traverse(&self.raster.frame, o, d, extent).enumerate() {
                if self.raster.cluster_at(span.cell).is_none() {
                    continue;
                }
                if k > 0 && first_target.is_infinite() {
                    first_target = span.t_in;
                }
                match spans.last_mut() {
                    Some(last) if (last.1 - span.t_in).abs() < 1e-12 => last.1 = span.t_out,
                    _ => spans.push((span.t_in, span.t_out)),
                }
            }
            let (dep, lab) = if first_target < t_obs && first_target <= cfg.d_max {
                (first_target, Label::Target)
            } else if t_obs <= cfg.d_max {
                (t_obs, Label::Obstacle)
            } else {
                (f64::INFINITY, Label::Free)
            };
            depth.push(dep);
            label.push(lab);
            floor.push(FloorReturn { extent, obstacle: t_obs <= cfg.d_max, targets: spans });
        }
        SensorFrame { pose: *pose, config: cfg, depth, label, floor }
    }
}

/// One-shot rendering; prefer [`Scanline`] when rendering many frames of one world.
pub fn render_sensor(world: &WorldModel, pose: &Pose2<f64>, config: &SensorConfig) -> SensorFrame {
    Scanline::new(world, *config).render(pose)
}
