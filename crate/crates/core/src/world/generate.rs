use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{spine_template, Bounds, Obstacle, TargetCluster, Topology, WorldModel};
use crate::raster::{Cell, GridFrame, Point};

/// Knobs of the procedural layout. Cluster and obstacle counts follow from these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateParams {
    /// Cells per meter of the cluster raster.
    pub resolution: f64,
    /// Range of the per-world mean arc spacing between cluster centers.
    pub cluster_spacing: (f64, f64),
    /// Range of the base blob radius.
    pub cluster_radius: (f64, f64),
    pub lateral_jitter: f64,
    pub min_cluster_cells: usize,
    /// Obstacles scattered ahead of the start pose.
    pub start_obstacles: usize,
    /// Forward depth of the start region.
    pub start_region_depth: f64,
    /// Half width of the start region.
    pub start_region_half_width: f64,
    /// Free distance between the start position and any obstacle surface.
    pub start_clearance: f64,
    /// Chance of an obstacle beside each consecutive cluster pair.
    pub interspersed_probability: f64,
    pub interspersed_offset: (f64, f64),
    pub obstacle_radius: (f64, f64),
    /// Minimum surface-to-surface gap between obstacles.
    pub min_obstacle_gap: f64,
    /// Minimum distance from an obstacle surface to any target cell center.
    pub cluster_clearance: f64,
    /// Minimum distance from an obstacle surface to the world boundary.
    pub boundary_margin: f64,
}

impl Default for GenerateParams {
    fn default() -> Self {
        Self {
            resolution: 10.0,
            cluster_spacing: (2.9, 3.6),
            cluster_radius: (0.7, 1.0),
            lateral_jitter: 0.3,
            min_cluster_cells: 150,
            start_obstacles: 7,
            start_region_depth: 6.0,
            start_region_half_width: 4.0,
            start_clearance: 1.5,
            interspersed_probability: 0.6,
            interspersed_offset: (1.5, 2.3),
            obstacle_radius: (0.2, 0.45),
            min_obstacle_gap: 1.2,
            cluster_clearance: 0.35,
            boundary_margin: 0.9,
        }
    }
}

/// Procedural reef with default parameters. Sizes are clamped to `[20, 30]` m.
pub fn generate_world(topology: Topology, size: f64, seed: u64) -> WorldModel {
    generate_world_with(topology, size, seed, &GenerateParams::default())
}

fn mix_seed(topology: Topology, size: f64, seed: u64) -> u64 {
    let t = Topology::ALL.iter().position(|&x| x == topology).unwrap_or(0) as u64;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (t << 56) ^ size.to_bits().rotate_left(17)
}

fn point_on(line: &[Point], s: f64) -> Option<(Point, Point)> {
    let mut rest = s;
    for w in line.windows(2) {
        let seg = w[1] - w[0];
        let len = seg.norm();
        if len <= 0.0 {
            continue;
        }
        if rest <= len {
            let dir = seg * (1.0 / len);
            return Some((w[0] + dir * rest, dir));
        }
        rest -= len;
    }
    None
}

pub fn generate_world_with(topology: Topology, size: f64, seed: u64, params: &GenerateParams) -> WorldModel {
    let size = size.clamp(20.0, 30.0);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(topology, size, seed));
    let bounds = Bounds::centered(size);
    let (spine, start) = spine_template(topology, &bounds);
    let frame = GridFrame::covering(bounds.center(), size, size, params.resolution);

    // Cells already claimed by a cluster, dilated so neighbouring blobs stay separate.
    let mut claimed = vec![false; frame.len()];
    let mut clusters: Vec<TargetCluster> = Vec::new();
    let mut link_points: Vec<(Point, Point)> = Vec::new();

    let mean_spacing = rng.random_range(params.cluster_spacing.0..=params.cluster_spacing.1);
    for (li, line) in spine.polylines.iter().enumerate() {
        let closed = line.first() == line.last() && line.len() > 2;
        let length = crate::geometry::path_length(line);
        let mut s = if li == 0 { 0.5 * mean_spacing } else { 0.9 * mean_spacing };
        let mut prev_center: Option<Point> = None;
        while s <= length - if closed { 0.5 * mean_spacing } else { 0.0 } {
            let Some((on_spine, tangent)) = point_on(line, s) else { break };
            let normal = tangent.perp();
            let center = on_spine + normal * rng.random_range(-params.lateral_jitter..=params.lateral_jitter);
            let radius = rng.random_range(params.cluster_radius.0..=params.cluster_radius.1);
            // phase ranges stay at 6.28 so generated worlds keep their seeds
            #[allow(clippy::approx_constant)]
            let harmonics: [(f64, f64); 2] =
                [(rng.random_range(0.0..0.15), rng.random_range(0.0..6.28)), (rng.random_range(0.0..0.1), rng.random_range(0.0..6.28))];
            s += mean_spacing + rng.random_range(-0.3..=0.3);
            if center.distance(start.position) < radius + 1.0 {
                continue;
            }
            let cells = blob_cells(&frame, &bounds, center, radius, &harmonics, &claimed);
            if cells.len() < params.min_cluster_cells {
                continue;
            }
            for &c in &cells {
                for dr in -3..=3 {
                    for dc in -3..=3 {
                        let n = Cell::new(c.col + dc, c.row + dr);
                        if frame.contains(n) {
                            claimed[frame.index(n)] = true;
                        }
                    }
                }
            }
            let cluster = TargetCluster::from_cells(clusters.len() as u32, cells, &frame);
            if let Some(p) = prev_center {
                link_points.push((p, cluster.centroid_gt));
            }
            prev_center = Some(cluster.centroid_gt);
            clusters.push(cluster);
        }
    }

    let mut world = WorldModel {
        bounds,
        topology,
        resolution: params.resolution,
        clusters,
        obstacles: Vec::new(),
        start,
        spine,
        seed,
    };
    place_obstacles(&mut world, &frame, &link_points, params, &mut rng);
    world
}

fn blob_cells(
    frame: &GridFrame,
    bounds: &Bounds,
    center: Point,
    radius: f64,
    harmonics: &[(f64, f64); 2],
    claimed: &[bool],
) -> Vec<Cell> {
    let reach = radius * 1.3;
    let lo = frame.cell_unchecked(center - Point::new(reach, reach));
    let hi = frame.cell_unchecked(center + Point::new(reach, reach));
    let inner = Bounds { min: bounds.min + Point::new(1.0, 1.0), max: bounds.max - Point::new(1.0, 1.0) };
    let mut inside = std::collections::HashSet::new();
    for row in lo.row..=hi.row {
        for col in lo.col..=hi.col {
            let c = Cell::new(col, row);
            if !frame.contains(c) || claimed[frame.index(c)] {
                continue;
            }
            let p = frame.cell_center(c);
            if !inner.contains(p) {
                continue;
            }
            let d = p - center;
            let phi = d.y.atan2(d.x);
            let r = radius
                * (1.0 + harmonics[0].0 * (phi + harmonics[0].1).cos() + harmonics[1].0 * (2.0 * phi + harmonics[1].1).cos());
            if d.norm() <= r {
                inside.insert(c);
            }
        }
    }
    // Keep the 8-connected piece holding the cell nearest the center.
    let Some(&seed) = inside.iter().min_by(|a, b| {
        frame.cell_center(**a).distance(center).total_cmp(&frame.cell_center(**b).distance(center)).then(a.cmp(b))
    }) else {
        return Vec::new();
    };
    let mut out = vec![seed];
    let mut stack = vec![seed];
    inside.remove(&seed);
    while let Some(c) = stack.pop() {
        for dr in -1..=1 {
            for dc in -1..=1 {
                let n = Cell::new(c.col + dc, c.row + dr);
                if inside.remove(&n) {
                    out.push(n);
                    stack.push(n);
                }
            }
        }
    }
    out.sort();
    out
}

fn place_obstacles(
    world: &mut WorldModel,
    frame: &GridFrame,
    link_points: &[(Point, Point)],
    params: &GenerateParams,
    rng: &mut ChaCha8Rng,
) {
    let raster = world.target_raster();
    let start = world.start;
    let bounds = world.bounds;
    let fits = |cand: &Obstacle, placed: &[Obstacle]| -> bool {
        let (c, r) = (cand.center, cand.radius);
        let m = r + params.boundary_margin;
        if c.x - m < bounds.min.x || c.x + m > bounds.max.x || c.y - m < bounds.min.y || c.y + m > bounds.max.y {
            return false;
        }
        if c.distance(start.position) < r + params.start_clearance {
            return false;
        }
        if placed.iter().any(|o| o.center.distance(c) < o.radius + r + params.min_obstacle_gap) {
            return false;
        }
        let reach = r + params.cluster_clearance;
        let lo = frame.cell_unchecked(c - Point::new(reach, reach));
        let hi = frame.cell_unchecked(c + Point::new(reach, reach));
        for row in lo.row..=hi.row {
            for col in lo.col..=hi.col {
                let cell = Cell::new(col, row);
                if raster.cluster_at(cell).is_some() && frame.cell_center(cell).distance(c) < reach {
                    return false;
                }
            }
        }
        true
    };

    let mut placed: Vec<Obstacle> = Vec::new();
    let mut attempts = 0;
    while placed.len() < params.start_obstacles && attempts < 400 {
        attempts += 1;
        let fwd = rng.random_range(params.start_clearance..params.start_region_depth);
        let lat = rng.random_range(-params.start_region_half_width..params.start_region_half_width);
        let cand = Obstacle {
            center: start.to_world(fwd, lat),
            radius: rng.random_range(params.obstacle_radius.0..=params.obstacle_radius.1),
        };
        if fits(&cand, &placed) {
            placed.push(cand);
        }
    }

    for &(a, b) in link_points {
        if rng.random::<f64>() >= params.interspersed_probability {
            continue;
        }
        let Some(dir) = (b - a).normalized() else { continue };
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        for _ in 0..20 {
            let offset = rng.random_range(params.interspersed_offset.0..=params.interspersed_offset.1);
            let along = rng.random_range(0.35..0.65);
            let cand = Obstacle {
                center: a.lerp(b, along) + dir.perp() * (side * offset),
                radius: rng.random_range(params.obstacle_radius.0..=params.obstacle_radius.1),
            };
            if fits(&cand, &placed) {
                placed.push(cand);
                break;
            }
        }
    }
    world.obstacles = placed;
}
