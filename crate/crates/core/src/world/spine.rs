use serde::{Deserialize, Serialize};

use super::{Bounds, Topology};
use crate::geometry::{path_length, Pose2};
use crate::raster::Point;

/// Cluster backbone: one or more polylines. Closed layouts repeat the first vertex at the end.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Spine {
    pub polylines: Vec<Vec<Point>>,
}

impl Spine {
    pub fn length(&self) -> f64 {
        self.polylines.iter().map(|p| path_length(p)).sum()
    }

    /// Distinct vertices (coincident endpoints merged) and their degrees in the spine graph.
    pub fn vertex_degrees(&self) -> Vec<(Point, usize)> {
        let mut verts: Vec<(Point, usize)> = Vec::new();
        let id_of = |p: Point, verts: &mut Vec<(Point, usize)>| -> usize {
            match verts.iter().position(|(q, _)| q.distance(p) < 1e-9) {
                Some(i) => i,
                None => {
                    verts.push((p, 0));
                    verts.len() - 1
                }
            }
        };
        for line in &self.polylines {
            for w in line.windows(2) {
                let a = id_of(w[0], &mut verts);
                let b = id_of(w[1], &mut verts);
                if a != b {
                    verts[a].1 += 1;
                    verts[b].1 += 1;
                }
            }
        }
        verts
    }
}

struct Template {
    polylines: &'static [&'static [(f64, f64)]],
    start: (f64, f64, f64),
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

// Unit-square coordinates; (0, 0) is the lower-left corner of the world.
const L_SHAPE: Template = Template {
    polylines: &[&[(0.5, 0.18), (0.5, 0.8), (0.88, 0.8)]],
    start: (0.5, 0.08, HALF_PI),
};
const S_SHAPE: Template = Template {
    polylines: &[&[(0.5, 0.18), (0.78, 0.3), (0.78, 0.45), (0.22, 0.6), (0.22, 0.75), (0.5, 0.88)]],
    start: (0.5, 0.08, HALF_PI),
};
const K_SHAPE: Template = Template {
    polylines: &[
        &[(0.5, 0.18), (0.5, 0.5), (0.5, 0.88)],
        &[(0.5, 0.5), (0.18, 0.86)],
        &[(0.5, 0.5), (0.82, 0.86)],
    ],
    start: (0.5, 0.08, HALF_PI),
};
const E_SHAPE: Template = Template {
    polylines: &[
        &[(0.84, 0.15), (0.2, 0.15), (0.2, 0.5), (0.2, 0.85), (0.84, 0.85)],
        &[(0.2, 0.5), (0.84, 0.5)],
    ],
    start: (0.93, 0.15, std::f64::consts::PI),
};
const O_SHAPE: Template = Template {
    polylines: &[&[(0.5, 0.15), (0.85, 0.15), (0.85, 0.85), (0.15, 0.85), (0.15, 0.15), (0.5, 0.15)]],
    start: (0.3, 0.15, 0.0),
};

fn template(t: Topology) -> &'static Template {
    match t {
        Topology::L => &L_SHAPE,
        Topology::S => &S_SHAPE,
        Topology::K => &K_SHAPE,
        Topology::E => &E_SHAPE,
        Topology::O => &O_SHAPE,
    }
}

/// Fixed backbone and start pose of a topology class, scaled to `bounds`.
pub fn spine_template(topology: Topology, bounds: &Bounds) -> (Spine, Pose2<f64>) {
    let tpl = template(topology);
    let map = |(u, v): (f64, f64)| {
        Point::new(bounds.min.x + u * bounds.width(), bounds.min.y + v * bounds.height())
    };
    let polylines = tpl.polylines.iter().map(|l| l.iter().copied().map(map).collect()).collect();
    let (su, sv, heading) = tpl.start;
    let s = map((su, sv));
    (Spine { polylines }, Pose2::new(s.x, s.y, heading))
}
