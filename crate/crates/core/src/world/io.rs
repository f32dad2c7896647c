//! Line-oriented world archive.
//!
//! ```text
//! reefnav-world v1
//! topology <L|S|K|E|O>
//! seed <u64>
//! resolution <cells per m>
//! bounds <min_x> <min_y> <max_x> <max_y>
//! start <x> <y> <heading>
//! spine <x0> <y0> <x1> <y1> ...        (one line per polyline)
//! obstacle <x> <y> <radius>            (one line per obstacle)
//! cell <cluster id> <col> <row>        (one line per cluster cell)
//! ```
//! Floats are written in shortest round-trip form, so parsing restores the world bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Bounds, Obstacle, Spine, TargetCluster, Topology, WorldModel};
use crate::error::FormatError;
use crate::geometry::Pose2;
use crate::raster::{Cell, GridFrame, Point};

pub const WORLD_HEADER: &str = "reefnav-world v1";

pub fn write_world(world: &WorldModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{WORLD_HEADER}");
    let _ = writeln!(out, "topology {}", world.topology);
    let _ = writeln!(out, "seed {}", world.seed);
    let _ = writeln!(out, "resolution {:?}", world.resolution);
    let b = &world.bounds;
    let _ = writeln!(out, "bounds {:?} {:?} {:?} {:?}", b.min.x, b.min.y, b.max.x, b.max.y);
    let s = &world.start;
    let _ = writeln!(out, "start {:?} {:?} {:?}", s.position.x, s.position.y, s.heading);
    for line in &world.spine.polylines {
        out.push_str("spine");
        for p in line {
            let _ = write!(out, " {:?} {:?}", p.x, p.y);
        }
        out.push('\n');
    }
    for o in &world.obstacles {
        let _ = writeln!(out, "obstacle {:?} {:?} {:?}", o.center.x, o.center.y, o.radius);
    }
    for cl in &world.clusters {
        for c in &cl.cells {
            let _ = writeln!(out, "cell {} {} {}", cl.id, c.col, c.row);
        }
    }
    out
}

fn nums<T: std::str::FromStr>(line: usize, fields: &[&str], n: Option<usize>) -> Result<Vec<T>, FormatError> {
    if let Some(n) = n {
        if fields.len() != n {
            return Err(FormatError::at(line, format!("expected {n} values, found {}", fields.len())));
        }
    }
    fields
        .iter()
        .map(|f| f.parse::<T>().map_err(|_| FormatError::at(line, format!("bad number {f:?}"))))
        .collect()
}

pub fn parse_world(text: &str) -> Result<WorldModel, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == WORLD_HEADER => {}
        Some((_, h)) => return Err(FormatError::at(1, format!("unsupported header {h:?}"))),
        None => return Err(FormatError::at(1, "empty world file")),
    }
    let mut topology = None;
    let mut seed = 0u64;
    let mut resolution = None;
    let mut bounds = None;
    let mut start = None;
    let mut spine = Spine::default();
    let mut obstacles = Vec::new();
    let mut cells: BTreeMap<u32, Vec<Cell>> = BTreeMap::new();
    for (i, raw) in lines {
        let ln = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut it = raw.split_whitespace();
        let key = it.next().unwrap_or_default();
        let rest: Vec<&str> = it.collect();
        match key {
            "topology" => {
                let t = rest.first().ok_or_else(|| FormatError::at(ln, "missing topology"))?;
                topology = Some(t.parse::<Topology>().map_err(|e| FormatError::at(ln, e))?);
            }
            "seed" => seed = nums::<u64>(ln, &rest, Some(1))?[0],
            "resolution" => resolution = Some(nums::<f64>(ln, &rest, Some(1))?[0]),
            "bounds" => {
                let v = nums::<f64>(ln, &rest, Some(4))?;
                bounds = Some(Bounds { min: Point::new(v[0], v[1]), max: Point::new(v[2], v[3]) });
            }
            "start" => {
                let v = nums::<f64>(ln, &rest, Some(3))?;
                start = Some(Pose2::new(v[0], v[1], v[2]));
            }
            "spine" => {
                let v = nums::<f64>(ln, &rest, None)?;
                if v.len() % 2 != 0 {
                    return Err(FormatError::at(ln, "odd coordinate count"));
                }
                spine.polylines.push(v.chunks(2).map(|c| Point::new(c[0], c[1])).collect());
            }
            "obstacle" => {
                let v = nums::<f64>(ln, &rest, Some(3))?;
                obstacles.push(Obstacle { center: Point::new(v[0], v[1]), radius: v[2] });
            }
            "cell" => {
                let v = nums::<i64>(ln, &rest, Some(3))?;
                let id = u32::try_from(v[0]).map_err(|_| FormatError::at(ln, "bad cluster id"))?;
                cells.entry(id).or_default().push(Cell::new(v[1] as i32, v[2] as i32));
            }
            other => return Err(FormatError::at(ln, format!("unknown record {other:?}"))),
        }
    }
    let bounds = bounds.ok_or_else(|| FormatError::at(0, "missing bounds"))?;
    let resolution = resolution.ok_or_else(|| FormatError::at(0, "missing resolution"))?;
    let frame = GridFrame::covering(bounds.center(), bounds.width(), bounds.height(), resolution);
    Ok(WorldModel {
        bounds,
        topology: topology.ok_or_else(|| FormatError::at(0, "missing topology"))?,
        resolution,
        clusters: cells.into_iter().map(|(id, c)| TargetCluster::from_cells(id, c, &frame)).collect(),
        obstacles,
        start: start.ok_or_else(|| FormatError::at(0, "missing start"))?,
        spine,
        seed,
    })
}
