//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use reefnav::geometry::Pose2;
use reefnav::map::CellClass;
use reefnav::raster::{Cell, GridFrame, Point};
use reefnav::world::{Bounds, Label, Obstacle, SensorFrame, Spine, TargetCluster, Topology, WorldModel};

/// Slab test: parameter interval where `o + t·d` lies in the closed square of `c`.
fn cell_interval(frame: &GridFrame, c: Cell, o: Point, d: Point) -> Option<(f64, f64)> {
    let lo = frame.min_corner();
    let s = frame.cell_size();
    let (x0, y0) = (lo.x + c.col as f64 * s, lo.y + c.row as f64 * s);
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for (p, dir, a, b) in [(o.x, d.x, x0, x0 + s), (o.y, d.y, y0, y0 + s)] {
        if dir == 0.0 {
            if p < a || p >= b {
                return None;
            }
        } else {
            let (ta, tb) = ((a - p) / dir, (b - p) / dir);
            t0 = t0.max(ta.min(tb));
            t1 = t1.min(ta.max(tb));
        }
    }
    (t1 > t0).then_some((t0, t1))
}

fn lattice_cell(frame: &GridFrame, p: Point) -> Cell {
    let lo = frame.min_corner();
    let s = frame.cell_size();
    Cell::new(((p.x - lo.x) / s).floor() as i32, ((p.y - lo.y) / s).floor() as i32)
}

/// Per-cell brute force over every (ray, cell) pair of scanline frames without floor returns.
pub fn brute_force_integrate(frame: &GridFrame, frames: &[SensorFrame]) -> (Vec<CellClass>, Vec<bool>) {
    let mut classes = vec![CellClass::Unknown; frame.len()];
    let mut explored = vec![false; frame.len()];
    let raise = |c: Cell, class: CellClass, classes: &mut Vec<CellClass>, explored: &mut Vec<bool>| {
        if frame.contains(c) {
            let i = frame.index(c);
            explored[i] = true;
            classes[i] = classes[i].max(class);
        }
    };
    for f in frames {
        let o = f.pose.position;
        for i in 0..f.width() {
            let b = f.bearing(i);
            let d = Point::new(b.cos(), b.sin());
            let (extent, hit) = match f.label[i] {
                Label::Obstacle if f.depth[i].is_finite() => (f.depth[i].min(f.config.d_max), Some(CellClass::Obstacle)),
                Label::Target if f.depth[i].is_finite() => (f.depth[i].min(f.config.d_max), Some(CellClass::Target)),
                _ => (f.config.d_max, None),
            };
            let hit_cell = hit.map(|_| lattice_cell(frame, o + d * (extent + 1e-9)));
            for idx in 0..frame.len() {
                let c = frame.cell_at(idx);
                let inside = lattice_cell(frame, o) == c;
                let crossed = cell_interval(frame, c, o, d).is_some_and(|(t0, t1)| t1 > 0.0 && t0 < extent);
                if (inside || crossed) && Some(c) != hit_cell {
                    raise(c, CellClass::Free, &mut classes, &mut explored);
                }
            }
            if let (Some(c), Some(class)) = (hit_cell, hit) {
                raise(c, class, &mut classes, &mut explored);
            }
        }
    }
    (classes, explored)
}

/// 8-connected components by breadth-first flood fill, smallest cell index first.
pub fn flood_fill(mask: &[bool], w: usize, h: usize, min_area: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = q.pop_front() {
            comp.push(i);
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        q.push_back(j);
                    }
                }
            }
        }
        if comp.len() >= min_area {
            comp.sort_unstable();
            out.push(comp);
        }
    }
    out
}

/// Shortest Hamiltonian open path over all permutations (free endpoints).
pub fn optimal_open_path(points: &[Point]) -> f64 {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for k in 0..=p.len() {
                let mut q = p.clone();
                q.insert(k, n - 1);
                out.push(q);
            }
        }
        out
    }
    perms(points.len())
        .into_iter()
        .map(|p| p.windows(2).map(|w| points[w[0]].distance(points[w[1]])).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// 20 × 8 m corridor heading +x with one cluster every few meters and no obstacles.
pub fn corridor_world() -> WorldModel {
    let bounds = Bounds { min: Point::new(-10.0, -4.0), max: Point::new(10.0, 4.0) };
    let mut world = WorldModel {
        bounds,
        topology: Topology::L,
        resolution: 10.0,
        clusters: Vec::new(),
        obstacles: Vec::new(),
        start: Pose2::new(-8.5, 0.0, 0.0),
        spine: Spine { polylines: vec![vec![Point::new(-9.0, 0.0), Point::new(9.0, 0.0)]] },
        seed: 0,
    };
    let frame = world.frame();
    for (id, cx) in [-5.0, -1.0, 3.0, 7.0].into_iter().enumerate() {
        let mut cells = Vec::new();
        for dx in -7..=7 {
            for dy in -7..=7 {
                cells.push(frame.cell_unchecked(Point::new(cx + dx as f64 * 0.1, dy as f64 * 0.1)));
            }
        }
        world.clusters.push(TargetCluster::from_cells(id as u32, cells, &frame));
    }
    world
}

/// Corridor with a few pillars off the centerline.
pub fn corridor_with_pillars() -> WorldModel {
    let mut w = corridor_world();
    w.obstacles = vec![
        Obstacle { center: Point::new(-3.0, 2.2), radius: 0.5 },
        Obstacle { center: Point::new(1.0, -2.4), radius: 0.6 },
        Obstacle { center: Point::new(5.0, 2.5), radius: 0.5 },
    ];
    w
}

/// Minimal HTTP/1.1 endpoint answering every POST with chat-completions JSON carrying
/// `reply`. Returns the URL and a counter of handled requests.
pub fn spawn_chat_server(reply: &'static str) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind local port");
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let count = Arc::new(AtomicUsize::new(0));
    let c = count.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0usize;
            let mut line = String::new();
            loop {
                line.clear();
                if reader.read_line(&mut line).unwrap_or(0) == 0 {
                    break;
                }
                let l = line.trim_end();
                if l.is_empty() {
                    break;
                }
                if let Some(v) = l.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap_or(0);
                }
            }
            let mut body = vec![0u8; len];
            let _ = reader.read_exact(&mut body);
            let ok = serde_json::from_slice::<serde_json::Value>(&body).is_ok_and(|v| {
                let content = &v["messages"][0]["content"];
                let images = content.as_array().map_or(0, |parts| {
                    parts.iter().filter(|p| p["image_url"]["url"].as_str().is_some_and(|u| u.starts_with("data:image/png;base64,"))).count()
                });
                content[0]["text"].is_string() && images >= 1
            });
            c.fetch_add(1, Ordering::SeqCst);
            let payload = if ok {
                serde_json::json!({"choices": [{"message": {"role": "assistant", "content": reply}}]}).to_string()
            } else {
                serde_json::json!({"error": "malformed request"}).to_string()
            };
            let status = if ok { "200 OK" } else { "400 Bad Request" };
            let _ = write!(stream, "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}", payload.len());
        }
    });
    (url, count)
}
