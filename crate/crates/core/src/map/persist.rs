//! Text dump of an [`OccupancyGrid`].
//!
//! ```text
//! reefnav-grid v1
//! resolution <cells per meter>
//! origin <x> <y>
//! size <width> <height>
//! classes
//! <height lines of width digits: 0 unknown, 1 free, 2 obstacle, 3 target; row 0 first>
//! explored
//! <height lines of width digits 0/1>
//! ```
//!
//! Floats are written in shortest round-trip form, so load(dump(g)) == g.

use std::fmt::Write as _;

use super::grid::{CellClass, OccupancyGrid};
use crate::error::FormatError;
use crate::raster::{GridFrame, Point};

pub const GRID_HEADER: &str = "reefnav-grid v1";

pub fn dump_grid(grid: &OccupancyGrid) -> String {
    let f = &grid.frame;
    let mut s = String::with_capacity(2 * f.len() + 2 * f.height + 128);
    let _ = writeln!(s, "{GRID_HEADER}");
    let _ = writeln!(s, "resolution {:?}", f.resolution);
    let _ = writeln!(s, "origin {:?} {:?}", f.origin.x, f.origin.y);
    let _ = writeln!(s, "size {} {}", f.width, f.height);
    s.push_str("classes\n");
    for row in grid.classes().chunks(f.width) {
        s.extend(row.iter().map(|&c| char::from(b'0' + c as u8)));
        s.push('\n');
    }
    s.push_str("explored\n");
    for row in grid.explored_mask().chunks(f.width) {
        s.extend(row.iter().map(|&e| if e { '1' } else { '0' }));
        s.push('\n');
    }
    s
}

pub fn load_grid(text: &str) -> Result<OccupancyGrid, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut next = |what: &str| lines.next().ok_or_else(|| FormatError::at(0, format!("unexpected end of input, expected {what}")));

    let (n, header) = next("header")?;
    if header != GRID_HEADER {
        return Err(FormatError::at(n, format!("expected header {GRID_HEADER:?}")));
    }
    let mut fields = |key: &str, count: usize| -> Result<(usize, Vec<String>), FormatError> {
        let (n, line) = next(key)?;
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(FormatError::at(n, format!("expected `{key}` record")));
        }
        let vals: Vec<String> = it.map(str::to_owned).collect();
        if vals.len() != count {
            return Err(FormatError::at(n, format!("`{key}` takes {count} values")));
        }
        Ok((n, vals))
    };
    let float = |n: usize, s: &str| s.parse::<f64>().map_err(|e| FormatError::at(n, format!("bad number {s:?}: {e}")));
    let int = |n: usize, s: &str| s.parse::<usize>().map_err(|e| FormatError::at(n, format!("bad integer {s:?}: {e}")));

    let (n, v) = fields("resolution", 1)?;
    let resolution = float(n, &v[0])?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(FormatError::at(n, "resolution must be positive"));
    }
    let (n, v) = fields("origin", 2)?;
    let origin = Point::new(float(n, &v[0])?, float(n, &v[1])?);
    let (n, v) = fields("size", 2)?;
    let (width, height) = (int(n, &v[0])?, int(n, &v[1])?);
    if width == 0 || height == 0 {
        return Err(FormatError::at(n, "grid dimensions must be positive"));
    }
    let frame = GridFrame { resolution, origin, width, height };

    let mut section = |name: &str, parse: &dyn Fn(u8) -> Option<u8>| -> Result<Vec<u8>, FormatError> {
        let (n, line) = next(name)?;
        if line != name {
            return Err(FormatError::at(n, format!("expected `{name}` section")));
        }
        let mut out = Vec::with_capacity(width * height);
        for _ in 0..height {
            let (n, row) = next("grid row")?;
            if row.len() != width {
                return Err(FormatError::at(n, format!("row has {} cells, expected {width}", row.len())));
            }
            for b in row.bytes() {
                out.push(parse(b).ok_or_else(|| FormatError::at(n, format!("bad cell value {:?}", b as char)))?);
            }
        }
        Ok(out)
    };
    let cells = section("classes", &|b| (b'0'..=b'3').contains(&b).then(|| b - b'0'))?;
    let explored = section("explored", &|b| (b'0'..=b'1').contains(&b).then(|| b - b'0'))?;
    let cells: Vec<CellClass> = cells
        .into_iter()
        .map(|c| match c {
            0 => CellClass::Unknown,
            1 => CellClass::Free,
            2 => CellClass::Obstacle,
            _ => CellClass::Target,
        })
        .collect();
    let explored: Vec<bool> = explored.into_iter().map(|e| e == 1).collect();
    if let Some(i) = cells.iter().zip(&explored).position(|(&c, &e)| c != CellClass::Unknown && !e) {
        return Err(FormatError::at(0, format!("cell {i} is classified but not explored")));
    }
    Ok(OccupancyGrid::from_parts(frame, cells, explored))
}
