//! Field snapshot files: plain text, shortest round-trip float formatting.
//!
//! ```text
//! # grid uniform N=<n> Rmax=<x>
//! # time <t>
//! # form <u|psi>
//! <r> <value> <velocity>     (N+1 lines)
//! ```

use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Formulation, RadialField, RadialState};
use crate::grid::{GridSpacing, RadialGrid};

pub fn write_snapshot(path: &Path, s: &RadialState) -> Result<()> {
    let grid = s.grid();
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let kind = match grid.spacing() {
        GridSpacing::Uniform { .. } => "uniform",
        GridSpacing::Graded { .. } => "graded",
    };
    writeln!(
        out,
        "# grid {kind} N={} Rmax={}",
        grid.len() - 1,
        grid.r_max()
    )?;
    writeln!(out, "# time {}", s.time())?;
    writeln!(out, "# form {}", s.form().name())?;
    for ((r, p), v) in grid
        .nodes()
        .iter()
        .zip(s.pos().values())
        .zip(s.vel().values())
    {
        writeln!(out, "{r} {p} {v}")?;
    }
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<RadialState> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut time = 0.0f64;
    let mut form = Formulation::U;
    let mut grid_kind = String::from("uniform");
    let mut rs = Vec::new();
    let mut ps = Vec::new();
    let mut vs = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            match it.next() {
                Some("grid") => {
                    if let Some(kind) = it.next() {
                        grid_kind = kind.to_string();
                    }
                }
                Some("time") => {
                    time = it
                        .next()
                        .ok_or_else(|| Error::SnapshotParse("missing time".into()))?
                        .parse()
                        .map_err(|e| Error::SnapshotParse(format!("time: {e}")))?;
                }
                Some("form") => {
                    form = match it.next() {
                        Some("u") => Formulation::U,
                        Some("psi") => Formulation::Psi,
                        other => {
                            return Err(Error::SnapshotParse(format!("bad form {other:?}")))
                        }
                    };
                }
                _ => {}
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<f64> {
            it.next()
                .ok_or_else(|| Error::SnapshotParse(format!("short row: {line}")))?
                .parse()
                .map_err(|e| Error::SnapshotParse(format!("row '{line}': {e}")))
        };
        rs.push(next()?);
        ps.push(next()?);
        vs.push(next()?);
    }
    if rs.len() < 9 {
        return Err(Error::SnapshotParse("too few rows".into()));
    }
    // rebuild the grid from the r column; the header is advisory
    let grid: Arc<RadialGrid> = if grid_kind == "uniform" {
        RadialGrid::uniform(*rs.last().unwrap(), rs.len() - 1)?
    } else {
        RadialGrid::graded(*rs.last().unwrap(), rs[1], rs.len() - 1)?
    };
    for (a, b) in grid.nodes().iter().zip(&rs) {
        if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
            return Err(Error::SnapshotParse(format!(
                "node mismatch: grid {a}, file {b}"
            )));
        }
    }
    let pos = RadialField::new(grid.clone(), ps, form)?;
    let vel = RadialField::new(grid, vs, form)?;
    RadialState::new(pos, vel, time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::bump_field;

    #[test]
    fn roundtrip_preserves_bits() {
        let dir = std::env::temp_dir().join("critwave-snapshot-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.dat");
        let g = RadialGrid::uniform(10.0, 200).unwrap();
        let pos = bump_field(&g, 0.7312349, 3.1, 1.7);
        let vel = bump_field(&g, -0.11, 4.0, 2.0);
        let s = RadialState::new(pos, vel, 1.25).unwrap();
        write_snapshot(&path, &s).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.time(), 1.25);
        assert_eq!(back.form(), Formulation::U);
        assert_eq!(back.pos().values(), s.pos().values());
        assert_eq!(back.vel().values(), s.vel().values());
    }
}
