//! Snapshot export and re-import as CSV.
//!
//! Cell snapshots use columns `t,x,u`, node snapshots `t,x,v,gauge`. Rows are
//! ordered by time then position, and every float is written with 17
//! significant digits so that re-import is bit-identical.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{CellField, Grid, NodalField};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_cell_snapshots(path: &Path, snapshots: &[CellField]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "x", "u"])?;
    for s in snapshots {
        let t = fmt_f64(s.time);
        for (j, u) in s.values.iter().enumerate() {
            w.write_record([t.as_str(), &fmt_f64(s.grid.center(j)), &fmt_f64(*u)])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_nodal_snapshots(path: &Path, snapshots: &[NodalField]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "x", "v", "gauge"])?;
    for s in snapshots {
        let t = fmt_f64(s.time);
        let gauge = fmt_f64(s.gauge);
        for (i, v) in s.values.iter().enumerate() {
            w.write_record([t.as_str(), &fmt_f64(s.grid.face(i)), &fmt_f64(*v), &gauge])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn parse(path: &Path, row: usize, field: Option<&str>) -> Result<f64> {
    field.and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
        Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad number in row {row}")))
    })
}

fn read_rows(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = (0..columns).map(|c| parse(path, k + 2, rec.get(c))).collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn mismatch(what: &str) -> Error {
    Error::GridMismatch(format!("snapshot file does not match the grid: {what}"))
}

/// Reads cell snapshots written on `grid`; positions must match exactly.
pub fn read_cell_snapshots(path: &Path, grid: Grid) -> Result<Vec<CellField>> {
    let rows = read_rows(path, 3)?;
    if rows.len() % grid.n != 0 {
        return Err(mismatch("row count"));
    }
    rows.chunks(grid.n)
        .map(|chunk| {
            let t = chunk[0][0];
            let mut values = Vec::with_capacity(grid.n);
            for (j, row) in chunk.iter().enumerate() {
                if row[0] != t || row[1] != grid.center(j) {
                    return Err(mismatch("positions or times"));
                }
                values.push(row[2]);
            }
            CellField::new(grid, values, t)
        })
        .collect()
}

pub fn read_nodal_snapshots(path: &Path, grid: Grid) -> Result<Vec<NodalField>> {
    let rows = read_rows(path, 4)?;
    let m = grid.n + 1;
    if rows.len() % m != 0 {
        return Err(mismatch("row count"));
    }
    rows.chunks(m)
        .map(|chunk| {
            let t = chunk[0][0];
            let mut values = Vec::with_capacity(m);
            for (i, row) in chunk.iter().enumerate() {
                if row[0] != t || row[1] != grid.face(i) {
                    return Err(mismatch("positions or times"));
                }
                values.push(row[2]);
            }
            let mut f = NodalField::new(grid, values, t)?;
            f.gauge = chunk[0][3];
            Ok(f)
        })
        .collect()
}

/// Writes `header` and `rows` as a CSV table.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let g = Grid::periodic(37).unwrap();
        let snaps: Vec<CellField> = (0..3)
            .map(|k| {
                let mut c = CellField::from_fn(g, |a, b| (a * 7.1).sin() / (b + 0.3) * 1e-7 + k as f64 / 3.0);
                c.time = k as f64 * 0.1 / 3.0;
                c
            })
            .collect();
        write_cell_snapshots(&path, &snaps).unwrap();
        let back = read_cell_snapshots(&path, g).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in snaps.iter().zip(&back) {
            assert_eq!(a.time.to_bits(), b.time.to_bits());
            for (x, y) in a.values.iter().zip(&b.values) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert!(read_cell_snapshots(&path, Grid::periodic(38).unwrap()).is_err());
    }

    #[test]
    fn nodal_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        let g = Grid::periodic(16).unwrap();
        let mut v = NodalField::from_fn(g, |x| (x * 3.3).exp() / 7.0);
        v.time = 1.0 / 3.0;
        v.gauge = -2.0 / 7.0;
        write_nodal_snapshots(&path, std::slice::from_ref(&v)).unwrap();
        let back = read_nodal_snapshots(&path, g).unwrap();
        assert_eq!(back[0], v);
    }
}
