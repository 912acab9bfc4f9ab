//! CSV serialization of fields.
//!
//! Layouts (one header row, then one row per node, x-fastest, then y, then
//! z; floats printed with 17 significant digits so round trips are
//! bit-exact; masked-off nodes of disc grids are written as zeros):
//!
//! * planar fields: `x,y,p1,p2,b`
//! * slab fields:   `x,y,z,q11,q12,q13,q22,q23`

use crate::error::{Error, Result};
use crate::grid::{DomainShape, Grid2d, Grid3d, PField, QField3d};
use crate::tensor::QTensor;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_pfield(path: &Path, grid: &Grid2d, field: &PField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "x,y,p1,p2,b")?;
    for j in 0..=grid.ny {
        for i in 0..=grid.nx {
            let id = grid.node_id(i, j);
            let (x, y) = grid.node_pos(id);
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt(x),
                fmt(y),
                fmt(field.p1[id]),
                fmt(field.p2[id]),
                fmt(field.b_at(id))
            )?;
        }
    }
    Ok(())
}

/// Reads a planar field written by [`write_pfield`], reconstructing the grid
/// from the node lattice. The lattice must be rectangular and uniform and
/// must match the canonical bounding box of `shape`.
pub fn read_pfield(path: &Path, shape: DomainShape) -> Result<(Grid2d, PField)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::FieldFormat("empty file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let has_b = match cols.as_slice() {
        ["x", "y", "p1", "p2", "b"] => true,
        ["x", "y", "p1", "p2"] => false,
        _ => {
            return Err(Error::FieldFormat(format!(
                "unexpected planar header `{header}`"
            )))
        }
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut b = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .trim()
            .split(',')
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::FieldFormat(format!("row {}: malformed number `{t}`", k + 2))
                })
            })
            .collect::<Result<_>>()?;
        let expect = if has_b { 5 } else { 4 };
        if vals.len() != expect {
            return Err(Error::FieldFormat(format!(
                "row {}: expected {expect} columns, got {}",
                k + 2,
                vals.len()
            )));
        }
        xs.push(vals[0]);
        ys.push(vals[1]);
        p1.push(vals[2]);
        p2.push(vals[3]);
        if has_b {
            b.push(vals[4]);
        }
    }

    // Infer the lattice: x repeats with period nnx, y is constant per row
    // block and increases across blocks.
    let n = xs.len();
    let mut nnx = n;
    for k in 1..n {
        if xs[k] < xs[k - 1] {
            nnx = k;
            break;
        }
    }
    if nnx < 2 || n % nnx != 0 {
        return Err(Error::FieldFormat("non-rectangular node set".into()));
    }
    let nny = n / nnx;
    if nny < 2 {
        return Err(Error::FieldFormat("non-rectangular node set".into()));
    }
    let grid = Grid2d::new(shape, nnx - 1, nny - 1);
    for j in 0..nny {
        for i in 0..nnx {
            let k = j * nnx + i;
            let (x, y) = grid.node_pos(grid.node_id(i, j));
            if (xs[k] - x).abs() > 1e-9 || (ys[k] - y).abs() > 1e-9 {
                return Err(Error::FieldFormat(format!(
                    "node ({i}, {j}) at ({}, {}) does not match the {shape:?} lattice ({x}, {y})",
                    xs[k], ys[k]
                )));
            }
        }
    }

    let beta = if has_b {
        // Anchoring target: the most common boundary b value (constant for
        // fields written by the solvers).
        b[grid.boundary_loop.first().copied().unwrap_or(0)]
    } else {
        f64::NAN
    };
    Ok((
        grid,
        PField {
            p1,
            p2,
            b: if has_b { Some(b) } else { None },
            beta,
        },
    ))
}

pub fn write_qfield3d(path: &Path, grid: &Grid3d, field: &QField3d) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "x,y,z,q11,q12,q13,q22,q23")?;
    for k in 0..=grid.nz {
        let z = k as f64 * grid.hz;
        for j in 0..=grid.base.ny {
            for i in 0..=grid.base.nx {
                let id = grid.node_id(i, j, k);
                let (x, y) = grid.base.node_pos(grid.base.node_id(i, j));
                let q = &field.q[id];
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt(x),
                    fmt(y),
                    fmt(z),
                    fmt(q.q11),
                    fmt(q.q12),
                    fmt(q.q13),
                    fmt(q.q22),
                    fmt(q.q23)
                )?;
            }
        }
    }
    Ok(())
}

pub fn read_qfield3d(path: &Path, shape: DomainShape) -> Result<(Grid3d, QField3d)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::FieldFormat("empty file".into()))??;
    if header.trim() != "x,y,z,q11,q12,q13,q22,q23" {
        return Err(Error::FieldFormat(format!(
            "unexpected slab header `{header}`"
        )));
    }
    let mut rows: Vec<[f64; 8]> = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .trim()
            .split(',')
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::FieldFormat(format!("row {}: malformed number `{t}`", k + 2))
                })
            })
            .collect::<Result<_>>()?;
        if vals.len() != 8 {
            return Err(Error::FieldFormat(format!(
                "row {}: expected 8 columns, got {}",
                k + 2,
                vals.len()
            )));
        }
        rows.push([
            vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7],
        ]);
    }

    let n = rows.len();
    let mut nnx = n;
    for k in 1..n {
        if rows[k][0] < rows[k - 1][0] {
            nnx = k;
            break;
        }
    }
    if nnx < 2 || n % nnx != 0 {
        return Err(Error::FieldFormat("non-rectangular node set".into()));
    }
    let mut nny = n / nnx;
    for jk in 1..(n / nnx) {
        if rows[jk * nnx][1] < rows[(jk - 1) * nnx][1] {
            nny = jk;
            break;
        }
    }
    if nny < 2 || (n / nnx) % nny != 0 {
        return Err(Error::FieldFormat("non-rectangular node set".into()));
    }
    let nnz = n / (nnx * nny);
    if nnz < 2 {
        return Err(Error::FieldFormat("slab needs at least two z levels".into()));
    }
    let grid = Grid3d::new(shape, nnx - 1, nny - 1, nnz - 1);
    let mut q = Vec::with_capacity(n);
    for (k, row) in rows.iter().enumerate() {
        let (i, j, kz) = (k % nnx, (k / nnx) % nny, k / (nnx * nny));
        let (x, y) = grid.base.node_pos(grid.base.node_id(i, j));
        let z = kz as f64 * grid.hz;
        if (row[0] - x).abs() > 1e-9 || (row[1] - y).abs() > 1e-9 || (row[2] - z).abs() > 1e-9 {
            return Err(Error::FieldFormat(format!(
                "node ({i}, {j}, {kz}) does not match the {shape:?} lattice"
            )));
        }
        q.push(QTensor::new(row[3], row[4], row[5], row[6], row[7]));
    }
    Ok((grid, QField3d { q }))
}
