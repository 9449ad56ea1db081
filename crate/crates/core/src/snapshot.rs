//! Binary snapshot format for sampled lattices.
//!
//! Single-grid layout: 16-byte magic `MODSCALE-SPECv1\0`, little-endian
//! `u32 d`, `u32 a`, `u32 b`, then `N^d` complex values as little-endian
//! f64 `(re, im)` pairs, row-major with axis 0 slowest.
//!
//! Product-grid layout (windowed transforms): same header followed by the
//! extension field `u32 flag = 2`, then `N^d * N^d` values with the
//! spatial index slowest. The two layouts are distinguished by total
//! payload size.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::FreqField;
use crate::grid::GridSpec;

pub const MAGIC: &[u8; 16] = b"MODSCALE-SPECv1\0";

/// Product-grid header extension flag.
pub const PRODUCT_GRID_FLAG: u32 = 2;

fn write_header(w: &mut impl Write, grid: &GridSpec) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.a() as u32).to_le_bytes())?;
    w.write_all(&(grid.b() as u32).to_le_bytes())?;
    Ok(())
}

fn write_values(w: &mut impl Write, values: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 16);
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_header(r: &mut impl Read) -> Result<GridSpec> {
    let mut magic = [0u8; 16];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let d = read_u32(r)? as usize;
    let a = read_u32(r)? as i64;
    let b = read_u32(r)? as i64;
    GridSpec::new(d, a, b)
}

fn read_values(r: &mut impl Read, count: usize) -> Result<Vec<Complex64>> {
    let mut buf = vec![0u8; count * 16];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Snapshot("truncated payload".into()))?;
    let values = buf
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(values)
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Snapshot("trailing data".into())),
    }
}

/// Write a sampled lattice.
pub fn write_field(w: &mut impl Write, field: &FreqField) -> Result<()> {
    write_header(w, &field.grid)?;
    write_values(w, &field.values)
}

/// Read a sampled lattice.
pub fn read_field(r: &mut impl Read) -> Result<FreqField> {
    let grid = read_header(r)?;
    let values = read_values(r, grid.total_points())?;
    expect_eof(r)?;
    Ok(FreqField { grid, values })
}

/// Write product-grid samples (`N^d` spatial slices of `N^d` frequency
/// values, spatial index slowest).
pub fn write_product(w: &mut impl Write, grid: &GridSpec, values: &[Complex64]) -> Result<()> {
    let n = grid.total_points();
    if values.len() != n * n {
        return Err(Error::Snapshot(format!(
            "product payload must hold {} values, got {}",
            n * n,
            values.len()
        )));
    }
    write_header(w, grid)?;
    w.write_all(&PRODUCT_GRID_FLAG.to_le_bytes())?;
    write_values(w, values)
}

/// Read product-grid samples.
pub fn read_product(r: &mut impl Read) -> Result<(GridSpec, Vec<Complex64>)> {
    let grid = read_header(r)?;
    let flag = read_u32(r)?;
    if flag != PRODUCT_GRID_FLAG {
        return Err(Error::Snapshot(format!("expected product-grid flag 2, got {flag}")));
    }
    let n = grid.total_points();
    let values = read_values(r, n * n)?;
    expect_eof(r)?;
    Ok((grid, values))
}
