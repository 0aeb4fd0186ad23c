//! Field serialization: CSV (`x, re, im`) and a little-endian binary dump
//! (`n`, `L` as f64, then `re, im` pairs).

use std::io::{Read, Write};

use crate::{Field, Grid, SpectralError, C64};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(u: &Field, w: W) -> Result<(), SpectralError> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["x", "re", "im"])?;
    let g = u.grid();
    for (j, c) in u.values().iter().enumerate() {
        wr.write_record([fmt_num(g.x(j)), fmt_num(c.re), fmt_num(c.im)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`]; the grid is recovered from the node
/// count and spacing.
pub fn read_csv<R: Read>(r: R) -> Result<Field, SpectralError> {
    let mut rd = csv::Reader::from_reader(r);
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(SpectralError::Format(format!("expected 3 columns, got {}", rec.len())));
        }
        let p = |i: usize| -> Result<f64, SpectralError> {
            rec[i].trim().parse().map_err(|e| SpectralError::Format(format!("{e}: {:?}", &rec[i])))
        };
        xs.push(p(0)?);
        vals.push(C64::new(p(1)?, p(2)?));
    }
    if xs.len() < 2 {
        return Err(SpectralError::Format("too few rows".into()));
    }
    let length = -2.0 * xs[0];
    let grid = Grid::new(xs.len(), length)?;
    Field::new(grid, vals)
}

pub fn write_binary<W: Write>(u: &Field, mut w: W) -> Result<(), SpectralError> {
    let g = u.grid();
    w.write_all(&(g.n() as f64).to_le_bytes())?;
    w.write_all(&g.length().to_le_bytes())?;
    for c in u.values() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64, SpectralError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Field, SpectralError> {
    let n = read_f64(&mut r)?;
    if !(n.is_finite() && n >= 0.0 && n.fract() == 0.0 && n <= (1u64 << 40) as f64) {
        return Err(SpectralError::Format(format!("bad point count {n}")));
    }
    let length = read_f64(&mut r)?;
    let grid = Grid::new(n as usize, length)?;
    let mut vals = Vec::with_capacity(grid.n());
    for _ in 0..grid.n() {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        vals.push(C64::new(re, im));
    }
    Field::new(grid, vals)
}
