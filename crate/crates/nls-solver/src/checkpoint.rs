//! Checkpoints (`NLSCKPT1`, then `t`, `dt` as little-endian f64, the step index
//! as u64, then the field's binary dump) and the conserved-quantity log.

use std::io::{Read, Write};

use nls_spectral::io::{fmt_num, read_binary, write_binary};
use nls_spectral::Field;

use crate::{Sample, SolverError};

const MAGIC: &[u8; 8] = b"NLSCKPT1";

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub t: f64,
    pub dt: f64,
    pub step: u64,
    pub field: Field,
}

fn io_err(e: std::io::Error) -> SolverError {
    SolverError::Checkpoint(e.to_string())
}

pub fn write_checkpoint<W: Write>(c: &Checkpoint, mut w: W) -> Result<(), SolverError> {
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&c.t.to_le_bytes()).map_err(io_err)?;
    w.write_all(&c.dt.to_le_bytes()).map_err(io_err)?;
    w.write_all(&c.step.to_le_bytes()).map_err(io_err)?;
    write_binary(&c.field, w)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint, SolverError> {
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(io_err)?;
    if &word != MAGIC {
        return Err(SolverError::Checkpoint("bad magic".into()));
    }
    let mut next = || -> Result<[u8; 8], SolverError> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(io_err)?;
        Ok(b)
    };
    let t = f64::from_le_bytes(next()?);
    let dt = f64::from_le_bytes(next()?);
    let step = u64::from_le_bytes(next()?);
    let field = read_binary(r)?;
    Ok(Checkpoint { t, dt, step, field })
}

/// `t,M,P,H` rows.
pub fn write_conserved_csv<W: Write>(samples: &[Sample], w: W) -> Result<(), SolverError> {
    let mut wr = csv::Writer::from_writer(w);
    let err = |e: csv::Error| SolverError::Checkpoint(e.to_string());
    wr.write_record(["t", "M", "P", "H"]).map_err(err)?;
    for s in samples {
        wr.write_record([fmt_num(s.t), fmt_num(s.mass), fmt_num(s.momentum), fmt_num(s.energy)]).map_err(err)?;
    }
    wr.flush().map_err(io_err)
}
