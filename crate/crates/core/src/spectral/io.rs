//! Snapshot files and node-value CSV export.
//!
//! A snapshot file is a sequence of records, each
//! `magic[4] | degree u32 | space tag u32 | time f64 | coefficients f64...`,
//! little-endian, coefficients row-major.

use std::fmt::Write as _;
use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::{transform_to_nodes, Basis1D, Field2D, Space};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"CSSF";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub degree: usize,
    pub time: f64,
    pub field: Field2D,
}

pub fn write_snapshot<W: Write>(w: &mut W, b: &Basis1D, time: f64, field: &Field2D) -> Result<()> {
    w.write_all(&SNAPSHOT_MAGIC)?;
    w.write_all(&(b.degree() as u32).to_le_bytes())?;
    w.write_all(&field.space().tag().to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    let c = field.coeffs();
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            w.write_all(&c[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_exact_or_eof<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<bool> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..])? {
            0 if got == 0 => return Ok(false),
            0 => return Err(Error::Parse("truncated snapshot record".into())),
            n => got += n,
        }
    }
    Ok(true)
}

/// Reads every record until end of input.
pub fn read_snapshots<R: Read>(r: &mut R) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    loop {
        let mut head = [0u8; 20];
        if !read_exact_or_eof(r, &mut head)? {
            return Ok(out);
        }
        if head[..4] != SNAPSHOT_MAGIC {
            return Err(Error::Parse("bad snapshot magic".into()));
        }
        let degree = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let tag = u32::from_le_bytes(head[8..12].try_into().unwrap());
        let time = f64::from_le_bytes(head[12..20].try_into().unwrap());
        let space = Space::from_tag(tag).ok_or_else(|| Error::Parse(format!("unknown space tag {tag}")))?;
        if degree < super::MIN_DEGREE {
            return Err(Error::Parse(format!("snapshot degree {degree} too small")));
        }
        let d = space.dim(degree);
        let mut body = vec![0u8; d * d * 8];
        if !read_exact_or_eof(r, &mut body)? {
            return Err(Error::Parse("snapshot header without data".into()));
        }
        let vals: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let field = Field2D::with_degree(degree, space, DMatrix::from_row_slice(d, d, &vals))?;
        out.push(Snapshot { degree, time, field });
    }
}

/// CSV `x,y,<name>...` over the quadrature grid.
pub fn nodes_csv(b: &Basis1D, fields: &[(&str, &Field2D)]) -> String {
    let grids: Vec<DMatrix<f64>> = fields.iter().map(|(_, f)| transform_to_nodes(b, f)).collect();
    let mut out = String::from("x,y");
    for (name, _) in fields {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let x = b.nodes();
    for (a, xa) in x.iter().enumerate() {
        for (c, yc) in x.iter().enumerate() {
            let _ = write!(out, "{xa},{yc}");
            for g in &grids {
                let _ = write!(out, ",{}", g[(a, c)]);
            }
            out.push('\n');
        }
    }
    out
}
