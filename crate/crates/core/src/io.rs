//! The `FLNLS1` binary field format.
//!
//! Layout, all little-endian: the six ASCII bytes `FLNLS1`, `u64` dimension,
//! `u64` points per axis, `f64` torus extent, `f64` fractional order, then
//! `n^d` interleaved `f64` `(re, im)` pairs in row-major order. Trajectory
//! snapshots append one more `f64`, the time.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::scalar::{lit, to_f64, Real};

pub const MAGIC: &[u8; 6] = b"FLNLS1";

/// Contents of one field file.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile<T: Real> {
    pub field: Field<T>,
    pub s: T,
    pub time: Option<T>,
}

pub fn write_field<T: Real>(
    mut out: impl Write,
    field: &Field<T>,
    s: T,
    time: Option<T>,
) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(38 + 16 * field.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.dim() as u64).to_le_bytes());
    buf.extend_from_slice(&(grid.n() as u64).to_le_bytes());
    buf.extend_from_slice(&to_f64(grid.extent()).to_le_bytes());
    buf.extend_from_slice(&to_f64(s).to_le_bytes());
    for z in field.values() {
        buf.extend_from_slice(&to_f64(z.re).to_le_bytes());
        buf.extend_from_slice(&to_f64(z.im).to_le_bytes());
    }
    if let Some(t) = time {
        buf.extend_from_slice(&to_f64(t).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize, what: &str) -> Result<&[u8]> {
        let end = self.pos + len;
        if end > self.bytes.len() {
            return Err(Error::Format(format!("truncated while reading {what}")));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn read_field<T: Real>(mut input: impl Read) -> Result<FieldFile<T>> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if cur.take(MAGIC.len(), "magic")? != MAGIC {
        return Err(Error::Format("bad magic, expected FLNLS1".into()));
    }
    let dim = cur.u64("dimension")? as usize;
    let n = cur.u64("resolution")? as usize;
    let extent = cur.f64("extent")?;
    let s = cur.f64("order")?;
    let grid = Grid::new(dim, n, lit::<T>(extent))?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = cur.f64("samples")?;
        let im = cur.f64("samples")?;
        values.push(Complex::new(lit(re), lit(im)));
    }
    let time = match bytes.len() - cur.pos {
        0 => None,
        8 => Some(lit(cur.f64("time")?)),
        extra => return Err(Error::Format(format!("{extra} unexpected trailing bytes"))),
    };
    Ok(FieldFile {
        field: Field::new(&grid, values)?,
        s: lit(s),
        time,
    })
}

pub fn save_field<T: Real>(
    path: impl AsRef<std::path::Path>,
    field: &Field<T>,
    s: T,
    time: Option<T>,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field, s, time)
}

pub fn load_field<T: Real>(path: impl AsRef<std::path::Path>) -> Result<FieldFile<T>> {
    read_field(std::fs::File::open(path)?)
}
