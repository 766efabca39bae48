//! Portable occupancy export.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      4 bytes  "MKGS"
//! version    u8       1
//! mode       u8       0 inner, 1 outer, 2 exact
//! dim        u16
//! spacing    i64 numerator, i64 denominator
//! anchor     dim x (i64 numerator, i64 denominator)
//! extents    dim x u64
//! bits       ceil(cells / 8) bytes, row-major with the last axis fastest,
//!            cell n stored in bit n % 8 of byte n / 8
//! ```

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{GridFrame, GridSet, Mode};
use crate::error::{Error, Result};
use crate::rational::Rational;

const MAGIC: &[u8; 4] = b"MKGS";
const VERSION: u8 = 1;

fn put_rational(out: &mut Vec<u8>, q: &Rational) -> Result<()> {
    let num = q.numer().to_i64().ok_or_else(|| Error::Unsupported("rational does not fit i64".into()))?;
    let den = q.denom().to_i64().ok_or_else(|| Error::Unsupported("rational does not fit i64".into()))?;
    out.extend_from_slice(&num.to_le_bytes());
    out.extend_from_slice(&den.to_le_bytes());
    Ok(())
}

pub fn to_bytes(g: &GridSet) -> Result<Vec<u8>> {
    let frame = g.frame();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(match g.mode() {
        Mode::Inner => 0,
        Mode::Outer => 1,
        Mode::Exact => 2,
    });
    out.extend_from_slice(&(frame.dim() as u16).to_le_bytes());
    put_rational(&mut out, frame.spacing())?;
    for a in frame.anchor() {
        put_rational(&mut out, a)?;
    }
    for &e in frame.extents() {
        out.extend_from_slice(&(e as u64).to_le_bytes());
    }
    let total = frame.cell_count() as usize;
    let mut bytes = vec![0u8; total.div_ceil(8)];
    let n = g.row_len();
    for r in 0..g.rows() {
        for x in super::row_bits(g.row(r)) {
            let cell = r * n + x;
            bytes[cell / 8] |= 1 << (cell % 8);
        }
    }
    out.extend_from_slice(&bytes);
    Ok(out)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::MalformedStream("truncated".into()))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.i64()?;
        let den = self.i64()?;
        if den <= 0 {
            return Err(Error::MalformedStream(format!("denominator {den}")));
        }
        Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
    }
}

pub fn from_bytes(data: &[u8]) -> Result<GridSet> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::MalformedStream("bad magic".into()));
    }
    let version = r.take(1)?[0];
    if version != VERSION {
        return Err(Error::MalformedStream(format!("unknown version {version}")));
    }
    let mode = match r.take(1)?[0] {
        0 => Mode::Inner,
        1 => Mode::Outer,
        2 => Mode::Exact,
        m => return Err(Error::MalformedStream(format!("unknown mode {m}"))),
    };
    let dim = u16::from_le_bytes(r.take(2)?.try_into().expect("2 bytes")) as usize;
    let spacing = r.rational()?;
    let anchor = (0..dim).map(|_| r.rational()).collect::<Result<Vec<_>>>()?;
    let extents = (0..dim)
        .map(|_| Ok(r.i64()? as u64 as usize))
        .collect::<Result<Vec<_>>>()?;
    let frame = GridFrame::new(anchor, spacing, extents).map_err(|e| Error::MalformedStream(e.to_string()))?;
    let mut g = GridSet::empty(frame, mode)?;
    let total = g.frame().cell_count() as usize;
    let bytes = r.take(total.div_ceil(8))?;
    if r.pos != data.len() {
        return Err(Error::MalformedStream("trailing bytes".into()));
    }
    let n = g.row_len();
    for cell in 0..total {
        if bytes[cell / 8] >> (cell % 8) & 1 == 1 {
            let (row, x) = (cell / n, cell % n);
            g.row_mut(row)[x / 64] |= 1 << (x % 64);
        }
    }
    Ok(g)
}
