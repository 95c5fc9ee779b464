//! `PLM1` metric tables.
//!
//! Layout, integers little-endian `u32`: magic `b"PLM1"`, point count,
//! level, alphabet size (10 or 9), prefix length, one byte per prefix
//! letter (its digit), then the strict upper triangle in row-major order
//! as unsigned 16.16 fixed point.

use std::io::{Read, Write};

use super::{MetricMatrix, Universe};
use crate::error::{Error, Result};
use crate::rule::{Alphabet, Letter, Word};

pub const PLM_MAGIC: &[u8; 4] = b"PLM1";
const SCALE: f64 = 65536.0;

fn io_err(e: std::io::Error) -> Error {
    Error::Format(format!("PLM1 stream: {e}"))
}

pub fn write_plm<W: Write>(d: &MetricMatrix, mut out: W) -> Result<()> {
    let u = d.universe();
    let mut buf = Vec::with_capacity(24 + 4 * d.upper().len());
    buf.extend_from_slice(PLM_MAGIC);
    for x in [d.len() as u32, u.level, u.alphabet.size() as u32, u.prefix.len() as u32] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf.extend(u.prefix.letters().iter().map(|l| l.digit()));
    for (k, &x) in d.upper().iter().enumerate() {
        let fixed = (x * SCALE).round();
        if !(0.0..=u32::MAX as f64).contains(&fixed) {
            return Err(Error::domain(format!("entry {k} = {x} does not fit 16.16 fixed point")));
        }
        buf.extend_from_slice(&(fixed as u32).to_le_bytes());
    }
    out.write_all(&buf).map_err(io_err)
}

pub fn read_plm<R: Read>(mut input: R) -> Result<MetricMatrix> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(io_err)?;
    let mut at = 0usize;
    let mut take = |k: usize| -> Result<&[u8]> {
        let s = bytes
            .get(at..at + k)
            .ok_or_else(|| Error::Format("PLM1 stream is truncated".into()))?;
        at += k;
        Ok(s)
    };
    if take(4)? != PLM_MAGIC {
        return Err(Error::Format("not a PLM1 stream".into()));
    }
    let mut word = || -> Result<u32> { Ok(u32::from_le_bytes(take(4)?.try_into().unwrap())) };
    let (count, level, size, plen) = (word()?, word()?, word()?, word()?);
    let alphabet = match size {
        10 => Alphabet::Pillow,
        9 => Alphabet::Grid,
        s => return Err(Error::Format(format!("alphabet size {s}"))),
    };
    let prefix = take(plen as usize)?
        .iter()
        .map(|&b| Letter::from_digit(b).ok_or_else(|| Error::Format(format!("prefix byte {b}"))))
        .collect::<Result<Vec<_>>>()?;
    let universe = Universe::new(alphabet, level, Word::new(prefix)).map_err(|e| Error::Format(e.to_string()))?;
    if universe.len() != count as usize {
        return Err(Error::Format(format!(
            "header says {count} points, the universe has {}",
            universe.len()
        )));
    }
    let n = count as usize;
    let m = n * n.saturating_sub(1) / 2;
    let raw = take(4 * m)?;
    let upper: Vec<f64> = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as f64 / SCALE)
        .collect();
    if at != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - at)));
    }
    let d = MetricMatrix::from_upper_unchecked(universe, upper);
    d.validate_beyond(3.0 / SCALE)?;
    Ok(d)
}
