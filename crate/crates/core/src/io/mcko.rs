//! The `MCKO` file layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "MCKO"
//!      4     2  version (1)
//!      6     1  bits per value (16)
//!      7     1  bits per delta (1, 2, 4 or 8)
//!      8     8  rows R
//!     16     8  cols C
//!     24     8  pad_nnz (stored entries including padding)
//!     32        row pointers, (R + 1) x u32
//!               packed deltas, zero padded to a multiple of 16 bytes
//!               values, (pad_nnz rounded up to 8) x f16
//! ```
//!
//! Deltas are stored as `delta - 1`, least significant bits first within
//! each byte.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use half::f16;

use crate::format::{aligned_deltas_len, aligned_values_len, MackoMatrix, MackoParams};
use crate::{Error, Result};

pub const MAGIC: [u8; 4] = *b"MCKO";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

pub fn write_macko<W: Write>(m: &MackoMatrix, mut sink: W) -> Result<()> {
    let p = m.params();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.push(p.value_bits());
    header.push(p.b_delta());
    header.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    header.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    header.extend_from_slice(&(m.pad_nnz() as u64).to_le_bytes());
    sink.write_all(&header)?;

    let mut buf = Vec::with_capacity(4 * m.row_pointers().len());
    for rp in m.row_pointers() {
        buf.extend_from_slice(&rp.to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.write_all(m.packed_deltas())?;
    buf.clear();
    for v in m.values() {
        buf.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(())
}

fn read_section<R: Read>(source: &mut R, len: u64, what: &'static str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    source.by_ref().take(len).read_to_end(&mut buf)?;
    if buf.len() as u64 != len {
        return Err(Error::Truncated(what));
    }
    Ok(buf)
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn read_macko<R: Read>(mut source: R) -> Result<MackoMatrix> {
    let mut header = [0u8; HEADER_LEN];
    source.read_exact(&mut header).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::Truncated("header"),
        _ => Error::Io(e),
    })?;
    let magic: [u8; 4] = header[0..4].try_into().expect("4 bytes");
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let params = MackoParams::from_bits(header[6], header[7])?;
    let (rows, cols, pad_nnz) = (u64_at(&header, 8), u64_at(&header, 16), u64_at(&header, 24));
    if pad_nnz > u32::MAX as u64 {
        return Err(Error::TooLarge(pad_nnz));
    }
    let too_big = |n: u64| usize::try_from(n).map_err(|_| Error::Corrupt(format!("dimension {n} does not fit in memory")));
    let (rows, cols, pad_nnz) = (too_big(rows)?, too_big(cols)?, pad_nnz as usize);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidShape { rows, cols });
    }

    let rp_bytes = read_section(&mut source, 4 * (rows as u64 + 1), "row pointers")?;
    let row_pointers: Vec<u32> =
        rp_bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    if row_pointers[rows] as usize != pad_nnz {
        return Err(Error::Corrupt(format!(
            "header says {pad_nnz} stored entries, row pointers end at {}",
            row_pointers[rows]
        )));
    }
    let delta_len = aligned_deltas_len(pad_nnz, params.delta_width());
    let packed_deltas = read_section(&mut source, delta_len as u64, "packed deltas")?;
    let value_len = aligned_values_len(pad_nnz);
    let value_bytes = read_section(&mut source, 2 * value_len as u64, "values")?;
    let values = value_bytes
        .chunks_exact(2)
        .map(|c| f16::from_bits(u16::from_le_bytes([c[0], c[1]])))
        .collect();

    MackoMatrix::from_parts(rows, cols, params, row_pointers, packed_deltas, values)
}

pub fn save_macko(m: &MackoMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_macko(m, BufWriter::new(File::create(path)?))
}

pub fn load_macko(path: impl AsRef<Path>) -> Result<MackoMatrix> {
    read_macko(BufReader::new(File::open(path)?))
}
