//! The delta-compressed row format.
//!
//! Each row is stored as a run of `(value, delta)` pairs. The delta is the
//! distance from the previous stored column, with a virtual column `-1`
//! before every row, so a nonzero in column 0 has delta 1. Deltas are limited
//! to `[1, 2^b_delta]`; a longer gap is bridged by explicit zero entries placed
//! greedily every `2^b_delta` columns. Values and packed deltas share one set
//! of element offsets (`row_pointers`), which is what keeps the two arrays
//! mutually aligned for vector loads.
//!
//! Both arrays are zero padded at the end to a multiple of 16 bytes.

use std::ops::Range;

use half::f16;
use rayon::prelude::*;

use super::delta::{code_at, delta_at, DeltaPacker, DeltaWidth};
use super::dense::{check_shape, is_zero};
use super::{CsrMatrix, DenseMatrix};
use crate::{Error, Result};

/// Bits per stored value. Only 16-bit values are supported.
pub const VALUE_BITS: u8 = 16;

/// Alignment of the value and delta arrays, in bytes.
pub const ARRAY_ALIGN_BYTES: usize = 16;

const VALUES_PER_ALIGN: usize = ARRAY_ALIGN_BYTES / 2;

/// Rows encoded per parallel batch when building large matrices.
const ENCODE_BATCH_ROWS: usize = 256;

/// Smaller batches are encoded on the calling thread.
const SEQUENTIAL_BELOW_ROWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MackoParams {
    value_bits: u8,
    delta_width: DeltaWidth,
}

impl MackoParams {
    pub fn new(b_delta: u8) -> Result<Self> {
        Ok(Self::with_width(DeltaWidth::new(b_delta)?))
    }

    pub fn with_width(delta_width: DeltaWidth) -> Self {
        Self { value_bits: VALUE_BITS, delta_width }
    }

    /// Used by the file reader, which carries the value width explicitly.
    pub fn from_bits(value_bits: u8, b_delta: u8) -> Result<Self> {
        if value_bits != VALUE_BITS {
            return Err(Error::InvalidValueWidth(value_bits));
        }
        Self::new(b_delta)
    }

    pub fn value_bits(&self) -> u8 {
        self.value_bits
    }

    pub fn b_delta(&self) -> u8 {
        self.delta_width.bits()
    }

    pub fn delta_width(&self) -> DeltaWidth {
        self.delta_width
    }

    pub fn max_delta(&self) -> u32 {
        self.delta_width.max_delta()
    }
}

impl Default for MackoParams {
    fn default() -> Self {
        Self::with_width(DeltaWidth::FOUR)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MackoMatrix {
    rows: usize,
    cols: usize,
    params: MackoParams,
    values: Vec<f16>,
    packed_deltas: Vec<u8>,
    row_pointers: Vec<u32>,
}

impl MackoMatrix {
    /// Assemble a matrix from its raw arrays and check every invariant:
    /// row pointer shape, tail lengths and zero tails, decoded columns within
    /// bounds, and padding entries stored as `+0.0`.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        params: MackoParams,
        row_pointers: Vec<u32>,
        packed_deltas: Vec<u8>,
        values: Vec<f16>,
    ) -> Result<Self> {
        check_shape(rows, cols)?;
        if row_pointers.len() != rows + 1 {
            return Err(Error::DataLength { expected: rows + 1, actual: row_pointers.len() });
        }
        if row_pointers[0] != 0 {
            return Err(Error::RowPointers("first row pointer is not zero".into()));
        }
        if let Some(r) = row_pointers.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::RowPointers(format!("row {r} ends before it starts")));
        }
        let pad_nnz = row_pointers[rows] as usize;
        let width = params.delta_width();

        let values_len = aligned_values_len(pad_nnz);
        if values.len() != values_len {
            return Err(Error::DataLength { expected: values_len, actual: values.len() });
        }
        let deltas_len = aligned_deltas_len(pad_nnz, width);
        if packed_deltas.len() != deltas_len {
            return Err(Error::DataLength { expected: deltas_len, actual: packed_deltas.len() });
        }
        if values[pad_nnz..].iter().any(|v| v.to_bits() != 0) {
            return Err(Error::Corrupt("nonzero bytes in the value tail".into()));
        }
        if (pad_nnz..deltas_len * width.per_byte()).any(|i| code_at(&packed_deltas, i, width) != 0) {
            return Err(Error::Corrupt("nonzero bits in the delta tail".into()));
        }
        if let Some(i) = values[..pad_nnz].iter().position(|v| is_zero(*v) && v.to_bits() != 0) {
            return Err(Error::Corrupt(format!("padding entry {i} is a negative zero")));
        }

        let m = Self { rows, cols, params, values, packed_deltas, row_pointers };
        // deltas are at least 1, so the last column of a row is its largest
        for r in 0..rows {
            if let Some((col, _)) = m.row_entries(r).last() {
                if col >= cols as u64 {
                    return Err(Error::ColumnOutOfBounds { row: r, col, cols });
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn params(&self) -> MackoParams {
        self.params
    }

    /// Stored entries including padding, excluding the alignment tail.
    pub fn pad_nnz(&self) -> usize {
        self.row_pointers[self.rows] as usize
    }

    /// Stored entries that are real nonzeros.
    pub fn nnz(&self) -> usize {
        self.values[..self.pad_nnz()].iter().filter(|v| !is_zero(**v)).count()
    }

    /// Explicit zeros inserted to bound the deltas.
    pub fn padding_count(&self) -> usize {
        self.pad_nnz() - self.nnz()
    }

    /// Values array including the zero tail.
    pub fn values(&self) -> &[f16] {
        &self.values
    }

    /// Packed delta bytes including the zero tail.
    pub fn packed_deltas(&self) -> &[u8] {
        &self.packed_deltas
    }

    pub fn row_pointers(&self) -> &[u32] {
        &self.row_pointers
    }

    pub fn row_range(&self, row: usize) -> Range<usize> {
        self.row_pointers[row] as usize..self.row_pointers[row + 1] as usize
    }

    /// Decoded delta of stored element `index`.
    #[inline]
    pub fn delta(&self, index: usize) -> u32 {
        delta_at(&self.packed_deltas, index, self.params.delta_width())
    }

    /// Stored `(column, value)` pairs of a row, padding included.
    pub fn row_entries(&self, row: usize) -> RowEntries<'_> {
        RowEntries { matrix: self, range: self.row_range(row), col: -1 }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols).expect("shape validated");
        for r in 0..self.rows {
            for (c, v) in self.row_entries(r) {
                if !is_zero(v) {
                    out.set(r, c as usize, v);
                }
            }
        }
        out
    }

    /// Drop padding and expand deltas back into absolute column indices.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut values = Vec::with_capacity(self.pad_nnz());
        let mut cols = Vec::with_capacity(self.pad_nnz());
        let mut row_pointers = Vec::with_capacity(self.rows + 1);
        row_pointers.push(0u32);
        for r in 0..self.rows {
            for (c, v) in self.row_entries(r) {
                if !is_zero(v) {
                    cols.push(c as u32);
                    values.push(v);
                }
            }
            row_pointers.push(values.len() as u32);
        }
        CsrMatrix::from_parts(self.rows, self.cols, values, cols, row_pointers)
            .expect("decoded rows are canonical")
    }
}

pub struct RowEntries<'a> {
    matrix: &'a MackoMatrix,
    range: Range<usize>,
    col: i64,
}

impl Iterator for RowEntries<'_> {
    type Item = (u64, f16);

    fn next(&mut self) -> Option<Self::Item> {
        let i = self.range.next()?;
        self.col += self.matrix.delta(i) as i64;
        Some((self.col as u64, self.matrix.values[i]))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.range.size_hint()
    }
}

impl ExactSizeIterator for RowEntries<'_> {}

pub(crate) fn aligned_values_len(pad_nnz: usize) -> usize {
    pad_nnz.next_multiple_of(VALUES_PER_ALIGN)
}

pub(crate) fn aligned_deltas_len(pad_nnz: usize, width: DeltaWidth) -> usize {
    width.packed_len(pad_nnz).next_multiple_of(ARRAY_ALIGN_BYTES)
}

/// Greedy encoding of one row into `(value, delta)` pairs.
///
/// Zero values in `entries` are skipped. Columns must be strictly increasing
/// and below `cols`.
fn encode_row(
    row: usize,
    entries: impl IntoIterator<Item = (u32, f16)>,
    cols: usize,
    max_delta: u32,
    values: &mut Vec<f16>,
    deltas: &mut Vec<u32>,
) -> Result<()> {
    let max = max_delta as i64;
    let mut prev: i64 = -1;
    let mut last_col: Option<u32> = None;
    for (c, v) in entries {
        if c as usize >= cols {
            return Err(Error::ColumnOutOfBounds { row, col: c as u64, cols });
        }
        if last_col.is_some_and(|p| c <= p) {
            return Err(Error::UnsortedRow { row });
        }
        last_col = Some(c);
        if is_zero(v) {
            continue;
        }
        let c = c as i64;
        while c - prev > max {
            values.push(f16::ZERO);
            deltas.push(max_delta);
            prev += max;
        }
        values.push(v);
        deltas.push((c - prev) as u32);
        prev = c;
    }
    Ok(())
}

/// Row-at-a-time construction of a [`MackoMatrix`].
#[derive(Debug, Clone)]
pub struct MackoBuilder {
    cols: usize,
    params: MackoParams,
    values: Vec<f16>,
    deltas: DeltaPacker,
    row_pointers: Vec<u32>,
    scratch_values: Vec<f16>,
    scratch_deltas: Vec<u32>,
}

impl MackoBuilder {
    pub fn new(cols: usize, params: MackoParams) -> Result<Self> {
        check_shape(1, cols)?;
        Ok(Self {
            cols,
            params,
            values: Vec::new(),
            deltas: DeltaPacker::new(params.delta_width()),
            row_pointers: vec![0],
            scratch_values: Vec::new(),
            scratch_deltas: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.row_pointers.len() - 1
    }

    /// Append the next row given its nonzeros as `(column, value)` pairs in
    /// increasing column order.
    pub fn push_row<I>(&mut self, entries: I) -> Result<()>
    where
        I: IntoIterator<Item = (u32, f16)>,
    {
        let mut values = std::mem::take(&mut self.scratch_values);
        let mut deltas = std::mem::take(&mut self.scratch_deltas);
        values.clear();
        deltas.clear();
        let row = self.rows();
        let res = encode_row(row, entries, self.cols, self.params.max_delta(), &mut values, &mut deltas)
            .and_then(|()| self.append_encoded(&values, &deltas));
        self.scratch_values = values;
        self.scratch_deltas = deltas;
        res
    }

    fn append_encoded(&mut self, values: &[f16], deltas: &[u32]) -> Result<()> {
        let end = self.values.len() as u64 + values.len() as u64;
        if end > u32::MAX as u64 {
            return Err(Error::TooLarge(end));
        }
        self.values.extend_from_slice(values);
        for &d in deltas {
            self.deltas.push_unchecked(d);
        }
        self.row_pointers.push(end as u32);
        Ok(())
    }

    pub fn finish(self) -> Result<MackoMatrix> {
        let rows = self.rows();
        check_shape(rows, self.cols)?;
        let pad_nnz = self.values.len();
        let width = self.params.delta_width();
        let mut values = self.values;
        values.resize(aligned_values_len(pad_nnz), f16::ZERO);
        let mut packed_deltas = self.deltas.into_bytes();
        packed_deltas.resize(aligned_deltas_len(pad_nnz, width), 0);
        Ok(MackoMatrix {
            rows,
            cols: self.cols,
            params: self.params,
            values,
            packed_deltas,
            row_pointers: self.row_pointers,
        })
    }
}

/// Build a matrix whose row `r` is produced by `fill(r, buf)`, encoding
/// batches of rows in parallel. The output does not depend on the number of
/// worker threads.
pub fn build_rows<F>(rows: usize, cols: usize, params: MackoParams, fill: F) -> Result<MackoMatrix>
where
    F: Fn(usize, &mut Vec<(u32, f16)>) -> Result<()> + Sync,
{
    check_shape(rows, cols)?;
    let mut builder = MackoBuilder::new(cols, params)?;
    let max_delta = params.max_delta();
    let encode = |buf: &mut Vec<(u32, f16)>, r: usize| {
        buf.clear();
        fill(r, buf)?;
        let mut values = Vec::new();
        let mut deltas = Vec::new();
        encode_row(r, buf.iter().copied(), cols, max_delta, &mut values, &mut deltas)?;
        Ok((values, deltas))
    };
    let mut start = 0;
    while start < rows {
        let end = (start + ENCODE_BATCH_ROWS).min(rows);
        let encoded: Vec<(Vec<f16>, Vec<u32>)> = if end - start < SEQUENTIAL_BELOW_ROWS {
            let mut buf = Vec::new();
            (start..end).map(|r| encode(&mut buf, r)).collect::<Result<_>>()?
        } else {
            (start..end).into_par_iter().map_init(Vec::new, encode).collect::<Result<_>>()?
        };
        for (values, deltas) in &encoded {
            builder.append_encoded(values, deltas)?;
        }
        start = end;
    }
    builder.finish()
}

/// Encode a CSR matrix with greedy padding.
pub fn macko_from_csr(m: &CsrMatrix, params: MackoParams) -> Result<MackoMatrix> {
    build_rows(m.rows(), m.cols(), params, |r, buf| {
        let (cols, vals) = m.row(r);
        buf.extend(cols.iter().copied().zip(vals.iter().copied()));
        Ok(())
    })
}

/// Lossless reconstruction of the dense matrix.
pub fn dense_from_macko(m: &MackoMatrix) -> Result<DenseMatrix> {
    let mut out = DenseMatrix::zeros(m.rows(), m.cols())?;
    for r in 0..m.rows() {
        for (c, v) in m.row_entries(r) {
            if c >= m.cols() as u64 {
                return Err(Error::ColumnOutOfBounds { row: r, col: c, cols: m.cols() });
            }
            if !is_zero(v) {
                out.set(r, c as usize, v);
            }
        }
    }
    Ok(out)
}

pub fn padding_count(m: &MackoMatrix) -> usize {
    m.padding_count()
}
