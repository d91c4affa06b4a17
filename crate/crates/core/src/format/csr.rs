use half::f16;
use rayon::prelude::*;

use super::dense::{check_shape, is_zero};
use super::DenseMatrix;
use crate::{Error, Result};

/// Width of the stored column indices. Only affects cost accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum IndexWidth {
    U16,
    #[default]
    U32,
}

impl IndexWidth {
    pub fn bits(self) -> u32 {
        match self {
            IndexWidth::U16 => 16,
            IndexWidth::U32 => 32,
        }
    }
}

/// Classic compressed sparse row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f16>,
    column_indices: Vec<u32>,
    row_pointers: Vec<u32>,
    index_width: IndexWidth,
}

impl CsrMatrix {
    /// Build from raw arrays, checking that they describe a canonical matrix:
    /// monotone row pointers, strictly increasing in-bounds columns per row and
    /// no stored zeros.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        values: Vec<f16>,
        column_indices: Vec<u32>,
        row_pointers: Vec<u32>,
    ) -> Result<Self> {
        check_shape(rows, cols)?;
        if row_pointers.len() != rows + 1 {
            return Err(Error::DataLength { expected: rows + 1, actual: row_pointers.len() });
        }
        if values.len() != column_indices.len() {
            return Err(Error::DataLength { expected: values.len(), actual: column_indices.len() });
        }
        if row_pointers[0] != 0 || row_pointers[rows] as usize != values.len() {
            return Err(Error::RowPointers(format!(
                "expected to span 0..{}, got {}..{}",
                values.len(),
                row_pointers[0],
                row_pointers[rows]
            )));
        }
        for r in 0..rows {
            let (lo, hi) = (row_pointers[r] as usize, row_pointers[r + 1] as usize);
            if lo > hi {
                return Err(Error::RowPointers(format!("row {r} ends before it starts")));
            }
            let mut prev: Option<u32> = None;
            for i in lo..hi {
                let c = column_indices[i];
                if c as usize >= cols {
                    return Err(Error::ColumnOutOfBounds { row: r, col: c as u64, cols });
                }
                if prev.is_some_and(|p| c <= p) {
                    return Err(Error::UnsortedRow { row: r });
                }
                if is_zero(values[i]) {
                    return Err(Error::StoredZero { row: r });
                }
                prev = Some(c);
            }
        }
        Ok(Self { rows, cols, values, column_indices, row_pointers, index_width: IndexWidth::U32 })
    }

    pub fn with_index_width(mut self, width: IndexWidth) -> Self {
        self.index_width = width;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f16] {
        &self.values
    }

    pub fn column_indices(&self) -> &[u32] {
        &self.column_indices
    }

    pub fn row_pointers(&self) -> &[u32] {
        &self.row_pointers
    }

    pub fn index_width(&self) -> IndexWidth {
        self.index_width
    }

    /// Columns and values of one row.
    pub fn row(&self, row: usize) -> (&[u32], &[f16]) {
        let (lo, hi) = (self.row_pointers[row] as usize, self.row_pointers[row + 1] as usize);
        (&self.column_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols).expect("shape validated");
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out.set(r, c as usize, v);
            }
        }
        out
    }
}

/// Collect the nonzeros of `m` in row-major order. Zeros of either sign are
/// dropped.
pub fn csr_from_dense(m: &DenseMatrix) -> CsrMatrix {
    let split = |r: usize| {
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for (c, &v) in m.row(r).iter().enumerate() {
            if !is_zero(v) {
                cols.push(c as u32);
                vals.push(v);
            }
        }
        (cols, vals)
    };
    // small inputs are not worth waking the thread pool for
    let per_row: Vec<(Vec<u32>, Vec<f16>)> = if m.rows() < 16 {
        (0..m.rows()).map(split).collect()
    } else {
        (0..m.rows()).into_par_iter().map(split).collect()
    };

    let nnz: usize = per_row.iter().map(|(c, _)| c.len()).sum();
    let mut values = Vec::with_capacity(nnz);
    let mut column_indices = Vec::with_capacity(nnz);
    let mut row_pointers = Vec::with_capacity(m.rows() + 1);
    row_pointers.push(0u32);
    for (cols, vals) in per_row {
        column_indices.extend_from_slice(&cols);
        values.extend_from_slice(&vals);
        row_pointers.push(values.len() as u32);
    }
    CsrMatrix {
        rows: m.rows(),
        cols: m.cols(),
        values,
        column_indices,
        row_pointers,
        index_width: IndexWidth::U32,
    }
}
