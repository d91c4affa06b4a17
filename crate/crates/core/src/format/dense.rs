use half::f16;

use crate::{Error, Result};

/// Row-major matrix of 16-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f16>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f16>) -> Result<Self> {
        check_shape(rows, cols)?;
        let expected = rows.checked_mul(cols).ok_or(Error::InvalidShape { rows, cols })?;
        if data.len() != expected {
            return Err(Error::DataLength { expected, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        let len = rows.checked_mul(cols).ok_or(Error::InvalidShape { rows, cols })?;
        Ok(Self { rows, cols, data: vec![f16::ZERO; len] })
    }

    /// Rounds every entry to the nearest 16-bit float.
    pub fn from_f32(rows: usize, cols: usize, data: &[f32]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| f16::from_f32(x)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f16] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f16 {
        self.data[row * self.cols + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: f16) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f16] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Count of entries that are not (positive or negative) zero.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| !is_zero(**v)).count()
    }
}

pub(crate) fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidShape { rows, cols });
    }
    Ok(())
}

/// Both signed zeros count as pruned entries.
#[inline]
pub(crate) fn is_zero(v: f16) -> bool {
    v.to_bits() & 0x7FFF == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(matches!(DenseMatrix::zeros(0, 3), Err(Error::InvalidShape { .. })));
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![f16::ONE; 3]),
            Err(Error::DataLength { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn tiny_values_round_to_zero() {
        let m = DenseMatrix::from_f32(1, 3, &[1e-9, -1e-9, 0.5]).unwrap();
        assert_eq!(m.nnz(), 1);
    }
}
