//! Roofline cost model for matrix-vector products.
//!
//! Runtime is `max(bytes / bandwidth, flops / peak_flops)`. On every shipped
//! device the compute intensity of (Sp)MV is far below the ops-per-byte
//! ratio, so predicted speedups reduce to traffic ratios. Only the OPB of each
//! profile is meaningful; absolute runtimes are illustrative.

use std::path::Path;

use serde::Deserialize;

use crate::density::{effd, FormatCostModel, ROW_POINTER_BITS};
use crate::format::{CsrMatrix, DeltaWidth, IndexWidth, MackoMatrix, VALUE_BITS};
use crate::{Error, Result};

const VALUE_BYTES: u64 = (VALUE_BITS / 8) as u64;
const ROW_POINTER_BYTES: u64 = (ROW_POINTER_BITS / 8) as u64;

/// Compute intensity of dense MV with 16-bit operands:
/// `2RC / (2(RC + R + C))`.
pub fn ci_mv(rows: usize, cols: usize) -> f64 {
    let (r, c) = (rows as f64, cols as f64);
    2.0 * r * c / (2.0 * (r * c + r + c))
}

/// Compute intensity of SpMV: `2dRC / (2(effd RC + R + C))`.
pub fn ci_spmv(d: f64, effd: f64, rows: usize, cols: usize) -> Result<f64> {
    if effd.is_nan() || effd <= 0.0 {
        return Err(Error::Config(format!("effective density must be positive, got {effd}")));
    }
    let (r, c) = (rows as f64, cols as f64);
    Ok(2.0 * d * r * c / (2.0 * (effd * r * c + r + c)))
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DeviceProfile {
    pub name: String,
    /// Peak 16-bit FLOP/s.
    pub flops: f64,
    pub bandwidth_bytes_per_s: f64,
}

impl DeviceProfile {
    pub fn opb(&self) -> f64 {
        self.flops / self.bandwidth_bytes_per_s
    }

    /// 1008 GB/s at OPB 80.
    pub fn rtx4090() -> Self {
        Self::with_opb("rtx4090", 1.008e12, 80.0)
    }

    /// 936 GB/s at OPB 38.
    pub fn rtx3090() -> Self {
        Self::with_opb("rtx3090", 936.0e9, 38.0)
    }

    /// 496 GB/s at OPB 45.
    pub fn rtx2080() -> Self {
        Self::with_opb("rtx2080", 496.0e9, 45.0)
    }

    fn with_opb(name: &str, bandwidth: f64, opb: f64) -> Self {
        Self { name: name.into(), flops: bandwidth * opb, bandwidth_bytes_per_s: bandwidth }
    }

    pub fn builtin() -> Vec<Self> {
        vec![Self::rtx4090(), Self::rtx3090(), Self::rtx2080()]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Self::builtin().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
    }

    /// Parse a `key = value` profile with `name`, `flops` and
    /// `bandwidth_bytes_per_s`.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !(p.flops > 0.0 && p.bandwidth_bytes_per_s > 0.0) {
            return Err(Error::Config(format!("profile {:?} needs positive flops and bandwidth", p.name)));
        }
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    /// Builtin name or path to a profile file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match Self::by_name(spec) {
            Some(p) => Ok(p),
            None => Self::load(spec),
        }
    }
}

/// How often the input vector is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorTraffic {
    /// Read once, as if it stayed in cache.
    #[default]
    Once,
    /// One 16-bit load per stored entry.
    PerEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrafficReport {
    pub bytes_matrix: u64,
    pub bytes_vector_in: u64,
    pub bytes_vector_out: u64,
    pub flops: u64,
}

impl TrafficReport {
    pub fn total_bytes(&self) -> u64 {
        self.bytes_matrix + self.bytes_vector_in + self.bytes_vector_out
    }

    fn with_vectors(bytes_matrix: u64, rows: usize, cols: usize, loads: u64, flops: u64, mode: VectorTraffic) -> Self {
        let bytes_vector_in = match mode {
            VectorTraffic::Once => VALUE_BYTES * cols as u64,
            VectorTraffic::PerEntry => VALUE_BYTES * loads,
        };
        Self { bytes_matrix, bytes_vector_in, bytes_vector_out: VALUE_BYTES * rows as u64, flops }
    }

    pub fn dense(rows: usize, cols: usize, mode: VectorTraffic) -> Self {
        let cells = rows as u64 * cols as u64;
        Self::with_vectors(VALUE_BYTES * cells, rows, cols, cells, 2 * cells, mode)
    }

    pub fn csr(rows: usize, cols: usize, nnz: usize, index: IndexWidth, mode: VectorTraffic) -> Self {
        let nnz = nnz as u64;
        let index_bytes = index.bits() as u64 / 8;
        let bytes = nnz * (VALUE_BYTES + index_bytes) + ROW_POINTER_BYTES * (rows as u64 + 1);
        Self::with_vectors(bytes, rows, cols, nnz, 2 * nnz, mode)
    }

    /// Value and delta arrays without their alignment tails, plus row pointers.
    pub fn macko(rows: usize, cols: usize, pad_nnz: usize, nnz: usize, width: DeltaWidth, mode: VectorTraffic) -> Self {
        let bytes = VALUE_BYTES * pad_nnz as u64
            + width.packed_len(pad_nnz) as u64
            + ROW_POINTER_BYTES * (rows as u64 + 1);
        Self::with_vectors(bytes, rows, cols, pad_nnz as u64, 2 * nnz as u64, mode)
    }

    /// Traffic implied by a closed-form model at density `d`; matrix bytes
    /// are `effd * R * C * 2`, rounded to whole bytes.
    pub fn from_model(model: &FormatCostModel, d: f64, rows: usize, cols: usize) -> Result<Self> {
        let e = effd(model, d, rows, cols)?;
        let cells = rows as f64 * cols as f64;
        let bytes = (e * cells * model.value_bits as f64 / 8.0).round() as u64;
        let flops = (2.0 * d * cells).round() as u64;
        Ok(Self::with_vectors(bytes, rows, cols, 0, flops, VectorTraffic::Once))
    }
}

/// The matrix side of an SpMV for traffic accounting.
#[derive(Debug, Clone, Copy)]
pub enum MatrixRef<'a> {
    Dense { rows: usize, cols: usize },
    Csr(&'a CsrMatrix),
    Macko(&'a MackoMatrix),
}

pub fn spmv_traffic(m: MatrixRef<'_>, mode: VectorTraffic) -> TrafficReport {
    match m {
        MatrixRef::Dense { rows, cols } => TrafficReport::dense(rows, cols, mode),
        MatrixRef::Csr(c) => TrafficReport::csr(c.rows(), c.cols(), c.nnz(), c.index_width(), mode),
        MatrixRef::Macko(k) => {
            TrafficReport::macko(k.rows(), k.cols(), k.pad_nnz(), k.nnz(), k.params().delta_width(), mode)
        }
    }
}

pub fn predict_runtime(t: &TrafficReport, dev: &DeviceProfile) -> f64 {
    let memory = t.total_bytes() as f64 / dev.bandwidth_bytes_per_s;
    let compute = t.flops as f64 / dev.flops;
    memory.max(compute)
}

/// How many times faster `a` runs than `b`.
pub fn predict_speedup(a: &TrafficReport, b: &TrafficReport, dev: &DeviceProfile) -> f64 {
    predict_runtime(b, dev) / predict_runtime(a, dev)
}
