//! Sparse matrix-vector multiplication for low and moderate sparsity.
//!
//! The crate is organised around one storage format: rows are stored as
//! 16-bit values next to fixed-width column deltas, with explicit zero entries
//! inserted whenever a gap between two nonzeros does not fit in the delta
//! width. Around that format it provides
//!
//! * lossless conversions between dense, CSR and the delta format ([`format`]),
//! * closed-form and measured effective-density models plus pattern
//!   generators ([`density`]),
//! * SpMV executors, including a lockstep emulation of a 32-lane warp kernel
//!   ([`exec`]),
//! * roofline traffic and speedup predictions ([`perf`]),
//! * a bit-exact binary container and a Matrix Market reader ([`io`]),
//! * the benchmark driver used by the `macko` binary ([`bench`], [`cli`]).
//!
//! The runnable programs under `examples/` walk through each of these.

pub mod bench;
pub mod cli;
pub mod density;
mod error;
pub mod exec;
pub mod format;
pub mod io;
pub mod perf;

pub use error::{Error, Result};
pub use half::f16;

pub use density::{
    effd, expected_pad_count, gen_random, gen_random_with, gen_vector, gen_worst_case,
    measured_effd, Format, FormatCostModel, ValueMode,
};
pub use exec::{
    csr_spmv, dense_mv, reference_spmv, warp_prefix_sum, warp_spmv, Vector, WarpConfig,
};
pub use format::{
    csr_from_dense, dense_from_macko, macko_from_csr, pack_deltas, padding_count,
    unpack_deltas, CsrMatrix, DeltaWidth, DenseMatrix, IndexWidth, MackoMatrix, MackoParams,
};
pub use perf::{ci_mv, ci_spmv, predict_runtime, predict_speedup, spmv_traffic, DeviceProfile, TrafficReport};
