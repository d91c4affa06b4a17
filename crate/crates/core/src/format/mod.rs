//! Dense, CSR and delta-compressed matrix containers and the conversions
//! between them.

mod csr;
mod delta;
mod dense;
mod macko;

pub use csr::{csr_from_dense, CsrMatrix, IndexWidth};
pub use delta::{pack_deltas, unpack_deltas, DeltaWidth};
pub use dense::DenseMatrix;
pub use macko::{
    build_rows, dense_from_macko, macko_from_csr, padding_count, MackoBuilder, MackoMatrix,
    MackoParams, RowEntries, ARRAY_ALIGN_BYTES, VALUE_BITS,
};

pub(crate) use delta::code_at;
pub(crate) use dense::is_zero;
pub(crate) use macko::{aligned_deltas_len, aligned_values_len};
