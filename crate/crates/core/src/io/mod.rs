//! Binary container for encoded matrices and a Matrix Market reader.

mod mcko;
mod mtx;

pub use mcko::{load_macko, read_macko, save_macko, write_macko, HEADER_LEN, MAGIC, VERSION};
pub use mtx::{load_matrix_market, read_matrix_market, write_matrix_market};
