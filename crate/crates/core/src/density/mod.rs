//! Effective-density models, measured density of encodings, and the pattern
//! generators realising best, worst and expected padding.

mod generate;
mod model;

pub(crate) use generate::random_row;
pub use generate::{gen_random, gen_random_macko, gen_random_with, gen_vector, gen_worst_case, ValueMode};
pub use model::{
    crossover_density, density_at_effd, effd, expected_pad_count, macko_effd_from_counts, measured_effd,
    measured_effd_with, row_pointer_effd, tile_count, Format, FormatCostModel, ROW_POINTER_BITS,
    TILE_COLS, TILE_ROWS,
};
