//! Drivers behind the `macko` binary: format conversion, effective-density
//! tables, single SpMV runs and scenario sweeps. Tables are returned as CSV
//! text with a header row; plotting is left to gnuplot or similar.

mod analyze;
mod commands;
mod scenario;
mod sweep;

pub use analyze::{analyze_grid, cmd_analyze, AnalyzeOptions};
pub use commands::{
    checksum, cmd_convert, cmd_gen, cmd_spmv, load_matrix, load_vector, write_vector, ConvertReport, Engine,
    GenSpec, Pattern, SpmvReport, Verification,
};
pub use scenario::{BenchFormat, BenchScenario, Shape, LLM_LAYER_SHAPES};
pub use sweep::{bench_csv, cmd_bench, run_bench, BenchRow, BENCH_HEADER};
