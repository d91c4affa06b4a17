//! Predicted speedup over dense for a few matrix shapes across the sparsity
//! grid, as CSV. The same sweep runs from a scenario file with
//! `macko bench scenarios/square.toml`.
//!
//!     cargo run --release --example bench_sweep

use macko::bench::{cmd_bench, BenchFormat, BenchScenario, Shape};
use macko::{DeviceProfile, Format, Result};

fn main() -> Result<()> {
    let mut s = BenchScenario::new(vec![Shape::new(4096, 4096), Shape::new(4096, 11008)]);
    s.sparsity = vec![0.0, 0.3, 0.5, 0.7, 0.9, 0.95];
    s.formats = vec![
        BenchFormat::Dense,
        BenchFormat::Csr32,
        BenchFormat::Macko,
        BenchFormat::Model(Format::MackoBest),
        BenchFormat::Model(Format::Bitmask),
    ];
    s.device = DeviceProfile::rtx3090();
    s.seed = 1;
    print!("{}", cmd_bench(&s, 2)?);
    Ok(())
}
