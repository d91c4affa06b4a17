//! Run every executor on the same product. Integer data makes all of them
//! agree bit for bit; float data shows the warp kernel's reassociation error.
//!
//!     cargo run --release --example spmv_engines

use std::time::Instant;

use macko::bench::{checksum, cmd_spmv, Engine};
use macko::density::gen_random_macko;
use macko::exec::{max_relative_error, WARP_FLOAT_ERROR_BOUND};
use macko::{gen_vector, reference_spmv, warp_spmv, MackoParams, Result, ValueMode, WarpConfig};

fn main() -> Result<()> {
    let n = 2048;
    for mode in [ValueMode::Integer, ValueMode::Float] {
        let m = gen_random_macko(n, n, 0.5, 7, mode, MackoParams::default())?;
        let v = gen_vector(n, 7, mode);
        println!("{mode} mode, {n}x{n}, d=0.5");
        for engine in Engine::ALL {
            let t = Instant::now();
            let r = cmd_spmv(&m, &v, engine, false)?;
            println!("  {:<9} {}  {:>9} bytes  {:.2?}", engine.name(), &r.checksum[..16], r.traffic.total_bytes(), t.elapsed());
        }
        let warp = warp_spmv(&m, &v, WarpConfig::default())?;
        let reference = reference_spmv(&m, &v)?;
        let err = max_relative_error(&m, &v, &warp, &reference)?;
        println!(
            "  warp vs reference: same checksum {}, max relative error {err:.2e} (bound {WARP_FLOAT_ERROR_BOUND:.2e})",
            checksum(&warp) == checksum(&reference)
        );
    }
    Ok(())
}
