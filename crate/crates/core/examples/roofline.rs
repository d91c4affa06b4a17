//! Roofline predictions: compute intensity against each device's ops per
//! byte, and the speedup over dense MV implied by traffic alone.
//!
//!     cargo run --example roofline

use macko::perf::VectorTraffic;
use macko::{ci_mv, ci_spmv, effd, predict_speedup, DeviceProfile, Format, FormatCostModel, Result, TrafficReport};

fn main() -> Result<()> {
    let n = 12288;
    println!("dense MV compute intensity at {n}x{n}: {:.6}", ci_mv(n, n));
    for dev in DeviceProfile::builtin() {
        println!("{:<8} OPB {:>4.0}", dev.name, dev.opb());
    }

    let dev = DeviceProfile::rtx4090();
    let dense = TrafficReport::dense(n, n, VectorTraffic::Once);
    println!("\nsparsity  {:>8} {:>8} {:>8} {:>8}  ci(expected)", "csr32", "best", "expected", "worst");
    for i in 0..=19 {
        let d = 1.0 - i as f64 / 20.0;
        let speedup = |f| -> Result<f64> {
            let t = TrafficReport::from_model(&FormatCostModel::new(f), d, n, n)?;
            Ok(predict_speedup(&t, &dense, &dev))
        };
        let e = effd(&FormatCostModel::new(Format::MackoExpected), d, n, n)?;
        println!(
            "{:>7.0}%  {:>8.3} {:>8.3} {:>8.3} {:>8.3}  {:.4}",
            100.0 * (1.0 - d),
            speedup(Format::Csr32)?,
            speedup(Format::MackoBest)?,
            speedup(Format::MackoExpected)?,
            speedup(Format::MackoWorst)?,
            ci_spmv(d, e, n, n)?
        );
    }
    Ok(())
}
