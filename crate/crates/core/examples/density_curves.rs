//! Effective density of each storage format against density, plus the
//! crossover points between them. Pipe into gnuplot with
//! `set datafile separator ','`.
//!
//!     cargo run --example density_curves > effd.csv

use macko::bench::{cmd_analyze, AnalyzeOptions};
use macko::density::{crossover_density, density_at_effd};
use macko::{DeltaWidth, Format, FormatCostModel, Result};

fn main() -> Result<()> {
    let opts = AnalyzeOptions { step: 0.05, ..Default::default() };
    print!("{}", cmd_analyze(&opts)?);

    let (r, c) = (opts.rows, opts.cols);
    let bitmask = FormatCostModel::new(Format::Bitmask);
    for width in DeltaWidth::ALL {
        let expected = FormatCostModel::new(Format::MackoExpected).with_delta_width(width);
        let bm = crossover_density(&expected, &bitmask, r, c, 0.05, 1.0)?;
        let half = density_at_effd(&expected, 0.5, r, c, 0.0, 1.0)?;
        let parity = density_at_effd(&expected, 1.0, r, c, 0.0, 1.0)?;
        eprintln!(
            "b_delta={}: at least as costly as bitmask from d={}, effd 0.5 at d={}, dense parity at d={}",
            width.bits(),
            fmt(bm),
            fmt(half),
            fmt(parity)
        );
    }
    Ok(())
}

fn fmt(d: Option<f64>) -> String {
    d.map_or("none".into(), |d| format!("{d:.4}"))
}
