//! Padding entries in practice: random matrices against the expected-case
//! count, and the worst-case generator against its exact count.
//!
//!     cargo run --release --example padding_analysis

use macko::density::{expected_pad_count, gen_random_macko};
use macko::{
    csr_from_dense, gen_worst_case, macko_from_csr, measured_effd, DeltaWidth, MackoParams, Result, ValueMode,
};

fn main() -> Result<()> {
    let (r, c) = (256, 8192);
    println!("random {r}x{c}, one seed");
    println!("{:>7} {:>5} {:>10} {:>12} {:>8}", "b_delta", "d", "pads", "expected", "effd");
    for width in DeltaWidth::ALL {
        for d in [0.05, 0.1, 0.2, 0.5] {
            let m = gen_random_macko(r, c, d, 1, ValueMode::Float, MackoParams::with_width(width))?;
            let expected = expected_pad_count(r, c, d, width)?;
            println!(
                "{:>7} {:>5} {:>10} {:>12.1} {:>8.4}",
                width.bits(),
                d,
                m.padding_count(),
                expected,
                measured_effd(&m)
            );
        }
    }

    println!("\nworst case, 8 x 1024");
    for width in DeltaWidth::ALL {
        let run = width.max_delta() as usize;
        // half the zeros budget: C * (1 - d) must split into runs
        let zeros = 512 / run * run;
        let d = (1024 - zeros) as f64 / 1024.0;
        let m = macko_from_csr(&csr_from_dense(&gen_worst_case(8, 1024, d, width)?), MackoParams::with_width(width))?;
        println!(
            "b_delta={} d={d:.4}: {} pads, formula {}",
            width.bits(),
            m.padding_count(),
            8 * zeros / run
        );
    }
    Ok(())
}
