//! Dense -> CSR -> delta format -> file -> dense, checked bit for bit for
//! every delta width.
//!
//!     cargo run --example lossless_roundtrip

use macko::io::{read_macko, write_macko};
use macko::{csr_from_dense, dense_from_macko, gen_random, macko_from_csr, DeltaWidth, MackoParams, Result};

fn main() -> Result<()> {
    let dense = gen_random(300, 500, 0.3, 42)?;
    let csr = csr_from_dense(&dense);
    println!("300 x 500, {} nonzeros", csr.nnz());
    for width in DeltaWidth::ALL {
        let m = macko_from_csr(&csr, MackoParams::with_width(width))?;
        let mut bytes = Vec::new();
        write_macko(&m, &mut bytes)?;
        let back = dense_from_macko(&read_macko(bytes.as_slice())?)?;
        let identical = back.data().iter().zip(dense.data()).all(|(a, b)| a.to_bits() == b.to_bits());
        println!(
            "b_delta={}  padding {:>6}  file {:>7} bytes  identical: {identical}",
            width.bits(),
            m.padding_count(),
            bytes.len()
        );
    }
    Ok(())
}
