//! Encode a single 14-column row with 2-bit deltas and show the padding
//! entry the encoder inserts.
//!
//!     cargo run --example worked_example

use macko::{csr_from_dense, macko_from_csr, DenseMatrix, MackoParams, Result};

fn main() -> Result<()> {
    // nonzeros at 1-based columns 2, 5, 12, 13
    let mut row = [0.0f32; 14];
    for (col, v) in [(2, 1.0), (5, 2.0), (12, 3.0), (13, 4.0)] {
        row[col - 1] = v;
    }
    let dense = DenseMatrix::from_f32(1, 14, &row)?;
    let m = macko_from_csr(&csr_from_dense(&dense), MackoParams::new(2)?)?;

    let n = m.pad_nnz();
    let values: Vec<f32> = m.values()[..n].iter().map(|v| v.to_f32()).collect();
    let deltas: Vec<u32> = (0..n).map(|i| m.delta(i)).collect();
    println!("values        {values:?}");
    println!("deltas        {deltas:?}");
    println!("padding       {}", m.padding_count());
    println!("packed bytes  {:02x?}", &m.packed_deltas()[..2]);
    println!("row pointers  {:?}", m.row_pointers());

    print!("columns      ");
    for (col, v) in m.row_entries(0) {
        print!(" {}:{}", col + 1, v);
    }
    println!();

    // a 4-bit delta reaches 16 columns, so no padding is needed
    let wide = macko_from_csr(&csr_from_dense(&dense), MackoParams::new(4)?)?;
    println!("padding with 4-bit deltas: {}", wide.padding_count());
    Ok(())
}
