//! Write a Matrix Market file, read it back, encode it and dump the MCKO
//! header fields.
//!
//!     cargo run --example file_formats

use macko::io::{read_matrix_market, write_macko, write_matrix_market, HEADER_LEN};
use macko::{csr_from_dense, gen_random_with, macko_from_csr, MackoParams, Result, ValueMode};

fn main() -> Result<()> {
    let source = gen_random_with(4, 10, 0.3, 5, ValueMode::Integer)?;
    let mut mtx = Vec::new();
    write_matrix_market(&source, &mut mtx)?;
    println!("{}", String::from_utf8_lossy(&mtx));

    let dense = read_matrix_market(mtx.as_slice())?;
    assert_eq!(dense, source);
    let m = macko_from_csr(&csr_from_dense(&dense), MackoParams::new(2)?)?;
    let mut bytes = Vec::new();
    write_macko(&m, &mut bytes)?;

    let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    println!("magic       {:?}", std::str::from_utf8(&bytes[..4]).unwrap());
    println!("version     {}", u16::from_le_bytes([bytes[4], bytes[5]]));
    println!("value bits  {}", bytes[6]);
    println!("delta bits  {}", bytes[7]);
    println!("rows        {}", u64_at(8));
    println!("cols        {}", u64_at(16));
    println!("pad_nnz     {}", u64_at(24));
    let rp = 4 * (m.rows() + 1);
    println!("sections    row pointers {rp} B, deltas {} B, values {} B", m.packed_deltas().len(), 2 * m.values().len());
    println!("total       {} B (header {HEADER_LEN})", bytes.len());
    Ok(())
}
