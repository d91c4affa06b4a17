//! Step through the 32-lane kernel on a small matrix and print what each
//! lane reconstructs. The second row starts mid-vector, so its first step
//! shows masked lanes.
//!
//!     cargo run --example warp_trace

use macko::exec::{warp_spmv_traced, StepTrace, LOAD_SIZE};
use macko::{
    csr_from_dense, dense_mv, gen_random_with, gen_vector, macko_from_csr, MackoParams, Result, ValueMode,
    WarpConfig,
};

fn main() -> Result<()> {
    let dense = gen_random_with(2, 600, 0.45, 3, ValueMode::Integer)?;
    let m = macko_from_csr(&csr_from_dense(&dense), MackoParams::new(2)?)?;
    let v = gen_vector(600, 3, ValueMode::Integer);
    println!("row ranges {:?} {:?}", m.row_range(0), m.row_range(1));

    let mut show = |t: &StepTrace| {
        println!(
            "row {} step {} first element {} base column {} step total {}",
            t.row, t.step, t.first_element, t.base_column, t.step_total
        );
        for lane in [0, 1, 30, 31] {
            let cols: Vec<String> = t.lane_columns[lane]
                .iter()
                .map(|c| c.map_or("-".to_string(), |c| c.to_string()))
                .collect();
            println!("  lane {lane:>2}: {}", cols.join(" "));
        }
    };
    let y = warp_spmv_traced(&m, &v, WarpConfig::default(), &mut show)?;

    let want = dense_mv(&dense, &v)?;
    println!("result {:?}, dense {:?}", y.to_f32(), want.to_f32());
    println!("load size {LOAD_SIZE}: row 1 starts at element {}, aligned down to {}", m.row_range(1).start, m.row_range(1).start / LOAD_SIZE * LOAD_SIZE);
    Ok(())
}
