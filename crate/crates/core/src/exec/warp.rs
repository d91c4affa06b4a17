//! Lockstep emulation of the 32-lane SpMV kernel.
//!
//! One warp owns one row. Each step the warp covers 256 consecutive stored
//! elements, 8 per lane:
//!
//! 1. every lane loads its 8 values and 8 deltas,
//! 2. lanes sum their deltas, an exclusive warp scan turns those sums into
//!    per-lane column offsets, and each lane rebuilds its absolute columns
//!    from the running row base,
//! 3. lanes gather the matching vector entries and accumulate products in
//!    f32; lane 31 knows the step total, which is broadcast to advance the
//!    base.
//!
//! After the last step the lane accumulators are folded with a shuffle-down
//! tree. Rows start at a load-size aligned offset (reverse offset alignment);
//! elements in front of the row, and anything past its end, are masked to a
//! zero delta and are never gathered.
//!
//! Deltas arrive in 128-byte transactions. At 4 and 8 bits a transaction
//! covers at most one step, but at 2 bits (1 bit) it covers two (four) steps
//! and each lane first receives its deltas from the lane that loaded them,
//! the same redistribution a register shuffle performs on hardware.

use half::f16;
use rayon::prelude::*;

use super::{check_len, Vector};
use crate::format::{code_at, MackoMatrix};
use crate::{Error, Result};

pub const WARP_SIZE: usize = 32;
pub const LOAD_SIZE: usize = 8;
pub const STEP_ELEMENTS: usize = WARP_SIZE * LOAD_SIZE;

const DELTA_TRANSACTION_BYTES: usize = 128;
const MAX_DELTAS_PER_LANE: usize = DELTA_TRANSACTION_BYTES * 8 / WARP_SIZE;

type Lanes<T> = [T; WARP_SIZE];

/// Execution switches for [`warp_spmv`]. Lane count, load size and f32
/// accumulation are fixed by the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WarpConfig {
    /// Align each row start down to a multiple of [`LOAD_SIZE`] and mask the
    /// over-read prefix. Off means loads start exactly at the row start.
    pub roma: bool,
    /// Spread rows over the rayon pool. Results do not depend on it.
    pub parallel_rows: bool,
}

impl Default for WarpConfig {
    fn default() -> Self {
        Self { roma: true, parallel_rows: true }
    }
}

impl WarpConfig {
    pub fn sequential() -> Self {
        Self { parallel_rows: false, ..Self::default() }
    }
}

/// `__shfl_up_sync`: lane `i` reads lane `i - offset`; lower lanes keep their
/// own value.
fn shfl_up<T: Copy>(vals: &Lanes<T>, offset: usize) -> Lanes<T> {
    std::array::from_fn(|i| if i >= offset { vals[i - offset] } else { vals[i] })
}

/// `__shfl_down_sync`: lane `i` reads lane `i + offset`; upper lanes keep
/// their own value.
fn shfl_down<T: Copy>(vals: &Lanes<T>, offset: usize) -> Lanes<T> {
    std::array::from_fn(|i| if i + offset < WARP_SIZE { vals[i + offset] } else { vals[i] })
}

/// Exclusive prefix sum across the warp with log-depth shuffle-up doubling.
pub fn warp_prefix_sum(local_sums: &Lanes<u32>) -> Lanes<u32> {
    let mut prefix = *local_sums;
    let mut offset = 1;
    while offset < WARP_SIZE {
        let sync = shfl_up(&prefix, offset);
        for lane in offset..WARP_SIZE {
            prefix[lane] = prefix[lane].wrapping_add(sync[lane]);
        }
        offset *= 2;
    }
    std::array::from_fn(|lane| prefix[lane].wrapping_sub(local_sums[lane]))
}

/// Shuffle-down tree reduction; the total lands in lane 0.
pub fn warp_reduce_sum(acc: &Lanes<f32>) -> f32 {
    let mut vals = *acc;
    let mut offset = WARP_SIZE / 2;
    while offset > 0 {
        let other = shfl_down(&vals, offset);
        for lane in 0..WARP_SIZE {
            vals[lane] += other[lane];
        }
        offset /= 2;
    }
    vals[0]
}

/// Snapshot of one warp step, produced only when an observer is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub row: usize,
    pub step: usize,
    /// Index of the first stored element covered by lane 0 in this step.
    pub first_element: usize,
    /// Column base before the step; `-1` at the start of every row.
    pub base_column: i64,
    /// Sum of all unmasked deltas in the step, as broadcast from lane 31.
    pub step_total: u32,
    /// Reconstructed column per lane and slot; `None` where masked.
    pub lane_columns: Lanes<[Option<u32>; LOAD_SIZE]>,
}

pub trait WarpObserver {
    const ACTIVE: bool = true;
    fn on_step(&mut self, trace: &StepTrace);
}

impl<F: FnMut(&StepTrace)> WarpObserver for F {
    fn on_step(&mut self, trace: &StepTrace) {
        self(trace)
    }
}

struct Silent;

impl WarpObserver for Silent {
    const ACTIVE: bool = false;
    fn on_step(&mut self, _: &StepTrace) {}
}

/// Static load geometry for one delta width.
#[derive(Clone, Copy)]
struct Geometry {
    per_lane: usize,
    steps_per_tile: usize,
}

impl Geometry {
    fn new(delta_bits: u8) -> Self {
        let per_transaction = DELTA_TRANSACTION_BYTES * 8 / delta_bits as usize;
        let tile = per_transaction.max(STEP_ELEMENTS);
        Self { per_lane: tile / WARP_SIZE, steps_per_tile: tile / STEP_ELEMENTS }
    }
}

fn run_row<O: WarpObserver>(
    m: &MackoMatrix,
    x: &[f16],
    row: usize,
    cfg: WarpConfig,
    geo: Geometry,
    obs: &mut O,
) -> Result<f16> {
    let width = m.params().delta_width();
    let bytes = m.packed_deltas();
    let values = m.values();
    let cols = m.cols();
    let range = m.row_range(row);
    let (start, end) = (range.start, range.end);
    let first = if cfg.roma { start - start % LOAD_SIZE } else { start };
    debug_assert!(!cfg.roma || first % LOAD_SIZE == 0);

    // Delta registers: lane L holds `per_lane` consecutive deltas of the
    // current tile; zero marks a masked element.
    let mut regs: Lanes<[u16; MAX_DELTAS_PER_LANE]> = [[0; MAX_DELTAS_PER_LANE]; WARP_SIZE];
    let mut acc: Lanes<f32> = [0.0; WARP_SIZE];
    let mut base: i64 = -1;
    let mut step = 0usize;
    let mut step_start = first;

    while step_start < end {
        let slot = step % geo.steps_per_tile;
        if slot == 0 {
            for (lane, reg) in regs.iter_mut().enumerate() {
                let lane_start = step_start + lane * geo.per_lane;
                for (k, r) in reg[..geo.per_lane].iter_mut().enumerate() {
                    let idx = lane_start + k;
                    *r = if idx >= start && idx < end { code_at(bytes, idx, width) as u16 + 1 } else { 0 };
                }
            }
        }

        // Redistribute: lane i works on tile elements slot*256 + 8i .. +8.
        let deltas: Lanes<[u16; LOAD_SIZE]> = std::array::from_fn(|lane| {
            let e = slot * STEP_ELEMENTS + lane * LOAD_SIZE;
            let (src, off) = (e / geo.per_lane, e % geo.per_lane);
            regs[src][off..off + LOAD_SIZE].try_into().expect("load size slice")
        });
        let local: Lanes<u32> = std::array::from_fn(|lane| deltas[lane].iter().map(|&d| d as u32).sum());
        let prefix = warp_prefix_sum(&local);

        let mut lane_columns = [[None; LOAD_SIZE]; WARP_SIZE];
        for lane in 0..WARP_SIZE {
            let mut col = base + prefix[lane] as i64;
            let e0 = step_start + lane * LOAD_SIZE;
            for k in 0..LOAD_SIZE {
                let d = deltas[lane][k];
                if d == 0 {
                    continue;
                }
                col += d as i64;
                if col as usize >= cols {
                    return Err(Error::ColumnOutOfBounds { row, col: col as u64, cols });
                }
                if O::ACTIVE {
                    lane_columns[lane][k] = Some(col as u32);
                }
                acc[lane] += values[e0 + k].to_f32() * x[col as usize].to_f32();
            }
        }

        let step_total = prefix[WARP_SIZE - 1] + local[WARP_SIZE - 1];
        if O::ACTIVE {
            obs.on_step(&StepTrace {
                row,
                step,
                first_element: step_start,
                base_column: base,
                step_total,
                lane_columns,
            });
        }
        base += step_total as i64;
        step += 1;
        step_start += STEP_ELEMENTS;
    }
    Ok(f16::from_f32(warp_reduce_sum(&acc)))
}

/// SpMV through the warp emulator.
pub fn warp_spmv(m: &MackoMatrix, v: &Vector, cfg: WarpConfig) -> Result<Vector> {
    check_len(v, m.cols())?;
    let x = v.as_slice();
    let geo = Geometry::new(m.params().b_delta());
    let out: Vec<f16> = if cfg.parallel_rows {
        (0..m.rows())
            .into_par_iter()
            .map(|r| run_row(m, x, r, cfg, geo, &mut Silent))
            .collect::<Result<_>>()?
    } else {
        (0..m.rows()).map(|r| run_row(m, x, r, cfg, geo, &mut Silent)).collect::<Result<_>>()?
    };
    Ok(Vector::new(out))
}

/// Sequential [`warp_spmv`] that reports every step to `observer`.
pub fn warp_spmv_traced<O: WarpObserver>(
    m: &MackoMatrix,
    v: &Vector,
    cfg: WarpConfig,
    observer: &mut O,
) -> Result<Vector> {
    check_len(v, m.cols())?;
    let x = v.as_slice();
    let geo = Geometry::new(m.params().b_delta());
    let out = (0..m.rows())
        .map(|r| run_row(m, x, r, cfg, geo, observer))
        .collect::<Result<_>>()?;
    Ok(Vector::new(out))
}
