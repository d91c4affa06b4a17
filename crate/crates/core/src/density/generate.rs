//! Deterministic sparsity-pattern generators.
//!
//! Every row draws from its own ChaCha8 stream (`seed`, stream = row index),
//! so output is identical however the rows are scheduled.
//!
//! Nonzero values follow [`ValueMode`]:
//! * `Float`: magnitude uniform in `[0.25, 1)`, random sign, rounded to f16.
//! * `Integer`: uniform over `{-8, ..., -1, 1, ..., 8}`, exact in f16.
//!
//! Vectors from [`gen_vector`] are uniform in `[-1, 1)` (float) or over the
//! integers `[-8, 8]` (integer).

use half::f16;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::exec::Vector;
use crate::format::{build_rows, DeltaWidth, DenseMatrix, MackoMatrix, MackoParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ValueMode {
    /// Small integers; every SpMV path is exact.
    Integer,
    #[default]
    Float,
}

impl std::str::FromStr for ValueMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "int" | "integer" => Ok(ValueMode::Integer),
            "float" | "fp" | "fp16" => Ok(ValueMode::Float),
            other => Err(Error::Config(format!("unknown value mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for ValueMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ValueMode::Integer => "int",
            ValueMode::Float => "float",
        })
    }
}

const VECTOR_SEED_SALT: u64 = 0x5bd1_e995_9e37_79b9;

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

fn check_density(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidDensity(d));
    }
    Ok(())
}

fn draw_value(rng: &mut ChaCha8Rng, mode: ValueMode) -> f16 {
    match mode {
        ValueMode::Float => {
            let mag: f32 = rng.gen_range(0.25..1.0);
            let v = if rng.gen::<bool>() { mag } else { -mag };
            f16::from_f32(v)
        }
        ValueMode::Integer => {
            let k = rng.gen_range(1..=8) as f32;
            f16::from_f32(if rng.gen::<bool>() { k } else { -k })
        }
    }
}

/// Nonzeros of row `row` of the random matrix, in column order.
pub(crate) fn random_row(
    row: usize,
    cols: usize,
    d: f64,
    seed: u64,
    mode: ValueMode,
    out: &mut Vec<(u32, f16)>,
) {
    let mut rng = row_rng(seed, row);
    for c in 0..cols {
        if rng.gen::<f64>() < d {
            out.push((c as u32, draw_value(&mut rng, mode)));
        }
    }
}

/// Random float-valued matrix where each entry is nonzero with probability `d`.
pub fn gen_random(rows: usize, cols: usize, d: f64, seed: u64) -> Result<DenseMatrix> {
    gen_random_with(rows, cols, d, seed, ValueMode::Float)
}

pub fn gen_random_with(rows: usize, cols: usize, d: f64, seed: u64, mode: ValueMode) -> Result<DenseMatrix> {
    check_density(d)?;
    let mut m = DenseMatrix::zeros(rows, cols)?;
    let filled: Vec<Vec<(u32, f16)>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            let mut buf = Vec::new();
            random_row(r, cols, d, seed, mode, &mut buf);
            buf
        })
        .collect();
    for (r, entries) in filled.into_iter().enumerate() {
        for (c, v) in entries {
            m.set(r, c as usize, v);
        }
    }
    Ok(m)
}

/// The same matrix as [`gen_random_with`], encoded row by row without ever
/// materialising the dense form.
pub fn gen_random_macko(
    rows: usize,
    cols: usize,
    d: f64,
    seed: u64,
    mode: ValueMode,
    params: MackoParams,
) -> Result<MackoMatrix> {
    check_density(d)?;
    build_rows(rows, cols, params, |r, buf| {
        random_row(r, cols, d, seed, mode, buf);
        Ok(())
    })
}

/// Layout of one worst-case row: `runs` blocks of `2^b_delta` zeros each
/// followed by a nonzero, then the remaining nonzeros packed at the end.
#[derive(Debug, Clone, Copy)]
struct WorstCaseLayout {
    run: usize,
    runs: usize,
}

fn worst_case_layout(cols: usize, d: f64, width: DeltaWidth) -> Result<WorstCaseLayout> {
    check_density(d)?;
    let exact = d * cols as f64;
    let nnz = exact.round();
    if (exact - nnz).abs() > 1e-9 * cols as f64 {
        return Err(Error::InfeasiblePattern(format!(
            "d * C = {exact} is not a whole number of nonzeros per row"
        )));
    }
    let nnz = nnz as usize;
    let zeros = cols - nnz;
    let run = width.max_delta() as usize;
    if !zeros.is_multiple_of(run) {
        return Err(Error::InfeasiblePattern(format!(
            "{zeros} zeros per row do not split into runs of {run}"
        )));
    }
    let runs = zeros / run;
    // a run only costs a pad if a nonzero follows it
    if nnz < runs {
        return Err(Error::InfeasiblePattern(format!(
            "{runs} zero runs need at least as many nonzeros, row has {nnz}"
        )));
    }
    Ok(WorstCaseLayout { run, runs })
}

/// Matrix whose zeros all sit in runs of exactly `2^b_delta`, each followed by
/// a nonzero, so every run costs one padding entry:
/// `padding_count = R * C * (1 - d) / 2^b_delta`.
///
/// Nonzero values are small signed integers, so the matrix is also usable in
/// exact SpMV comparisons.
pub fn gen_worst_case(rows: usize, cols: usize, d: f64, width: DeltaWidth) -> Result<DenseMatrix> {
    let layout = worst_case_layout(cols, d, width)?;
    let mut m = DenseMatrix::zeros(rows, cols)?;
    for r in 0..rows {
        let mut c = 0;
        let put = |m: &mut DenseMatrix, c: usize| {
            let k = ((r * 7 + c) % 8 + 1) as f32;
            m.set(r, c, f16::from_f32(if (r + c).is_multiple_of(2) { k } else { -k }));
        };
        for _ in 0..layout.runs {
            c += layout.run;
            put(&mut m, c);
            c += 1;
        }
        while c < cols {
            put(&mut m, c);
            c += 1;
        }
    }
    Ok(m)
}

pub fn gen_vector(len: usize, seed: u64, mode: ValueMode) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ VECTOR_SEED_SALT);
    let data = (0..len)
        .map(|_| match mode {
            ValueMode::Float => f16::from_f32(rng.gen_range(-1.0f32..1.0)),
            ValueMode::Integer => f16::from_f32(rng.gen_range(-8i32..=8) as f32),
        })
        .collect();
    Vector::new(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{csr_from_dense, macko_from_csr};

    #[test]
    fn density_extremes() {
        let m = gen_random(7, 9, 0.0, 1).unwrap();
        assert_eq!(m.nnz(), 0);
        let m = gen_random(7, 9, 1.0, 1).unwrap();
        assert_eq!(m.nnz(), 63);
        assert!(matches!(gen_random(2, 2, 1.01, 1), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gen_random(20, 30, 0.3, 9).unwrap(), gen_random(20, 30, 0.3, 9).unwrap());
        assert_ne!(gen_random(20, 30, 0.3, 9).unwrap(), gen_random(20, 30, 0.3, 10).unwrap());
        assert_eq!(gen_vector(50, 3, ValueMode::Float), gen_vector(50, 3, ValueMode::Float));
    }

    #[test]
    fn integer_mode_values() {
        let m = gen_random_with(16, 64, 0.7, 4, ValueMode::Integer).unwrap();
        for v in m.data() {
            let x = v.to_f32();
            assert!(x == x.trunc() && x.abs() <= 8.0);
        }
        for v in gen_vector(200, 4, ValueMode::Integer).as_slice() {
            let x = v.to_f32();
            assert!(x == x.trunc() && x.abs() <= 8.0);
        }
    }

    #[test]
    fn float_mode_magnitudes() {
        let m = gen_random(16, 64, 0.5, 4).unwrap();
        for v in m.data().iter().filter(|v| v.to_f32() != 0.0) {
            let a = v.to_f32().abs();
            assert!((0.25..=1.0).contains(&a));
        }
    }

    #[test]
    fn streaming_matches_dense_path() {
        let p = MackoParams::new(2).unwrap();
        for mode in [ValueMode::Float, ValueMode::Integer] {
            let dense = gen_random_with(300, 77, 0.2, 5, mode).unwrap();
            let a = macko_from_csr(&csr_from_dense(&dense), p).unwrap();
            let b = gen_random_macko(300, 77, 0.2, 5, mode, p).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn worst_case_small() {
        // 16 zeros then 16 nonzeros, exactly one pad
        let m = gen_worst_case(1, 32, 0.5, DeltaWidth::FOUR).unwrap();
        assert!(m.row(0)[..16].iter().all(|v| v.to_f32() == 0.0));
        assert!(m.row(0)[16..].iter().all(|v| v.to_f32() != 0.0));
        let enc = macko_from_csr(&csr_from_dense(&m), MackoParams::default()).unwrap();
        assert_eq!(enc.padding_count(), 1);
    }

    #[test]
    fn worst_case_dense_has_no_pads() {
        let m = gen_worst_case(3, 40, 1.0, DeltaWidth::TWO).unwrap();
        let enc = macko_from_csr(&csr_from_dense(&m), MackoParams::new(2).unwrap()).unwrap();
        assert_eq!(enc.padding_count(), 0);
    }

    #[test]
    fn worst_case_rejects_infeasible() {
        // 10 zeros do not split into runs of 16
        assert!(matches!(gen_worst_case(1, 20, 0.5, DeltaWidth::FOUR), Err(Error::InfeasiblePattern(_))));
        // d * C not integral
        assert!(gen_worst_case(1, 33, 0.5, DeltaWidth::FOUR).is_err());
        // all zero rows cannot place a nonzero after each run
        assert!(gen_worst_case(1, 32, 0.0, DeltaWidth::FOUR).is_err());
    }
}
