use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::density::{gen_random_macko, gen_vector, macko_effd_from_counts, random_row, FormatCostModel, ValueMode};
use crate::exec::{warp_spmv, WarpConfig};
use crate::format::{DeltaWidth, IndexWidth, VALUE_BITS};
use crate::perf::{predict_speedup, TrafficReport, VectorTraffic};
use crate::{Error, Result};

use super::scenario::{BenchFormat, BenchScenario, Shape};

pub const BENCH_HEADER: &str =
    "shape,sparsity,density,format,measured_effd,predicted_speedup,emulated_wall_s_not_gpu_comparable";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub shape: Shape,
    pub sparsity: f64,
    /// Realised density of the generated matrix.
    pub density: f64,
    pub format: BenchFormat,
    pub measured_effd: f64,
    /// Predicted dense runtime over predicted runtime of this format.
    pub predicted_speedup: f64,
    /// Median wall time of the emulated kernel; only on `macko` rows of
    /// timed scenarios.
    pub wall_seconds: Option<f64>,
}

/// Nonzero and stored-entry counts of the random matrix, without encoding it.
fn count_random(rows: usize, cols: usize, d: f64, seed: u64, mode: ValueMode, width: DeltaWidth) -> (u64, u64) {
    let max = width.max_delta() as u64;
    (0..rows)
        .into_par_iter()
        .map_init(Vec::new, |buf, r| {
            buf.clear();
            random_row(r, cols, d, seed, mode, buf);
            let mut prev = -1i64;
            let mut pads = 0u64;
            for &(c, _) in buf.iter() {
                pads += (c as i64 - prev - 1) as u64 / max;
                prev = c as i64;
            }
            (buf.len() as u64, buf.len() as u64 + pads)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn time_kernel(s: &BenchScenario, shape: Shape, d: f64) -> Result<(u64, u64, f64)> {
    let m = gen_random_macko(shape.rows, shape.cols, d, s.seed, s.mode, s.params)?;
    let v = gen_vector(shape.cols, s.seed, s.mode);
    let mut times = Vec::with_capacity(s.repetitions as usize);
    for _ in 0..s.repetitions {
        let t = Instant::now();
        warp_spmv(&m, &v, WarpConfig::default())?;
        times.push(t.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    Ok((m.nnz() as u64, m.pad_nnz() as u64, times[times.len() / 2]))
}

fn run_point(s: &BenchScenario, shape: Shape, sparsity: f64) -> Result<Vec<BenchRow>> {
    let (rows, cols) = (shape.rows, shape.cols);
    let d = 1.0 - sparsity;
    let width = s.params.delta_width();
    let (nnz, pad_nnz, wall) = if s.timing {
        let (n, p, t) = time_kernel(s, shape, d)?;
        (n, p, Some(t))
    } else {
        let (n, p) = count_random(rows, cols, d, s.seed, s.mode, width);
        (n, p, None)
    };
    let cells = rows as f64 * cols as f64;
    let density = nnz as f64 / cells;
    let dense_bytes = cells * (VALUE_BITS / 8) as f64;
    let dense = TrafficReport::dense(rows, cols, VectorTraffic::Once);
    let too_large = |n: u64| usize::try_from(n).map_err(|_| Error::TooLarge(n));
    let (nnz_us, pad_us) = (too_large(nnz)?, too_large(pad_nnz)?);

    s.formats
        .iter()
        .map(|&format| {
            let (effd, traffic) = match format {
                BenchFormat::Dense => (1.0, dense),
                BenchFormat::Csr32 | BenchFormat::Csr16 => {
                    let index = if format == BenchFormat::Csr32 { IndexWidth::U32 } else { IndexWidth::U16 };
                    let t = TrafficReport::csr(rows, cols, nnz_us, index, VectorTraffic::Once);
                    (t.bytes_matrix as f64 / dense_bytes, t)
                }
                BenchFormat::Macko => {
                    let t = TrafficReport::macko(rows, cols, pad_us, nnz_us, width, VectorTraffic::Once);
                    (macko_effd_from_counts(rows, cols, pad_nnz, s.params, true), t)
                }
                BenchFormat::Model(f) => {
                    let model = FormatCostModel::new(f).with_delta_width(width);
                    (model.effd(density, rows, cols)?, TrafficReport::from_model(&model, density, rows, cols)?)
                }
            };
            Ok(BenchRow {
                shape,
                sparsity,
                density,
                format,
                measured_effd: effd,
                predicted_speedup: predict_speedup(&traffic, &dense, &s.device),
                wall_seconds: if format == BenchFormat::Macko { wall } else { None },
            })
        })
        .collect()
}

/// Evaluate every scenario point on a pool of `workers` threads. Rows come
/// back in scenario order regardless of scheduling.
pub fn run_bench(s: &BenchScenario, workers: usize) -> Result<Vec<BenchRow>> {
    s.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let points = s.points();
    let per_point: Vec<Vec<BenchRow>> =
        pool.install(|| points.par_iter().map(|&(shape, sp)| run_point(s, shape, sp)).collect::<Result<_>>())?;
    Ok(per_point.into_iter().flatten().collect())
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let wall = r.wall_seconds.map(|t| format!("{t:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{:.6},{},{:.6},{:.6},{}",
            r.shape, r.sparsity, r.density, r.format, r.measured_effd, r.predicted_speedup, wall
        )
        .expect("writing to a String");
    }
    out
}

pub fn cmd_bench(s: &BenchScenario, workers: usize) -> Result<String> {
    Ok(bench_csv(&run_bench(s, workers)?))
}
