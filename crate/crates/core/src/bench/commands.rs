use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use half::f16;
use sha2::{Digest, Sha256};

use crate::density::{gen_random_macko, gen_random_with, gen_worst_case, measured_effd, ValueMode};
use crate::exec::{
    csr_spmv, dense_mv, max_relative_error, reference_spmv, warp_spmv, Vector, WarpConfig, WARP_FLOAT_ERROR_BOUND,
};
use crate::format::{csr_from_dense, macko_from_csr, MackoMatrix, MackoParams};
use crate::io::{load_matrix_market, read_macko, save_macko, write_matrix_market, MAGIC};
use crate::perf::{spmv_traffic, MatrixRef, TrafficReport, VectorTraffic};
use crate::{Error, Result};

/// Load an MCKO file, or a Matrix Market file encoded with `params`. The
/// format is recognised by the leading magic bytes.
pub fn load_matrix(path: &Path, params: MackoParams) -> Result<MackoMatrix> {
    let mut file = BufReader::new(File::open(path)?);
    let head = file.fill_buf()?;
    if head.len() >= 4 && head[..4] == MAGIC {
        return read_macko(file);
    }
    drop(file);
    let dense = load_matrix_market(path)?;
    macko_from_csr(&csr_from_dense(&dense), params)
}

/// Summary printed after writing an encoded matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvertReport {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub pad_nnz: usize,
    pub b_delta: u8,
    pub measured_effd: f64,
}

impl ConvertReport {
    pub fn of(m: &MackoMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            nnz: m.nnz(),
            pad_nnz: m.pad_nnz(),
            b_delta: m.params().b_delta(),
            measured_effd: measured_effd(m),
        }
    }

    pub fn padding(&self) -> usize {
        self.pad_nnz - self.nnz
    }
}

impl fmt::Display for ConvertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "shape: {}x{}", self.rows, self.cols)?;
        writeln!(f, "b_delta: {}", self.b_delta)?;
        writeln!(f, "nnz: {}", self.nnz)?;
        writeln!(f, "padding: {}", self.padding())?;
        writeln!(f, "pad_nnz: {}", self.pad_nnz)?;
        write!(f, "measured_effd: {:.6}", self.measured_effd)
    }
}

/// Re-encode `input` (MCKO or Matrix Market) with `params` and write MCKO.
pub fn cmd_convert(input: &Path, output: &Path, params: MackoParams) -> Result<ConvertReport> {
    let mut m = load_matrix(input, params)?;
    if m.params() != params {
        m = macko_from_csr(&m.to_csr(), params)?;
    }
    save_macko(&m, output)?;
    Ok(ConvertReport::of(&m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Scalar decode of the stored entries.
    Reference,
    /// Lockstep 32-lane emulation.
    Warp,
    Csr,
    Dense,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Reference, Engine::Warp, Engine::Csr, Engine::Dense];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Reference => "reference",
            Engine::Warp => "warp",
            Engine::Csr => "csr",
            Engine::Dense => "dense",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown engine {s:?}")))
    }
}

/// Comparison of an engine's output against the column-order result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub max_rel_error: f64,
    pub bound: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpmvReport {
    pub engine: Engine,
    pub output: Vector,
    pub checksum: String,
    pub traffic: TrafficReport,
    pub verification: Option<Verification>,
}

impl fmt::Display for SpmvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.traffic;
        writeln!(f, "engine: {}", self.engine)?;
        writeln!(f, "rows: {}", self.output.len())?;
        writeln!(f, "checksum: {}", self.checksum)?;
        writeln!(f, "bytes_matrix: {}", t.bytes_matrix)?;
        writeln!(f, "bytes_vector_in: {}", t.bytes_vector_in)?;
        writeln!(f, "bytes_vector_out: {}", t.bytes_vector_out)?;
        writeln!(f, "bytes_total: {}", t.total_bytes())?;
        write!(f, "flops: {}", t.flops)?;
        if let Some(v) = &self.verification {
            write!(
                f,
                "\nverify: {} (max relative error {:e}, bound {:e})",
                if v.passed() { "ok" } else { "FAILED" },
                v.max_rel_error,
                v.bound
            )?;
        }
        Ok(())
    }
}

/// SHA-256 of the output's little-endian f16 bit patterns, as hex.
pub fn checksum(v: &Vector) -> String {
    let mut h = Sha256::new();
    for x in v.as_slice() {
        h.update(x.to_bits().to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Run one engine. With `verify`, the result is compared against the
/// column-order product: bit-exact for the column-order engines, within
/// [`WARP_FLOAT_ERROR_BOUND`] for the warp engine.
pub fn cmd_spmv(m: &MackoMatrix, v: &Vector, engine: Engine, verify: bool) -> Result<SpmvReport> {
    let (output, traffic) = match engine {
        Engine::Reference => (reference_spmv(m, v)?, spmv_traffic(MatrixRef::Macko(m), VectorTraffic::Once)),
        Engine::Warp => (warp_spmv(m, v, WarpConfig::default())?, spmv_traffic(MatrixRef::Macko(m), VectorTraffic::Once)),
        Engine::Csr => {
            let csr = m.to_csr();
            (csr_spmv(&csr, v)?, spmv_traffic(MatrixRef::Csr(&csr), VectorTraffic::Once))
        }
        Engine::Dense => (
            dense_mv(&m.to_dense(), v)?,
            spmv_traffic(MatrixRef::Dense { rows: m.rows(), cols: m.cols() }, VectorTraffic::Once),
        ),
    };
    let verification = if verify {
        let reference = reference_spmv(m, v)?;
        let bound = if engine == Engine::Warp { WARP_FLOAT_ERROR_BOUND } else { 0.0 };
        Some(Verification { max_rel_error: max_relative_error(m, v, &output, &reference)?, bound })
    } else {
        None
    };
    Ok(SpmvReport { engine, checksum: checksum(&output), output, traffic, verification })
}

/// Read a vector written by [`write_vector`]: one number per line, blank
/// lines and `#` comments ignored.
pub fn load_vector(path: &Path) -> Result<Vector> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let x: f32 = t.parse().map_err(|_| Error::Config(format!("{}:{}: bad number {t:?}", path.display(), i + 1)))?;
        data.push(f16::from_f32(x));
    }
    Ok(Vector::new(data))
}

pub fn write_vector(v: &Vector, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for x in v.as_slice() {
        writeln!(w, "{}", x.to_f32())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pattern {
    /// Each entry nonzero independently with the given probability.
    #[default]
    Random,
    /// Zeros in runs that each cost one padding entry.
    WorstCase,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Pattern::Random),
            "worst" | "worst-case" => Ok(Pattern::WorstCase),
            other => Err(Error::Config(format!("unknown pattern {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub pattern: Pattern,
    pub seed: u64,
    pub mode: ValueMode,
    pub params: MackoParams,
}

/// Generate a matrix and write it to `output`: Matrix Market when the path
/// ends in `.mtx`, MCKO otherwise.
pub fn cmd_gen(spec: &GenSpec, output: &Path) -> Result<ConvertReport> {
    let as_mtx = output.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    let m = match (spec.pattern, as_mtx) {
        (Pattern::Random, false) => {
            gen_random_macko(spec.rows, spec.cols, spec.density, spec.seed, spec.mode, spec.params)?
        }
        (pattern, _) => {
            let dense = match pattern {
                Pattern::Random => gen_random_with(spec.rows, spec.cols, spec.density, spec.seed, spec.mode)?,
                Pattern::WorstCase => gen_worst_case(spec.rows, spec.cols, spec.density, spec.params.delta_width())?,
            };
            if as_mtx {
                write_matrix_market(&dense, File::create(output)?)?;
            }
            macko_from_csr(&csr_from_dense(&dense), spec.params)?
        }
    };
    if !as_mtx {
        save_macko(&m, output)?;
    }
    Ok(ConvertReport::of(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gen_vector;

    const WORKED_MTX: &str =
        "%%MatrixMarket matrix coordinate real general\n1 14 4\n1 2 1\n1 5 2\n1 12 3\n1 13 4\n";

    #[test]
    fn convert_worked_example() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("row.mtx");
        std::fs::write(&input, WORKED_MTX).unwrap();
        let out = dir.path().join("row.mcko");
        let r = cmd_convert(&input, &out, MackoParams::new(2).unwrap()).unwrap();
        assert_eq!((r.nnz, r.padding(), r.pad_nnz), (4, 1, 5));

        // MCKO in, different width out
        let out4 = dir.path().join("row4.mcko");
        let r4 = cmd_convert(&out, &out4, MackoParams::new(4).unwrap()).unwrap();
        assert_eq!((r4.padding(), r4.b_delta), (0, 4));
    }

    #[test]
    fn convert_dense_input() {
        let dir = tempfile::tempdir().unwrap();
        let spec = GenSpec {
            rows: 256,
            cols: 512,
            density: 1.0,
            pattern: Pattern::Random,
            seed: 1,
            mode: ValueMode::Float,
            params: MackoParams::default(),
        };
        let mtx = dir.path().join("d.mtx");
        cmd_gen(&spec, &mtx).unwrap();
        let r = cmd_convert(&mtx, &dir.path().join("d.mcko"), MackoParams::default()).unwrap();
        assert!((r.measured_effd - 1.25).abs() < 0.01, "{}", r.measured_effd);
    }

    #[test]
    fn gen_paths_agree() {
        let dir = tempfile::tempdir().unwrap();
        let spec = GenSpec {
            rows: 30,
            cols: 70,
            density: 0.3,
            pattern: Pattern::Random,
            seed: 4,
            mode: ValueMode::Integer,
            params: MackoParams::new(2).unwrap(),
        };
        let a = dir.path().join("a.mcko");
        let b = dir.path().join("b.mtx");
        cmd_gen(&spec, &a).unwrap();
        cmd_gen(&spec, &b).unwrap();
        let p = spec.params;
        assert_eq!(load_matrix(&a, p).unwrap(), load_matrix(&b, p).unwrap());
    }

    #[test]
    fn spmv_engines() {
        let m = gen_random_macko(20, 600, 0.4, 2, ValueMode::Integer, MackoParams::default()).unwrap();
        let v = gen_vector(600, 2, ValueMode::Integer);
        let sums: Vec<String> = Engine::ALL
            .iter()
            .map(|&e| {
                let r = cmd_spmv(&m, &v, e, true).unwrap();
                assert!(r.verification.unwrap().passed());
                r.checksum
            })
            .collect();
        assert!(sums.iter().all(|s| *s == sums[0]));
        let dense = cmd_spmv(&m, &v, Engine::Dense, false).unwrap();
        assert_eq!(dense.traffic.total_bytes(), 2 * 20 * 600 + 2 * 20 + 2 * 600);
        assert!(dense.verification.is_none());
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let m = gen_random_macko(4, 8, 0.5, 2, ValueMode::Integer, MackoParams::default()).unwrap();
        for e in Engine::ALL {
            assert!(matches!(cmd_spmv(&m, &Vector::zeros(9), e, false), Err(Error::DimensionMismatch { .. })));
        }
    }

    #[test]
    fn vector_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.txt");
        let v = gen_vector(33, 1, ValueMode::Float);
        write_vector(&v, &p).unwrap();
        assert_eq!(load_vector(&p).unwrap(), v);
        std::fs::write(&p, "1\n# c\n\nx\n").unwrap();
        assert!(load_vector(&p).is_err());
    }

    #[test]
    fn checksum_is_sha256() {
        assert_eq!(
            checksum(&Vector::new(vec![])),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("junk");
        std::fs::write(&p, "not a matrix").unwrap();
        assert!(load_matrix(&p, MackoParams::default()).is_err());
        assert!(load_matrix(&dir.path().join("missing"), MackoParams::default()).is_err());
    }
}
