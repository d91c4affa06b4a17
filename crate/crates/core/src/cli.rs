//! Argument parsing and dispatch for the `macko` binary.
//!
//! Exit status is 0 on success, 1 when `spmv --verify` finds a mismatch and
//! 2 for unreadable input, invalid arguments or any other error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bench::{
    cmd_analyze, cmd_bench, cmd_convert, cmd_gen, cmd_spmv, load_matrix, load_vector, write_vector, AnalyzeOptions,
    BenchScenario, Engine, GenSpec, Pattern, Shape,
};
use crate::density::{gen_vector, Format, ValueMode};
use crate::format::MackoParams;
use crate::perf::DeviceProfile;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "macko", version, about = "Delta-compressed sparse matrices: conversion, analysis and SpMV")]
pub struct Cli {
    /// Bits per column delta: 1, 2, 4 or 8 [default: 4]
    #[arg(long, global = true, value_parser = parse_b_delta)]
    pub b_delta: Option<MackoParams>,
    /// Seed for generated matrices and vectors [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Value distribution of generated data: int or float [default: float]
    #[arg(long, global = true)]
    pub mode: Option<ValueMode>,
    /// Device profile name (rtx4090, rtx3090, rtx2080) or profile file
    #[arg(long, global = true)]
    pub device: Option<String>,
    /// Output file
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a Matrix Market or MCKO file as MCKO
    Convert { input: PathBuf, output: Option<PathBuf> },
    /// Effective density of each format over a density grid, as CSV
    Analyze {
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Comma separated; all formats by default
        #[arg(long, value_delimiter = ',')]
        formats: Vec<Format>,
        #[arg(long, default_value_t = 16)]
        value_bits: u32,
        /// Shape for the Tiled-CSL tile term
        #[arg(long, default_value = "12288x12288")]
        shape: Shape,
    },
    /// Multiply a matrix file by a vector file or a generated vector
    Spmv {
        matrix: PathBuf,
        /// One value per line; generated from --seed and --mode if absent
        #[arg(long)]
        vector: Option<PathBuf>,
        #[arg(long, default_value = "reference")]
        engine: Engine,
        /// Compare against the column-order product
        #[arg(long)]
        verify: bool,
    },
    /// Run a scenario sweep and emit CSV
    Bench {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Generate a matrix file (.mtx for Matrix Market, MCKO otherwise)
    Gen {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        density: f64,
        /// random or worst
        #[arg(long, default_value = "random")]
        pattern: Pattern,
    },
}

fn parse_b_delta(s: &str) -> std::result::Result<MackoParams, String> {
    let bits: u8 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    MackoParams::new(bits).map_err(|e| e.to_string())
}

enum Failure {
    Verify(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let params = cli.b_delta.unwrap_or_default();
    let seed = cli.seed.unwrap_or(0);
    let mode = cli.mode.unwrap_or_default();
    match cli.command {
        Command::Convert { input, output } => {
            let output = output
                .or(cli.out)
                .ok_or_else(|| Error::Config("convert needs an output path".into()))?;
            let report = cmd_convert(&input, &output, params)?;
            writeln!(stdout, "{report}").map_err(Error::from)?;
        }
        Command::Analyze { step, formats, value_bits, shape } => {
            let opts = AnalyzeOptions {
                step,
                value_bits,
                delta_width: params.delta_width(),
                formats: if formats.is_empty() { Format::ALL.to_vec() } else { formats },
                rows: shape.rows,
                cols: shape.cols,
            };
            emit(&cmd_analyze(&opts)?, cli.out.as_ref(), stdout)?;
        }
        Command::Spmv { matrix, vector, engine, verify } => {
            let m = load_matrix(&matrix, params)?;
            let v = match vector {
                Some(p) => load_vector(&p)?,
                None => gen_vector(m.cols(), seed, mode),
            };
            let report = cmd_spmv(&m, &v, engine, verify)?;
            if let Some(path) = &cli.out {
                write_vector(&report.output, path)?;
            }
            writeln!(stdout, "{report}").map_err(Error::from)?;
            if let Some(v) = report.verification.filter(|v| !v.passed()) {
                return Err(Failure::Verify(format!(
                    "{engine} result differs from the reference: relative error {:e} > {:e}",
                    v.max_rel_error, v.bound
                )));
            }
        }
        Command::Bench { scenario, workers } => {
            let mut s = BenchScenario::load(&scenario)?;
            if let Some(p) = cli.b_delta {
                s.params = p;
            }
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            if let Some(mode) = cli.mode {
                s.mode = mode;
            }
            if let Some(dev) = &cli.device {
                s.device = DeviceProfile::resolve(dev)?;
            }
            emit(&cmd_bench(&s, workers)?, cli.out.as_ref(), stdout)?;
        }
        Command::Gen { rows, cols, density, pattern } => {
            let output = cli.out.ok_or_else(|| Error::Config("gen needs --out".into()))?;
            let spec = GenSpec { rows, cols, density, pattern, seed, mode, params };
            let report = cmd_gen(&spec, &output)?;
            writeln!(stdout, "{report}").map_err(Error::from)?;
        }
    }
    Ok(())
}

/// Parse `args` (including the program name) and run. Returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_INPUT_ERROR;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_VERIFY_FAILED
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("macko").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        for sub in ["convert", "analyze", "spmv", "bench", "gen"] {
            assert!(out.contains(sub), "{sub}");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&[]).0, EXIT_INPUT_ERROR);
        assert_eq!(call(&["analyze", "--b-delta", "3"]).0, EXIT_INPUT_ERROR);
        assert_eq!(call(&["analyze", "--mode", "complex"]).0, EXIT_INPUT_ERROR);
        assert_eq!(call(&["analyze", "--formats", "coo"]).0, EXIT_INPUT_ERROR);
        let (code, _, err) = call(&["convert", "/nonexistent/in.mtx", "/nonexistent/out.mcko"]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(err.starts_with("error:"), "{err}");
    }

    #[test]
    fn analyze_to_stdout() {
        let (code, out, _) = call(&["analyze", "--step", "0.5", "--formats", "dense,csr32", "--b-delta", "8"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "d,dense,csr32\n0,1,0\n0.5,1,1.5\n1,1,3\n");
    }

    #[test]
    fn gen_requires_out() {
        assert_eq!(call(&["gen", "--rows", "2", "--cols", "2", "--density", "0.5"]).0, EXIT_INPUT_ERROR);
    }
}
