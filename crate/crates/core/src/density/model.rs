//! Closed-form effective density of competing storage formats.
//!
//! Effective density is the storage of a format in bits divided by the
//! `R * C * b_val` bits of the dense matrix. The closed forms drop row
//! pointers and other terms that vanish for large matrices; use
//! [`measured_effd`] for the exact figure of a concrete encoding.

use std::fmt;
use std::str::FromStr;

use crate::format::{DeltaWidth, MackoMatrix, MackoParams, VALUE_BITS};
use crate::{Error, Result};

/// Tile shape assumed for Tiled-CSL when deriving the tile count.
pub const TILE_ROWS: usize = 128;
pub const TILE_COLS: usize = 64;

/// Row pointers are stored as 32-bit offsets in every sparse format.
pub const ROW_POINTER_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Dense,
    Csr32,
    Csr16,
    TiledCsl,
    Bitmask,
    /// No padding at all: every gap fits in one delta.
    MackoBest,
    /// Every zero sits in a run that forces one padding entry per `2^b_delta`.
    MackoWorst,
    /// Nonzeros placed independently with probability `d`.
    MackoExpected,
}

impl Format {
    pub const ALL: [Format; 8] = [
        Format::Dense,
        Format::Csr32,
        Format::Csr16,
        Format::TiledCsl,
        Format::Bitmask,
        Format::MackoBest,
        Format::MackoWorst,
        Format::MackoExpected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Format::Dense => "dense",
            Format::Csr32 => "csr32",
            Format::Csr16 => "csr16",
            Format::TiledCsl => "tiled-csl",
            Format::Bitmask => "bitmask",
            Format::MackoBest => "macko-best",
            Format::MackoWorst => "macko-worst",
            Format::MackoExpected => "macko-expected",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Format::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown format {s:?}")))
    }
}

/// One format evaluated at fixed bit widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormatCostModel {
    pub format: Format,
    pub value_bits: u32,
    pub delta_width: DeltaWidth,
}

impl FormatCostModel {
    /// 16-bit values and 4-bit deltas.
    pub fn new(format: Format) -> Self {
        Self { format, value_bits: VALUE_BITS as u32, delta_width: DeltaWidth::FOUR }
    }

    pub fn with_delta_width(mut self, width: DeltaWidth) -> Self {
        self.delta_width = width;
        self
    }

    pub fn with_value_bits(mut self, bits: u32) -> Self {
        self.value_bits = bits;
        self
    }

    pub fn effd(&self, d: f64, rows: usize, cols: usize) -> Result<f64> {
        effd(self, d, rows, cols)
    }

    fn macko_overhead(&self) -> f64 {
        let bv = self.value_bits as f64;
        (bv + self.delta_width.bits() as f64) / bv
    }
}

fn check_density(d: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidDensity(d));
    }
    Ok(())
}

/// Number of Tiled-CSL tiles covering an `rows x cols` matrix.
pub fn tile_count(rows: usize, cols: usize) -> u64 {
    (rows.div_ceil(TILE_ROWS) as u64) * (cols.div_ceil(TILE_COLS) as u64)
}

/// `1 - (1 - d)^(2^b_delta)`, accurate for small `d`.
fn one_minus_z(d: f64, width: DeltaWidth) -> f64 {
    -(width.max_delta() as f64 * (-d).ln_1p()).exp_m1()
}

/// `d * (1 + z / (1 - z))`: nonzeros plus expected padding per matrix entry,
/// with `z = (1 - d)^(2^b_delta)`. Tends to `2^-b_delta` as `d -> 0`.
fn expected_stored_fraction(d: f64, width: DeltaWidth) -> f64 {
    if d == 0.0 {
        return 1.0 / width.max_delta() as f64;
    }
    d / one_minus_z(d, width)
}

/// Closed-form effective density of `model` at density `d`.
///
/// `rows` and `cols` only matter for Tiled-CSL, whose per-tile offsets are
/// charged as `32 * NT / (R * C)`.
pub fn effd(model: &FormatCostModel, d: f64, rows: usize, cols: usize) -> Result<f64> {
    check_density(d)?;
    let bv = model.value_bits as f64;
    let width = model.delta_width;
    let value = match model.format {
        Format::Dense => 1.0,
        Format::Csr32 => d * (32.0 + bv) / bv,
        Format::Csr16 => d * (16.0 + bv) / bv,
        Format::TiledCsl => {
            d * (16.0 + bv) / bv + 32.0 * tile_count(rows, cols) as f64 / (rows as f64 * cols as f64)
        }
        Format::Bitmask => d + 1.0 / bv,
        Format::MackoBest => d * model.macko_overhead(),
        Format::MackoWorst => (d + (1.0 - d) / width.max_delta() as f64) * model.macko_overhead(),
        Format::MackoExpected => expected_stored_fraction(d, width) * model.macko_overhead(),
    };
    Ok(value)
}

/// Expected number of padding entries for a random `rows x cols` matrix of
/// density `d`: `R * C * d * z / (1 - z)`.
///
/// This is the count implied by the expected-case effective density. It
/// ignores row ends, so a measured count comes out marginally lower. Prose
/// descriptions of the same model sometimes phrase it as a per-zero
/// probability `d * z / (1 - z)`, which would carry an extra `(1 - d)`
/// factor; the per-entry form used here is the one that matches simulation.
pub fn expected_pad_count(rows: usize, cols: usize, d: f64, width: DeltaWidth) -> Result<f64> {
    check_density(d)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    let omz = one_minus_z(d, width);
    let z = 1.0 - omz;
    Ok(rows as f64 * cols as f64 * d * z / omz)
}

/// Row-pointer contribution `32 * (R + 1) / (R * C * b_val)`.
pub fn row_pointer_effd(rows: usize, cols: usize, value_bits: u32) -> f64 {
    ROW_POINTER_BITS as f64 * (rows as f64 + 1.0) / (rows as f64 * cols as f64 * value_bits as f64)
}

/// Effective density of an actual encoding, row pointers included.
pub fn measured_effd(m: &MackoMatrix) -> f64 {
    measured_effd_with(m, true)
}

/// Effective density of an actual encoding. Alignment tails are never
/// counted; row pointers only when `include_row_pointers` is set.
pub fn measured_effd_with(m: &MackoMatrix, include_row_pointers: bool) -> f64 {
    macko_effd_from_counts(m.rows(), m.cols(), m.pad_nnz() as u64, m.params(), include_row_pointers)
}

/// [`measured_effd_with`] for an encoding known only by its stored entry count.
pub fn macko_effd_from_counts(
    rows: usize,
    cols: usize,
    pad_nnz: u64,
    params: MackoParams,
    include_row_pointers: bool,
) -> f64 {
    let bv = params.value_bits() as f64;
    let bits = pad_nnz as f64 * (bv + params.b_delta() as f64);
    let cells = rows as f64 * cols as f64;
    let base = bits / (cells * bv);
    if include_row_pointers {
        base + row_pointer_effd(rows, cols, params.value_bits() as u32)
    } else {
        base
    }
}

/// Density in `[lo, hi]` at which `model` reaches `target`, by bisection.
/// Requires the effective density to be increasing on the interval.
pub fn density_at_effd(
    model: &FormatCostModel,
    target: f64,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let f = |d: f64| effd(model, d, rows, cols).map(|e| e - target);
    bisect(f, lo, hi)
}

/// Smallest density in `[lo, hi]` where `a` costs at least as much as `b`.
///
/// The interval is scanned on a fine grid and the first sign change refined
/// by bisection. Returns `None` when `a` stays cheaper on the whole interval.
pub fn crossover_density(
    a: &FormatCostModel,
    b: &FormatCostModel,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    const STEPS: usize = 10_000;
    let diff = |d: f64| -> Result<f64> { Ok(effd(a, d, rows, cols)? - effd(b, d, rows, cols)?) };
    if diff(lo)? >= 0.0 {
        return Ok(Some(lo));
    }
    let mut prev = lo;
    for i in 1..=STEPS {
        let d = lo + (hi - lo) * i as f64 / STEPS as f64;
        if diff(d)? >= 0.0 {
            return bisect(diff, prev, d);
        }
        prev = d;
    }
    Ok(None)
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<Option<f64>> {
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo == 0.0 {
        return Ok(Some(lo));
    }
    if flo.signum() == fhi.signum() {
        return Ok(None);
    }
    let rising = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = f(mid)? < 0.0;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
