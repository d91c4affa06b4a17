use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::density::{Format, ValueMode};
use crate::format::MackoParams;
use crate::perf::DeviceProfile;
use crate::{Error, Result};

/// Weight shapes of common LLM linear layers, `(rows, cols)`.
pub const LLM_LAYER_SHAPES: [(usize, usize); 31] = [
    (4096, 4096),
    (8192, 8192),
    (8192, 29568),
    (32000, 5120),
    (32000, 8192),
    (28672, 8192),
    (5120, 5120),
    (5120, 13824),
    (3584, 20480),
    (4096, 11008),
    (13824, 5120),
    (18944, 3584),
    (14336, 4096),
    (4096, 14336),
    (8192, 28672),
    (11008, 4096),
    (32000, 4096),
    (20480, 3584),
    (3584, 18944),
    (21504, 7168),
    (7168, 7168),
    (28672, 7168),
    (7168, 28672),
    (27648, 9216),
    (9216, 9216),
    (36864, 9216),
    (9216, 36864),
    (36864, 12288),
    (12288, 12288),
    (49152, 12288),
    (12288, 49152),
];

/// Name that expands to every entry of [`LLM_LAYER_SHAPES`].
const ALL_SHAPES: &str = "llm-layers";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl Shape {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// `"RxC"`, e.g. `"4096x11008"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad shape {s:?}, expected RxC"));
        let (r, c) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let rows: usize = r.trim().parse().map_err(|_| bad())?;
        let cols: usize = c.trim().parse().map_err(|_| bad())?;
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape { rows, cols });
        }
        Ok(Self { rows, cols })
    }
}

/// A column of the benchmark table.
///
/// `Dense`, `Csr32`, `Csr16` and `Macko` are charged from the actual entry and
/// padding counts of the generated matrix; `Model` formats from their closed
/// form at the generated matrix's density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchFormat {
    Dense,
    Csr32,
    Csr16,
    Macko,
    Model(Format),
}

impl BenchFormat {
    pub fn name(self) -> &'static str {
        match self {
            BenchFormat::Dense => "dense",
            BenchFormat::Csr32 => "csr32",
            BenchFormat::Csr16 => "csr16",
            BenchFormat::Macko => "macko",
            BenchFormat::Model(f) => f.name(),
        }
    }
}

impl fmt::Display for BenchFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("macko") {
            return Ok(BenchFormat::Macko);
        }
        Ok(match s.parse::<Format>()? {
            Format::Dense => BenchFormat::Dense,
            Format::Csr32 => BenchFormat::Csr32,
            Format::Csr16 => BenchFormat::Csr16,
            other => BenchFormat::Model(other),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    shapes: Vec<String>,
    sparsity: Option<Vec<f64>>,
    formats: Option<Vec<String>>,
    device: Option<String>,
    seed: Option<u64>,
    mode: Option<String>,
    repetitions: Option<u32>,
    b_delta: Option<u8>,
    timing: Option<bool>,
}

/// A sweep over shapes and sparsity levels.
///
/// Scenario files are TOML:
///
/// ```toml
/// shapes = ["4096x4096", "12288x12288"]   # or ["llm-layers"]
/// sparsity = [0.0, 0.5, 0.95]             # default 0.0, 0.05, ..., 0.95
/// formats = ["dense", "csr32", "macko"]   # default dense, csr32, csr16, macko
/// device = "rtx4090"                      # builtin name or profile path
/// seed = 7
/// mode = "float"                          # or "int"
/// b_delta = 4
/// timing = false                          # time the emulated kernel
/// repetitions = 3                         # timed runs per point
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct BenchScenario {
    pub shapes: Vec<Shape>,
    /// Fractions of zero entries, each in `[0, 1]`.
    pub sparsity: Vec<f64>,
    pub formats: Vec<BenchFormat>,
    pub device: DeviceProfile,
    pub seed: u64,
    pub mode: ValueMode,
    pub repetitions: u32,
    pub params: MackoParams,
    /// Wall-clock timing makes the output machine dependent, so it is off by
    /// default.
    pub timing: bool,
}

impl BenchScenario {
    pub fn new(shapes: Vec<Shape>) -> Self {
        Self {
            shapes,
            sparsity: Self::default_sparsity(),
            formats: Self::default_formats(),
            device: DeviceProfile::rtx4090(),
            seed: 0,
            mode: ValueMode::Float,
            repetitions: 1,
            params: MackoParams::default(),
            timing: false,
        }
    }

    /// `0.0, 0.05, ..., 0.95`.
    pub fn default_sparsity() -> Vec<f64> {
        (0..20).map(|i| i as f64 / 20.0).collect()
    }

    pub fn default_formats() -> Vec<BenchFormat> {
        vec![BenchFormat::Dense, BenchFormat::Csr32, BenchFormat::Csr16, BenchFormat::Macko]
    }

    /// Parse a scenario. A relative device path is resolved against
    /// `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut shapes = Vec::new();
        for s in &raw.shapes {
            if s.trim().eq_ignore_ascii_case(ALL_SHAPES) {
                shapes.extend(LLM_LAYER_SHAPES.iter().map(|&(r, c)| Shape::new(r, c)));
            } else {
                shapes.push(s.parse()?);
            }
        }
        let mut scenario = Self::new(shapes);
        if let Some(s) = raw.sparsity {
            scenario.sparsity = s;
        }
        if let Some(f) = raw.formats {
            scenario.formats = f.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        if let Some(dev) = raw.device {
            scenario.device = match (DeviceProfile::by_name(&dev), base_dir) {
                (Some(p), _) => p,
                (None, Some(dir)) if Path::new(&dev).is_relative() => DeviceProfile::load(dir.join(&dev))?,
                (None, _) => DeviceProfile::load(&dev)?,
            };
        }
        if let Some(seed) = raw.seed {
            scenario.seed = seed;
        }
        if let Some(mode) = raw.mode {
            scenario.mode = mode.parse()?;
        }
        if let Some(r) = raw.repetitions {
            scenario.repetitions = r;
        }
        if let Some(b) = raw.b_delta {
            scenario.params = MackoParams::new(b)?;
        }
        if let Some(t) = raw.timing {
            scenario.timing = t;
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml_str(&std::fs::read_to_string(path)?, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.shapes.is_empty() {
            return Err(Error::Config("scenario lists no shapes".into()));
        }
        if self.formats.is_empty() {
            return Err(Error::Config("scenario lists no formats".into()));
        }
        if let Some(&s) = self.sparsity.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::Config(format!("sparsity {s} outside [0, 1]")));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// Scenario points in output order: shapes outer, sparsity inner.
    pub fn points(&self) -> Vec<(Shape, f64)> {
        self.shapes.iter().flat_map(|&sh| self.sparsity.iter().map(move |&s| (sh, s))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_parsing() {
        assert_eq!("12288x49152".parse::<Shape>().unwrap(), Shape::new(12288, 49152));
        assert_eq!(" 3 X 4 ".parse::<Shape>().unwrap(), Shape::new(3, 4));
        assert!("12288".parse::<Shape>().is_err());
        assert!("0x4".parse::<Shape>().is_err());
        assert_eq!(Shape::new(5, 6).to_string(), "5x6");
    }

    #[test]
    fn llm_layer_shapes() {
        let s = BenchScenario::from_toml_str("shapes = [\"llm-layers\"]", None).unwrap();
        assert_eq!(s.shapes.len(), 31);
        assert!(s.shapes.contains(&Shape::new(12288, 12288)));
        assert_eq!(s.sparsity.len(), 20);
        assert_eq!(*s.sparsity.last().unwrap(), 0.95);
    }

    #[test]
    fn format_names() {
        assert_eq!("macko".parse::<BenchFormat>().unwrap(), BenchFormat::Macko);
        assert_eq!("CSR16".parse::<BenchFormat>().unwrap(), BenchFormat::Csr16);
        assert_eq!("bitmask".parse::<BenchFormat>().unwrap(), BenchFormat::Model(Format::Bitmask));
        assert!("coo".parse::<BenchFormat>().is_err());
    }

    #[test]
    fn full_scenario() {
        let s = BenchScenario::from_toml_str(
            r#"
            shapes = ["64x128"]
            sparsity = [0.1, 0.9]
            formats = ["dense", "macko", "tiled-csl"]
            device = "rtx3090"
            seed = 9
            mode = "int"
            b_delta = 2
            timing = true
            repetitions = 2
            "#,
            None,
        )
        .unwrap();
        assert_eq!(s.points(), vec![(Shape::new(64, 128), 0.1), (Shape::new(64, 128), 0.9)]);
        assert_eq!(s.device.name, "rtx3090");
        assert_eq!(s.mode, ValueMode::Integer);
        assert_eq!(s.params.b_delta(), 2);
        assert!(s.timing);
    }

    #[test]
    fn invalid_scenarios() {
        for text in [
            "shapes = []",
            "shapes = [\"4x4\"]\nsparsity = [1.5]",
            "shapes = [\"4x4\"]\nformats = [\"coo\"]",
            "shapes = [\"4x4\"]\nb_delta = 3",
            "shapes = [\"4x4\"]\nrepetitions = 0",
            "shapes = [\"4x4\"]\nunknown = 1",
            "shapes = [\"4x4\"]\ndevice = \"/nonexistent/profile.toml\"",
        ] {
            assert!(BenchScenario::from_toml_str(text, None).is_err(), "{text}");
        }
    }

    #[test]
    fn device_path_relative_to_scenario() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("dev.toml"), "name = \"lab\"\nflops = 1e12\nbandwidth_bytes_per_s = 1e11\n")
            .unwrap();
        let path = dir.path().join("s.toml");
        std::fs::write(&path, "shapes = [\"8x8\"]\ndevice = \"dev.toml\"\n").unwrap();
        let s = BenchScenario::load(&path).unwrap();
        assert_eq!(s.device.name, "lab");
        assert_eq!(s.device.opb(), 10.0);
    }
}
