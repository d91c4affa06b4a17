use std::fmt::Write as _;

use crate::density::{effd, Format, FormatCostModel};
use crate::format::{DeltaWidth, VALUE_BITS};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    /// Grid spacing; `1 / step` must be a whole number.
    pub step: f64,
    pub value_bits: u32,
    pub delta_width: DeltaWidth,
    pub formats: Vec<Format>,
    /// Shape used for the Tiled-CSL tile term.
    pub rows: usize,
    pub cols: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            step: 0.01,
            value_bits: VALUE_BITS as u32,
            delta_width: DeltaWidth::default(),
            formats: Format::ALL.to_vec(),
            rows: 12288,
            cols: 12288,
        }
    }
}

/// `0, step, 2 step, ..., 1`, each point computed as `i / n` so that grid
/// values print exactly as typed.
pub fn analyze_grid(step: f64) -> Result<Vec<f64>> {
    let n = (1.0 / step).round();
    if step.is_nan() || step <= 0.0 || n < 1.0 || (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("grid step {step} does not divide [0, 1]")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Effective density of each format over the density grid. Values are
/// printed in shortest round-trip form, so parsing the CSV recovers the model
/// outputs exactly.
pub fn cmd_analyze(opts: &AnalyzeOptions) -> Result<String> {
    let grid = analyze_grid(opts.step)?;
    let models: Vec<FormatCostModel> = opts
        .formats
        .iter()
        .map(|&f| FormatCostModel::new(f).with_delta_width(opts.delta_width).with_value_bits(opts.value_bits))
        .collect();
    let mut out = String::from("d");
    for f in &opts.formats {
        write!(out, ",{f}").expect("writing to a String");
    }
    out.push('\n');
    for d in grid {
        write!(out, "{d}").expect("writing to a String");
        for m in &models {
            write!(out, ",{}", effd(m, d, opts.rows, opts.cols)?).expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(csv: &str, name: &str) -> Vec<(f64, f64)> {
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == name).unwrap();
        lines
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                (f[0].parse().unwrap(), f[idx].parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn grid_shape() {
        let g = analyze_grid(0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[23], 0.23);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(analyze_grid(0.03).is_err());
        assert!(analyze_grid(0.0).is_err());
    }

    #[test]
    fn header_and_dense_column() {
        let csv = cmd_analyze(&AnalyzeOptions::default()).unwrap();
        assert!(csv.starts_with("d,dense,csr32,csr16,tiled-csl,bitmask,macko-best,macko-worst,macko-expected\n"));
        assert!(column(&csv, "dense").iter().all(|&(_, e)| e == 1.0));
    }

    #[test]
    fn values_round_trip_exactly() {
        let opts = AnalyzeOptions::default();
        let csv = cmd_analyze(&opts).unwrap();
        for f in Format::ALL {
            let m = FormatCostModel::new(f);
            for (d, e) in column(&csv, f.name()) {
                assert_eq!(e, effd(&m, d, opts.rows, opts.cols).unwrap());
            }
        }
    }

    #[test]
    fn csr32_third() {
        let opts = AnalyzeOptions { step: 1.0 / 3.0, formats: vec![Format::Csr32], ..Default::default() };
        let csv = cmd_analyze(&opts).unwrap();
        let col = column(&csv, "csr32");
        assert!((col[1].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bitmask_macko_swap_near_quarter() {
        let csv = cmd_analyze(&AnalyzeOptions::default()).unwrap();
        let bm = column(&csv, "bitmask");
        let mk = column(&csv, "macko-expected");
        assert!(mk[22].1 < bm[22].1);
        assert!(mk[24].1 > bm[24].1);
    }
}
