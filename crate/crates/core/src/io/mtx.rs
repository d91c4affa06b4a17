//! Coordinate-format Matrix Market files with real or integer entries and
//! general symmetry. Indices in the file are one-based.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use half::f16;

use crate::format::{is_zero, DenseMatrix};
use crate::{Error, Result};

fn mm_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MatrixMarket { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<()> {
    let words: Vec<String> = line.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(mm_err(1, "missing %%MatrixMarket banner"));
    }
    match words.get(1..5) {
        Some([object, format, field, symmetry]) => {
            if object != "matrix" {
                return Err(mm_err(1, format!("unsupported object {object:?}")));
            }
            if format != "coordinate" {
                return Err(mm_err(1, format!("unsupported format {format:?}, only coordinate is read")));
            }
            if field != "real" && field != "integer" {
                return Err(mm_err(1, format!("unsupported field {field:?}")));
            }
            if symmetry != "general" {
                return Err(mm_err(1, format!("unsupported symmetry {symmetry:?}")));
            }
            Ok(())
        }
        _ => Err(mm_err(1, "incomplete banner")),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| mm_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| mm_err(line, format!("invalid {what}")))
}

/// Read a dense matrix, rounding entries to f16. Duplicate coordinates are an
/// error.
pub fn read_matrix_market<R: BufRead>(source: R) -> Result<DenseMatrix> {
    let mut lines = source.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| mm_err(1, "empty file"))?;
    parse_header(&banner?)?;

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut matrix: Option<DenseMatrix> = None;
    let mut seen = HashSet::new();
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut toks = t.split_whitespace();
        match dims {
            None => {
                let rows: usize = parse_num(toks.next(), no, "row count")?;
                let cols: usize = parse_num(toks.next(), no, "column count")?;
                let nnz: usize = parse_num(toks.next(), no, "entry count")?;
                matrix = Some(DenseMatrix::zeros(rows, cols)?);
                dims = Some((rows, cols, nnz));
            }
            Some((rows, cols, _)) => {
                let i: usize = parse_num(toks.next(), no, "row index")?;
                let j: usize = parse_num(toks.next(), no, "column index")?;
                let v: f64 = parse_num(toks.next(), no, "value")?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(mm_err(no, format!("entry ({i}, {j}) outside {rows}x{cols}")));
                }
                if !seen.insert((i, j)) {
                    return Err(mm_err(no, format!("duplicate entry ({i}, {j})")));
                }
                let m = matrix.as_mut().expect("allocated with dims");
                m.set(i - 1, j - 1, f16::from_f64(v));
            }
        }
    }
    let (_, _, nnz) = dims.ok_or_else(|| mm_err(1, "missing size line"))?;
    if seen.len() != nnz {
        return Err(mm_err(0, format!("size line announces {nnz} entries, found {}", seen.len())));
    }
    Ok(matrix.expect("allocated with dims"))
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Write the nonzeros of `m` as a real general coordinate file.
pub fn write_matrix_market<W: Write>(m: &DenseMatrix, sink: W) -> Result<()> {
    let mut w = BufWriter::new(sink);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for r in 0..m.rows() {
        for (c, v) in m.row(r).iter().enumerate() {
            if !is_zero(*v) {
                writeln!(w, "{} {} {}", r + 1, c + 1, v.to_f32())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<DenseMatrix> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn three_entries() {
        let m = read(
            "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 3\n1 1 1.5\n2 3 -2\n1 2 0.25\n",
        )
        .unwrap();
        let want = DenseMatrix::from_f32(2, 3, &[1.5, 0.25, 0.0, 0.0, 0.0, -2.0]).unwrap();
        assert_eq!(m, want);
    }

    #[test]
    fn integer_field_and_case() {
        let m = read("%%MatrixMarket Matrix Coordinate Integer General\n1 2 1\n1 2 7\n").unwrap();
        assert_eq!(m.get(0, 1).to_f32(), 7.0);
    }

    #[test]
    fn duplicates_rejected() {
        let e = read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n").unwrap_err();
        assert!(matches!(e, Error::MatrixMarket { line: 4, .. }), "{e}");
    }

    #[test]
    fn unsupported_headers() {
        for h in [
            "%%MatrixMarket matrix array real general",
            "%%MatrixMarket matrix coordinate complex general",
            "%%MatrixMarket matrix coordinate pattern general",
            "%%MatrixMarket matrix coordinate real symmetric",
            "%%MatrixMarket vector coordinate real general",
            "hello",
        ] {
            assert!(matches!(read(&format!("{h}\n1 1 0\n")), Err(Error::MatrixMarket { line: 1, .. })), "{h}");
        }
    }

    #[test]
    fn out_of_range_and_count() {
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real general\n").is_err());
    }

    #[test]
    fn write_then_read() {
        let m = DenseMatrix::from_f32(3, 4, &[0., 1., 0., -2.5, 0., 0., 0., 0., 3., 0., 0., 0.125]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        assert_eq!(read_matrix_market(buf.as_slice()).unwrap(), m);
    }
}
