//! Plain-text dense matrices and vectors.
//!
//! The first non-empty line holds `rows cols`; each following line holds one
//! row of space-separated decimals. A vector is an `n x 1` or `1 x n` matrix.
//! Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Parses a matrix from text; `origin` only labels error messages.
pub fn parse_matrix<T: Real>(text: &str, origin: &Path) -> Result<Matrix<T>> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_path_buf(), line, msg };
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(hline, format!("bad dimension `{t}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(err(hline, "header must be `rows cols`".into()));
    };

    let mut values = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        if seen == rows {
            return Err(err(ln, format!("more than {rows} data rows")));
        }
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| err(ln, format!("bad number `{tok}`")))?;
            if !v.is_finite() {
                return Err(err(ln, format!("non-finite value `{tok}`")));
            }
            values.push(T::lit(v));
        }
        if values.len() - before != cols {
            return Err(err(ln, format!("expected {cols} values, found {}", values.len() - before)));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(err(hline, format!("expected {rows} data rows, found {seen}")));
    }
    Matrix::from_row_major(rows, cols, &values)
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<Matrix<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}

/// Reads a row or column vector.
pub fn read_vector<T: Real>(path: &Path) -> Result<Vec<T>> {
    let m: Matrix<T> = read_matrix(path)?;
    if m.nrows() != 1 && m.ncols() != 1 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("expected a vector, found a {}x{} matrix", m.nrows(), m.ncols()),
        });
    }
    Ok(m.as_slice().to_vec())
}

/// Formats with full round-trip precision.
pub fn format_matrix<T: Real>(m: &Matrix<T>) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:?}", m[(i, j)].as_f64());
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix<T: Real>(path: &Path, m: &Matrix<T>) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(|e| Error::io(path, e))
}

/// Writes `v` as an `n x 1` column.
pub fn write_vector<T: Real>(path: &Path, v: &[T]) -> Result<()> {
    write_matrix(path, &Matrix::from_fn(v.len(), 1, |i, _| v[i]))
}
