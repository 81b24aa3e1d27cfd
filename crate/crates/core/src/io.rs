//! Covariance-matrix files.
//!
//! Two formats are read:
//!
//! * JSON: `{"modes": N, "ordering": "block" | "interleaved", "matrix": [4N² reals]}`
//!   with the matrix row-major. `ordering` defaults to `"block"`.
//! * Plain text: one matrix row per line, entries separated by whitespace,
//!   in block ordering. Blank lines and lines starting with `#` are skipped.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{interleaved_to_block, CovarianceMatrix};

/// Phase-space ordering of a stored matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `(x₁ … x_N, p₁ … p_N)`.
    #[default]
    Block,
    /// `(x₁, p₁, …, x_N, p_N)`.
    Interleaved,
}

/// JSON representation of a covariance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceFile {
    pub modes: usize,
    #[serde(default)]
    pub ordering: Ordering,
    pub matrix: Vec<f64>,
}

impl CovarianceFile {
    pub fn from_covariance(sigma: &CovarianceMatrix<f64>) -> Self {
        Self {
            modes: sigma.modes(),
            ordering: Ordering::Block,
            matrix: sigma.to_row_major(),
        }
    }

    /// The matrix in block ordering, not yet checked for symmetry.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.modes == 0 {
            return Err(Error::Parse("`modes` must be positive".into()));
        }
        let dim = 2 * self.modes;
        if self.matrix.len() != dim * dim {
            return Err(Error::Parse(format!(
                "expected {} matrix entries for {} modes, found {}",
                dim * dim,
                self.modes,
                self.matrix.len()
            )));
        }
        let m = DMatrix::from_row_slice(dim, dim, &self.matrix);
        Ok(match self.ordering {
            Ordering::Block => m,
            Ordering::Interleaved => interleaved_to_block(&m),
        })
    }
}

/// Reads either file format into a block-ordered square matrix of even size.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: CovarianceFile = serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        return file.to_matrix();
    }
    parse_plain(text)
}

fn parse_plain(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: `{tok}` is not a number", number + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let dim = rows.len();
    if dim == 0 {
        return Err(Error::Parse("no matrix rows found".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::Parse(format!(
            "matrix is not square: row {} has {} entries, expected {dim}",
            bad + 1,
            rows[bad].len()
        )));
    }
    if dim % 2 != 0 {
        return Err(Error::Parse(format!("matrix dimension {dim} is odd")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

/// Reads a covariance matrix, checking shape, finiteness and symmetry.
pub fn parse_covariance(text: &str) -> Result<CovarianceMatrix<f64>> {
    CovarianceMatrix::new(parse_matrix(text)?)
}

/// Serializes in the JSON file format with block ordering.
pub fn covariance_to_json(sigma: &CovarianceMatrix<f64>) -> String {
    serde_json::to_string(&CovarianceFile::from_covariance(sigma)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn json_block() {
        let sigma = parse_covariance(r#"{"modes": 1, "ordering": "block", "matrix": [3, 0, 0, 3]}"#).unwrap();
        assert_eq!(sigma.matrix(), &dmatrix![3.0, 0.0; 0.0, 3.0]);
    }

    #[test]
    fn json_interleaved_is_reordered() {
        // x1 p1 x2 p2 with distinct diagonal entries
        let text = r#"{"modes": 2, "ordering": "interleaved",
            "matrix": [1,0,0,0, 0,2,0,0, 0,0,3,0, 0,0,0,4]}"#;
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.diagonal().as_slice(), &[1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn plain_text() {
        let m = parse_matrix("# vacuum\n1 0\n\n0 1\n").unwrap();
        assert_eq!(m, DMatrix::identity(2, 2));
    }

    #[test]
    fn format_errors() {
        assert!(matches!(parse_matrix("1 0 0\n0 1 0\n0 0 1"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 0\n0"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix("1 x\n0 1"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix(""), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix(r#"{"modes": 1, "matrix": [1, 0, 0]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix(r#"{"modes": 1, "matrix": [1, 0, 0, 1], "extra": 1}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix(r#"{"modes": 1, "ordering": "diagonal", "matrix": [1, 0, 0, 1]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn json_round_trip() {
        let sigma = CovarianceMatrix::new(dmatrix![2.0, 0.5; 0.5, 1.5]).unwrap();
        let back = parse_covariance(&covariance_to_json(&sigma)).unwrap();
        assert_eq!(back, sigma);
    }
}
