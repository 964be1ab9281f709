//! JSON formats for operators and general matrices.
//!
//! Operators: `{"d": 2, "n": 1, "entries": [[row, col, re, im], ...]}` sorted by
//! (row, col), or `{"d": 2, "n": 1, "matrix": [[re, im], ...]}` row-major.
//! Rectangular matrices (isometries) use `rows`/`cols` instead of `d`/`n`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{checked_pow, zeros, Mat, C64, ZERO};
use crate::operator::{dense_limit, ManyBodyOperator};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<(usize, usize, f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<(f64, f64)>>,
}

impl MatrixFile {
    fn shape(&self) -> Result<(usize, usize)> {
        if let (Some(d), Some(n)) = (self.d, self.n) {
            let dim = checked_pow(d, n)?;
            return Ok((dim, dim));
        }
        if let (Some(r), Some(c)) = (self.rows, self.cols) {
            return Ok((r, c));
        }
        if let Some(m) = &self.matrix {
            let side = (m.len() as f64).sqrt().round() as usize;
            if side * side == m.len() {
                return Ok((side, side));
            }
        }
        Err(Error::Parse("matrix file needs d/n, rows/cols, or a square dense matrix".into()))
    }

    fn triplets(&self, rows: usize, cols: usize) -> Result<Vec<(usize, usize, C64)>> {
        match (&self.entries, &self.matrix) {
            (Some(entries), None) => entries
                .iter()
                .map(|&(r, c, re, im)| {
                    if r >= rows || c >= cols {
                        Err(Error::Parse(format!("entry ({r},{c}) outside {rows}x{cols}")))
                    } else {
                        Ok((r, c, C64::new(re, im)))
                    }
                })
                .collect(),
            (None, Some(m)) => {
                if m.len() != rows * cols {
                    return Err(Error::Parse(format!("dense matrix has {} values, expected {}", m.len(), rows * cols)));
                }
                Ok(m
                    .iter()
                    .enumerate()
                    .map(|(k, &(re, im))| (k / cols, k % cols, C64::new(re, im)))
                    .collect())
            }
            _ => Err(Error::Parse("exactly one of 'entries' or 'matrix' must be present".into())),
        }
    }

    pub fn to_matrix(&self) -> Result<Mat> {
        let (rows, cols) = self.shape()?;
        let mut m = zeros(rows, cols);
        for (r, c, v) in self.triplets(rows, cols)? {
            m[(r, c)] += v;
        }
        Ok(m)
    }

    pub fn to_operator(&self) -> Result<ManyBodyOperator> {
        let (d, n) = match (self.d, self.n) {
            (Some(d), Some(n)) => (d, n),
            _ => return Err(Error::Parse("operator files need 'd' and 'n'".into())),
        };
        let dim = checked_pow(d, n)?;
        let trips = self.triplets(dim, dim)?;
        if dim <= dense_limit() {
            let mut m = zeros(dim, dim);
            for (r, c, v) in trips {
                m[(r, c)] += v;
            }
            ManyBodyOperator::from_dense(d, n, m)
        } else {
            ManyBodyOperator::from_sparse(d, n, CsrMatrix::from_triplets(dim, dim, trips))
        }
    }

    pub fn from_operator(op: &ManyBodyOperator) -> Self {
        let entries = op.entries().into_iter().map(|(r, c, v)| (r, c, v.re, v.im)).collect();
        MatrixFile { d: Some(op.local_dim()), n: Some(op.n_sites()), entries: Some(entries), ..Default::default() }
    }

    pub fn from_matrix(m: &Mat) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v.re, v.im));
                }
            }
        }
        MatrixFile { rows: Some(m.nrows()), cols: Some(m.ncols()), entries: Some(entries), ..Default::default() }
    }
}

pub fn operator_to_json(op: &ManyBodyOperator) -> Result<String> {
    Ok(serde_json::to_string(&MatrixFile::from_operator(op))?)
}

pub fn operator_from_json(s: &str) -> Result<ManyBodyOperator> {
    serde_json::from_str::<MatrixFile>(s)?.to_operator()
}

pub fn read_operator(path: &Path) -> Result<ManyBodyOperator> {
    operator_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_operator(path: &Path, op: &ManyBodyOperator) -> Result<()> {
    std::fs::write(path, operator_to_json(op)?)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    serde_json::from_str::<MatrixFile>(&std::fs::read_to_string(path)?)?.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, real};

    #[test]
    fn round_trip_is_bit_exact() {
        let mut m = zeros(4, 4);
        m[(0, 0)] = real(0.25);
        m[(1, 2)] = c64(1.0 / 3.0, -0.1);
        m[(2, 1)] = c64(1.0 / 3.0, 0.1);
        m[(3, 3)] = real(-7.0 / 11.0);
        let op = ManyBodyOperator::from_dense(2, 2, m.clone()).unwrap();
        let json = operator_to_json(&op).unwrap();
        let back = operator_from_json(&json).unwrap();
        assert_eq!(back.to_dense(), m);
        assert_eq!(operator_to_json(&back).unwrap(), json);
    }

    #[test]
    fn entries_are_sorted() {
        let json = r#"{"d":2,"n":1,"entries":[[1,0,1.0,0.0],[0,1,1.0,0.0]]}"#;
        let op = operator_from_json(json).unwrap();
        let out = operator_to_json(&op).unwrap();
        assert_eq!(out, r#"{"d":2,"n":1,"entries":[[0,1,1.0,0.0],[1,0,1.0,0.0]]}"#);
    }

    #[test]
    fn dense_matrix_form() {
        let json = r#"{"d":2,"n":1,"matrix":[[1,0],[0,0],[0,0],[-1,0]]}"#;
        let op = operator_from_json(json).unwrap();
        assert_eq!(op.to_dense()[(1, 1)], real(-1.0));
    }

    #[test]
    fn rectangular_isometry() {
        let json = r#"{"rows":3,"cols":1,"entries":[[2,0,1.0,0.0]]}"#;
        let m: MatrixFile = serde_json::from_str(json).unwrap();
        let mat = m.to_matrix().unwrap();
        assert_eq!((mat.nrows(), mat.ncols()), (3, 1));
    }

    #[test]
    fn malformed_inputs() {
        assert!(operator_from_json(r#"{"d":2,"n":1}"#).is_err());
        assert!(operator_from_json(r#"{"d":2,"n":1,"entries":[[5,0,1.0,0.0]]}"#).is_err());
        assert!(operator_from_json("not json").is_err());
    }
}
