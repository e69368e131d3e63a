//! JSON shapes: matrices `{"dim", "mat"}`, pencils `{"dim", "d", "basis"}`,
//! and audit reports `{status, margin, witness, tolerances, seed}`.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::status::Status;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Serde adapter storing a matrix as a list of rows.
pub mod mat_rows {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
        rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat, D::Error> {
        let r: Vec<Vec<f64>> = Vec::deserialize(d)?;
        from_rows(&r).map_err(serde::de::Error::custom)
    }
}

pub fn rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn from_rows(r: &[Vec<f64>]) -> Result<Mat> {
    let nr = r.len();
    let nc = r.first().map_or(0, |x| x.len());
    if nr == 0 || nc == 0 || r.iter().any(|x| x.len() != nc) {
        return Err(Error::Malformed("matrix rows are empty or ragged".into()));
    }
    Ok(Mat::from_fn(nr, nc, |i, j| r[i][j]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub mat: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_mat(m: &Mat) -> Self {
        MatrixJson { dim: m.nrows(), mat: rows(m) }
    }

    pub fn to_mat(&self) -> Result<Mat> {
        let m = from_rows(&self.mat)?;
        if m.nrows() != self.dim {
            return Err(Error::Malformed(format!("declared dim {} but {} rows", self.dim, m.nrows())));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilJson {
    pub dim: usize,
    pub d: usize,
    pub basis: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameJson {
    pub frame: Vec<Vec<f64>>,
}

/// One check inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
}

/// Report emitted by every CLI command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub margin: Option<f64>,
    pub witness: serde_json::Value,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            status: Status::True,
            margin: None,
            witness: serde_json::Value::Null,
            tolerances: BTreeMap::new(),
            seed,
            checks: Vec::new(),
            data: serde_json::Value::Null,
        }
    }

    /// Adds a check and folds its status into the report status.
    pub fn check(&mut self, name: &str, status: Status, margin: Option<f64>, tolerance: Option<f64>) {
        self.status = worst(self.status, status);
        self.checks.push(Check { name: name.to_string(), status, margin, tolerance });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `False` dominates `Inconclusive`, which dominates `True`.
pub fn worst(a: Status, b: Status) -> Status {
    a.and(b)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn parse_matrix(text: &str) -> Result<Mat> {
    let j: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("matrix JSON: {e}")))?;
    j.to_mat()
}

pub fn read_matrix(path: &Path) -> Result<Mat> {
    parse_matrix(&read_text(path)?)
}

/// Accepts either `{"frame": rows}` or the matrix shape `{"dim", "mat"}`.
pub fn parse_frame(text: &str) -> Result<Mat> {
    if let Ok(f) = serde_json::from_str::<FrameJson>(text) {
        return from_rows(&f.frame);
    }
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("frame JSON: {e}")))?;
    if let Some(m) = v.get("mat") {
        let r: Vec<Vec<f64>> = serde_json::from_value(m.clone()).map_err(|e| Error::Malformed(format!("frame JSON: {e}")))?;
        return from_rows(&r);
    }
    Err(Error::Malformed("frame JSON needs a \"frame\" or \"mat\" field".into()))
}

pub fn parse_pencil_basis(text: &str) -> Result<Vec<Mat>> {
    let p: PencilJson = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("pencil JSON: {e}")))?;
    if p.basis.len() != p.d {
        return Err(Error::Malformed(format!("declared d = {} but {} basis matrices", p.d, p.basis.len())));
    }
    let mats = p.basis.iter().map(|b| from_rows(b)).collect::<Result<Vec<_>>>()?;
    if mats.iter().any(|m| m.nrows() != p.dim || m.ncols() != p.dim) {
        return Err(Error::Malformed("basis matrix shape disagrees with dim".into()));
    }
    Ok(mats)
}

pub fn pencil_json(basis: &[Mat]) -> PencilJson {
    PencilJson { dim: basis.first().map_or(0, |m| m.nrows()), d: basis.len(), basis: basis.iter().map(rows).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let s = serde_json::to_string(&MatrixJson::from_mat(&m)).unwrap();
        assert_eq!(parse_matrix(&s).unwrap(), m);
    }

    #[test]
    fn malformed_json_is_reported() {
        assert!(matches!(parse_matrix("{\"dim\": 2"), Err(Error::Malformed(_))));
        assert!(matches!(parse_matrix("{\"dim\": 3, \"mat\": [[1,0],[0,1]]}"), Err(Error::Malformed(_))));
    }
}
