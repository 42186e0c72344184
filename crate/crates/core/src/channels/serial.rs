//! JSON-facing channel file layout.
//!
//! ```json
//! {"dim": 2, "representation": "kraus", "convention": "column-stacking",
//!  "entries": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}
//! ```
//!
//! `entries` is one matrix (rows of `[re, im]` pairs) for `superop` and
//! `choi`, and a list of such matrices for `kraus`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{Channel, ChoiOperator, KrausChannel, Superoperator};
use crate::algebra::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub const CONVENTION: &str = "column-stacking";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Kraus,
    Superop,
    Choi,
}

pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Matrix(MatrixRows),
    Stack(Vec<MatrixRows>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub representation: Representation,
    pub entries: Entries,
    pub convention: String,
    /// Only meaningful for `choi`: whether the stored matrix is `J/d`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalized: bool,
}

pub fn matrix_to_rows<T: Real>(m: &ComplexMatrix<T>) -> MatrixRows {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)]
                })
                .collect()
        })
        .collect()
}

pub fn rows_to_matrix<T: Real>(rows: &MatrixRows) -> Result<ComplexMatrix<T>> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::InvalidParameter("ragged matrix rows".into()));
    }
    let entries = rows.iter().flatten().map(|&[re, im]| Complex::new(lit(re), lit(im))).collect();
    ComplexMatrix::new(n_rows, n_cols, entries)
}

impl ChannelFile {
    pub fn from_kraus<T: Real>(k: &KrausChannel<T>) -> Self {
        Self {
            dim: k.dim(),
            representation: Representation::Kraus,
            entries: Entries::Stack(k.ops().iter().map(matrix_to_rows).collect()),
            convention: CONVENTION.into(),
            normalized: false,
        }
    }

    pub fn from_superop<T: Real>(s: &Superoperator<T>) -> Self {
        Self {
            dim: s.dim(),
            representation: Representation::Superop,
            entries: Entries::Matrix(matrix_to_rows(s.matrix())),
            convention: CONVENTION.into(),
            normalized: false,
        }
    }

    pub fn from_choi<T: Real>(j: &ChoiOperator<T>) -> Self {
        Self {
            dim: j.dim(),
            representation: Representation::Choi,
            entries: Entries::Matrix(matrix_to_rows(j.matrix())),
            convention: CONVENTION.into(),
            normalized: j.is_normalized(),
        }
    }

    pub fn to_channel<T: Real>(&self) -> Result<Channel<T>> {
        if self.convention != CONVENTION {
            return Err(Error::InvalidParameter(format!(
                "unsupported vectorization convention {:?}, expected {CONVENTION:?}",
                self.convention
            )));
        }
        match (self.representation, &self.entries) {
            (Representation::Kraus, Entries::Stack(ops)) => {
                let ops = ops.iter().map(rows_to_matrix).collect::<Result<Vec<_>>>()?;
                let k = KrausChannel::new(ops)?;
                check_dim(self.dim, k.dim())?;
                Ok(Channel::Kraus(k))
            }
            (Representation::Superop, Entries::Matrix(rows)) => {
                Ok(Channel::Superop(Superoperator::new(self.dim, rows_to_matrix(rows)?)?))
            }
            (Representation::Choi, Entries::Matrix(rows)) => {
                Ok(Channel::Choi(ChoiOperator::new(self.dim, rows_to_matrix(rows)?, self.normalized)?))
            }
            (rep, _) => Err(Error::InvalidParameter(format!("entries layout does not match representation {rep:?}"))),
        }
    }
}

fn check_dim(declared: usize, actual: usize) -> Result<()> {
    if declared != actual {
        return Err(Error::DimensionMismatch { expected: format!("dim {declared}"), found: format!("dim {actual}") });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::random_cp_channel;

    #[test]
    fn kraus_file_round_trip() {
        let k = random_cp_channel::<f64>(2, 2, 3).unwrap();
        let file = ChannelFile::from_kraus(&k);
        let json = serde_json::to_string(&file).unwrap();
        let back: ChannelFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        match back.to_channel::<f64>().unwrap() {
            Channel::Kraus(k2) => assert_eq!(k2, k),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn layout_and_convention_are_checked() {
        let s = Superoperator::<f64>::identity(2);
        let mut file = ChannelFile::from_superop(&s);
        file.representation = Representation::Kraus;
        assert!(file.to_channel::<f64>().is_err());
        let mut file = ChannelFile::from_superop(&s);
        file.convention = "row-stacking".into();
        assert!(file.to_channel::<f64>().is_err());
        let mut file = ChannelFile::from_superop(&s);
        file.dim = 3;
        assert!(file.to_channel::<f64>().is_err());
    }

    #[test]
    fn parses_handwritten_choi() {
        let json = r#"{"dim": 2, "representation": "choi", "convention": "column-stacking",
            "entries": [[[0.5,0],[0,0],[0,0],[0.5,0]],[[0,0],[0,0],[0,0],[0,0]],
                        [[0,0],[0,0],[0,0],[0,0]],[[0.5,0],[0,0],[0,0],[0.5,0]]]}"#;
        let file: ChannelFile = serde_json::from_str(json).unwrap();
        let s = file.to_channel::<f64>().unwrap().superoperator();
        assert!(s.matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }
}
