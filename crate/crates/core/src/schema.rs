//! JSON encoding shared by every report and instance file.
//!
//! A complex scalar is `[re, im]` (a bare number is accepted as a real
//! scalar on input). A matrix is a row-major array of rows. An instance file
//! looks like
//!
//! ```json
//! {
//!   "n": 2,
//!   "A": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
//!   "T": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]],
//!   "S": [[1, 0], [0, 1]],
//!   "x": [[1, 0], [0, 0]],
//!   "y": [[0, 0], [1, 0]],
//!   "d": 2,
//!   "blocks": [[M11, M12], [M21, M22]],
//!   "check": "sandwich"
//! }
//! ```
//!
//! where every key except `A` is optional.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Pair([f64; 2]),
    Real(f64),
}

impl From<ScalarRepr> for Complex64 {
    fn from(s: ScalarRepr) -> Self {
        match s {
            ScalarRepr::Pair([re, im]) => Complex64::new(re, im),
            ScalarRepr::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

/// `Complex64` as `[re, im]`.
pub mod cx {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        ScalarRepr::deserialize(d).map(Into::into)
    }
}

pub mod cx_opt {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<ScalarRepr>::deserialize(d)?.map(Into::into))
    }
}

pub mod cx_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<ScalarRepr>::deserialize(d)?.into_iter().map(Into::into).collect())
    }
}

pub mod cx_vec_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Complex64>>, D::Error> {
        Ok(Option::<Vec<ScalarRepr>>::deserialize(d)?.map(|v| v.into_iter().map(Into::into).collect()))
    }
}

fn mat_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

fn rows_to_mat<E: serde::de::Error>(rows: Vec<Vec<ScalarRepr>>) -> Result<CMat, E> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(E::custom("matrix rows have different lengths"));
    }
    let data: Vec<Complex64> = rows.into_iter().flatten().map(Into::into).collect();
    Ok(CMat::from_row_slice(nrows, ncols, &data))
}

/// `CMat` as a row-major array of rows of `[re, im]`.
pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        mat_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        rows_to_mat(Vec::<Vec<ScalarRepr>>::deserialize(d)?)
    }
}

pub mod cmat_opt {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<CMat>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(mat_rows).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMat>, D::Error> {
        match Option::<Vec<Vec<ScalarRepr>>>::deserialize(d)? {
            Some(rows) => rows_to_mat(rows).map(Some),
            None => Ok(None),
        }
    }
}

/// Grid of matrices, `blocks[i][j]`.
pub mod cmat_grid_opt {
    use super::*;

    pub fn serialize<S: Serializer>(g: &Option<Vec<Vec<CMat>>>, s: S) -> Result<S::Ok, S::Error> {
        g.as_ref()
            .map(|g| g.iter().map(|row| row.iter().map(mat_rows).collect::<Vec<_>>()).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec<CMat>>>, D::Error> {
        let raw = Option::<Vec<Vec<Vec<Vec<ScalarRepr>>>>>::deserialize(d)?;
        raw.map(|g| {
            g.into_iter()
                .map(|row| row.into_iter().map(rows_to_mat::<D::Error>).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(D::Error::custom)
    }
}

/// A problem instance as read from disk.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "A", with = "cmat")]
    pub a: CMat,
    #[serde(rename = "T", default, with = "cmat_opt", skip_serializing_if = "Option::is_none")]
    pub t: Option<CMat>,
    #[serde(rename = "S", default, with = "cmat_opt", skip_serializing_if = "Option::is_none")]
    pub s: Option<CMat>,
    #[serde(default, with = "cx_vec_opt", skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Complex64>>,
    #[serde(default, with = "cx_vec_opt", skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, with = "cmat_grid_opt", skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<CMat>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile> {
        let inst: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Dimension consistency across every present field.
    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        if n == 0 || self.a.ncols() != n {
            return Err(Error::Invalid(format!("A must be a nonempty square matrix, got {}x{}", n, self.a.ncols())));
        }
        if let Some(declared) = self.n {
            if declared != n {
                return Err(Error::Invalid(format!("n = {declared} but A is {n}x{n}")));
            }
        }
        let square = |name: &str, m: &Option<CMat>| match m {
            Some(m) if m.nrows() != n || m.ncols() != n => {
                Err(Error::Invalid(format!("{name} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())))
            }
            _ => Ok(()),
        };
        square("T", &self.t)?;
        square("S", &self.s)?;
        for (name, v) in [("x", &self.x), ("y", &self.y)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(Error::Invalid(format!("{name} has length {}, expected {n}", v.len())));
                }
            }
        }
        if let Some(blocks) = &self.blocks {
            let d = self.d.unwrap_or(blocks.len());
            if blocks.len() != d || blocks.iter().any(|row| row.len() != d) {
                return Err(Error::Invalid(format!("blocks must form a {d}x{d} grid")));
            }
            for (i, row) in blocks.iter().enumerate() {
                for (j, b) in row.iter().enumerate() {
                    if b.nrows() != n || b.ncols() != n {
                        return Err(Error::Invalid(format!("block ({i}, {j}) is {}x{}, expected {n}x{n}", b.nrows(), b.ncols())));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn x_vec(&self) -> Option<CVec> {
        self.x.as_ref().map(|v| CVec::from_column_slice(v))
    }

    pub fn y_vec(&self) -> Option<CVec> {
        self.y.as_ref().map(|v| CVec::from_column_slice(v))
    }
}

/// Gauges of one operator, as printed by `semihilbert radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub omega: f64,
    pub crawford: f64,
    pub norm: f64,
    pub spectral_radius: f64,
    pub normaloid: bool,
    pub rank: usize,
    pub sweep: crate::gauges::SweepMeta,
}

/// Closed forms of `x (x)_A y`, as printed by `semihilbert rankone`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneReport {
    #[serde(with = "cmat")]
    pub matrix: CMat,
    #[serde(with = "cmat")]
    pub adjoint: CMat,
    pub norm: f64,
    pub radius: f64,
    #[serde(with = "cx")]
    pub inner: Complex64,
}
