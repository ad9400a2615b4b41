//! Algebra-definition files.
//!
//! ```toml
//! dim = 3
//! c = [
//!   { l = 2, m = 0, n = 1, value = 1.0 },
//!   { l = 2, m = 1, n = 0, value = -1.0 },
//! ]
//! # optional
//! rep = [ [[0,1,0],[0,0,0],[0,0,0]], ... ]
//! trace_form = [[1,0,0],[0,1,0],[0,0,1]]
//! ```
//!
//! Entries of `c` are taken literally: both `(l, m, n)` and `(l, n, m)` must
//! be listed, so that a one-sided entry is caught by validation. JSON with the
//! same keys is accepted too.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{validate_structure, Representation, StructureConstants, TraceForm};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    l: usize,
    m: usize,
    n: usize,
    value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    dim: usize,
    #[serde(default)]
    c: Vec<RawEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rep: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace_form: Option<Vec<Vec<f64>>>,
}

/// Parsed and validated contents of an algebra-definition file.
#[derive(Clone, Debug)]
pub struct AlgebraDefinition<S> {
    pub structure: StructureConstants<S>,
    pub rep: Option<Representation<S>>,
    pub trace_form: Option<TraceForm<S>>,
}

impl<S: Scalar> AlgebraDefinition<S> {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawAlgebra = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawAlgebra =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    /// Loads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    fn from_raw(raw: RawAlgebra) -> Result<Self> {
        let g = raw.dim;
        if g == 0 {
            return Err(Error::Parse("`dim` must be positive".into()));
        }
        let mut c = Tensor3::zeros(g, g, g);
        let mut seen = vec![false; g * g * g];
        for e in &raw.c {
            if e.l >= g || e.m >= g || e.n >= g {
                return Err(Error::Parse(format!(
                    "entry ({}, {}, {}) out of range for dim {g}",
                    e.l, e.m, e.n
                )));
            }
            if !e.value.is_finite() {
                return Err(Error::Parse("non-finite structure constant".into()));
            }
            let flat = (e.l * g + e.m) * g + e.n;
            if std::mem::replace(&mut seen[flat], true) {
                return Err(Error::Parse(format!(
                    "duplicate entry ({}, {}, {})",
                    e.l, e.m, e.n
                )));
            }
            c[(e.l, e.m, e.n)] = S::lit(e.value);
        }
        let structure = validate_structure(c)?;

        let rep = match raw.rep {
            Some(mats) => {
                let mats = mats
                    .iter()
                    .map(|rows| matrix_from_rows(rows))
                    .collect::<Result<Vec<_>>>()?;
                Some(Representation::new(mats)?.validate(&structure)?)
            }
            None => None,
        };
        let trace_form = match raw.trace_form {
            Some(rows) => {
                let t = matrix_from_rows(&rows)?;
                if t.rows() != g {
                    return Err(Error::Parse(format!(
                        "trace_form is {}×{} but dim is {g}",
                        t.rows(),
                        t.cols()
                    )));
                }
                Some(TraceForm::from_matrix(&t)?)
            }
            None => None,
        };
        Ok(Self {
            structure,
            rep,
            trace_form,
        })
    }
}

fn matrix_from_rows<S: Scalar>(rows: &[Vec<f64>]) -> Result<Mat<S>> {
    let converted: Vec<Vec<S>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| S::lit(x)).collect())
        .collect();
    let m = Mat::from_rows(&converted).map_err(|e| Error::Parse(e.to_string()))?;
    if !m.is_square() {
        return Err(Error::Parse("matrices must be square".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEISENBERG: &str = r#"
dim = 3
c = [
  { l = 2, m = 0, n = 1, value = 1.0 },
  { l = 2, m = 1, n = 0, value = -1.0 },
]
rep = [
  [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
  [[0, 0, 0], [0, 0, 1], [0, 0, 0]],
  [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
]
"#;

    #[test]
    fn parses_toml_with_rep() {
        let def = AlgebraDefinition::<f64>::from_toml_str(HEISENBERG).unwrap();
        assert_eq!(def.structure.get(2, 0, 1), 1.0);
        assert_eq!(def.rep.unwrap().n_rep(), 3);
        assert!(def.trace_form.is_none());
    }

    #[test]
    fn parses_json_with_trace_form() {
        let text = r#"{"dim": 2, "c": [], "trace_form": [[1, 0], [0, 2]]}"#;
        let def = AlgebraDefinition::<f64>::from_json_str(text).unwrap();
        assert_eq!(def.trace_form.unwrap().get(1, 1), 2.0);
    }

    #[test]
    fn one_sided_entry_is_an_antisymmetry_violation() {
        let text = "dim = 2\nc = [{ l = 0, m = 0, n = 1, value = 1.0 }]\n";
        assert!(matches!(
            AlgebraDefinition::<f64>::from_toml_str(text),
            Err(Error::AntisymmetryViolation { .. })
        ));
    }

    #[test]
    fn out_of_range_and_duplicates_are_parse_errors() {
        let oob = "dim = 2\nc = [{ l = 2, m = 0, n = 1, value = 1.0 }]\n";
        assert!(matches!(
            AlgebraDefinition::<f64>::from_toml_str(oob),
            Err(Error::Parse(_))
        ));
        let dup = "dim = 2\nc = [{ l = 0, m = 0, n = 1, value = 1.0 }, { l = 0, m = 0, n = 1, value = 1.0 }]\n";
        assert!(matches!(
            AlgebraDefinition::<f64>::from_toml_str(dup),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(AlgebraDefinition::<f64>::from_toml_str("dim = 1\nfoo = 2\n").is_err());
    }
}
