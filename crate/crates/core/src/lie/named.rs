use std::fmt;
use std::str::FromStr;

use super::{validate_structure, Representation, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::Scalar;

/// Built-in test algebras with exact integer (or half-integer) data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedAlgebra {
    Abelian(usize),
    Heisenberg3,
    Su2,
    Sl2r,
    So3,
}

impl NamedAlgebra {
    pub const ALL_FIXED: [NamedAlgebra; 4] = [
        NamedAlgebra::Heisenberg3,
        NamedAlgebra::Su2,
        NamedAlgebra::Sl2r,
        NamedAlgebra::So3,
    ];

    pub fn dim(self) -> usize {
        match self {
            NamedAlgebra::Abelian(n) => n,
            _ => 3,
        }
    }

    pub fn structure_constants<S: Scalar>(self) -> Result<StructureConstants<S>> {
        let g = self.dim();
        let mut c = Tensor3::zeros(g, g, g);
        let mut set = |l: usize, m: usize, n: usize, v: f64| {
            c[(l, m, n)] = S::lit(v);
            c[(l, n, m)] = S::lit(-v);
        };
        match self {
            NamedAlgebra::Abelian(_) => {}
            NamedAlgebra::Heisenberg3 => set(2, 0, 1, 1.0),
            NamedAlgebra::Su2 | NamedAlgebra::So3 => {
                set(2, 0, 1, 1.0);
                set(0, 1, 2, 1.0);
                set(1, 2, 0, 1.0);
            }
            // basis (H, E, F)
            NamedAlgebra::Sl2r => {
                set(1, 0, 1, 2.0);
                set(2, 0, 2, -2.0);
                set(0, 1, 2, 1.0);
            }
        }
        validate_structure(c)
    }

    /// Default faithful representation.
    ///
    /// * `abelian(n)`: elementary diagonal matrices `E_mm`.
    /// * `heisenberg3`: strictly upper-triangular 3×3 matrices.
    /// * `su2`: `-(i/2)σ_m` realified to 4×4 real matrices.
    /// * `sl2r`: the defining 2×2 representation.
    /// * `so3`: rotation generators `(L_m)_{jk} = -ε_{mjk}`.
    pub fn default_rep<S: Scalar>(self) -> Vec<Mat<S>> {
        let m =
            |rows: &[&[f64]]| Mat::from_fn(rows.len(), rows[0].len(), |i, j| S::lit(rows[i][j]));
        match self {
            NamedAlgebra::Abelian(n) => (0..n)
                .map(|k| {
                    let mut e = Mat::zeros(n, n);
                    e[(k, k)] = S::one();
                    e
                })
                .collect(),
            NamedAlgebra::Heisenberg3 => vec![
                m(&[&[0., 1., 0.], &[0., 0., 0.], &[0., 0., 0.]]),
                m(&[&[0., 0., 0.], &[0., 0., 1.], &[0., 0., 0.]]),
                m(&[&[0., 0., 1.], &[0., 0., 0.], &[0., 0., 0.]]),
            ],
            NamedAlgebra::Su2 => {
                // X = A + iB  ↦  [[A, -B], [B, A]]
                let realify = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
                    Mat::from_fn(4, 4, |i, j| {
                        let (bi, bj, r, c) = (i / 2, j / 2, i % 2, j % 2);
                        let v = match (bi, bj) {
                            (0, 0) | (1, 1) => a[r][c],
                            (0, 1) => -b[r][c],
                            _ => b[r][c],
                        };
                        S::lit(v)
                    })
                };
                let z = [[0.0; 2]; 2];
                vec![
                    realify(z, [[0.0, -0.5], [-0.5, 0.0]]),
                    realify([[0.0, -0.5], [0.5, 0.0]], z),
                    realify(z, [[-0.5, 0.0], [0.0, 0.5]]),
                ]
            }
            NamedAlgebra::Sl2r => vec![
                m(&[&[1., 0.], &[0., -1.]]),
                m(&[&[0., 1.], &[0., 0.]]),
                m(&[&[0., 0.], &[1., 0.]]),
            ],
            NamedAlgebra::So3 => vec![
                m(&[&[0., 0., 0.], &[0., 0., -1.], &[0., 1., 0.]]),
                m(&[&[0., 0., 1.], &[0., 0., 0.], &[-1., 0., 0.]]),
                m(&[&[0., -1., 0.], &[1., 0., 0.], &[0., 0., 0.]]),
            ],
        }
    }
}

impl FromStr for NamedAlgebra {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = s.trim().to_ascii_lowercase();
        match name.as_str() {
            "heisenberg3" => return Ok(NamedAlgebra::Heisenberg3),
            "su2" => return Ok(NamedAlgebra::Su2),
            "sl2r" => return Ok(NamedAlgebra::Sl2r),
            "so3" => return Ok(NamedAlgebra::So3),
            _ => {}
        }
        name.strip_prefix("abelian(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|n| n.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .map(NamedAlgebra::Abelian)
            .ok_or_else(|| Error::UnknownAlgebra(s.to_string()))
    }
}

impl fmt::Display for NamedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedAlgebra::Abelian(n) => write!(f, "abelian({n})"),
            NamedAlgebra::Heisenberg3 => f.write_str("heisenberg3"),
            NamedAlgebra::Su2 => f.write_str("su2"),
            NamedAlgebra::Sl2r => f.write_str("sl2r"),
            NamedAlgebra::So3 => f.write_str("so3"),
        }
    }
}

/// Looks up a built-in algebra by name, e.g. `"su2"` or `"abelian(4)"`.
pub fn named_algebra<S: Scalar>(name: &str) -> Result<(StructureConstants<S>, Representation<S>)> {
    let which: NamedAlgebra = name.parse()?;
    let sc = which.structure_constants()?;
    let rep = Representation::new(which.default_rep())?.validate(&sc)?;
    Ok((sc, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{adjoint_rep, check_ad_invariance, trace_form};

    #[test]
    fn every_named_algebra_is_exact() {
        for name in ["abelian(4)", "heisenberg3", "su2", "sl2r", "so3"] {
            let (sc, rep) = named_algebra::<f64>(name).unwrap();
            assert_eq!(sc.residuals().antisymmetry, 0.0, "{name}");
            assert_eq!(sc.residuals().jacobi, 0.0, "{name}");
            assert_eq!(rep.homomorphism_residual(&sc).0, 0.0, "{name}");
        }
    }

    #[test]
    fn abelian_four_is_zero_tensor() {
        let (sc, _) = named_algebra::<f64>("abelian(4)").unwrap();
        assert_eq!(sc.dim(), 4);
        assert!(sc.is_abelian());
    }

    #[test]
    fn su2_is_levi_civita() {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        assert_eq!(sc.get(2, 0, 1), 1.0);
        assert_eq!(sc.get(0, 1, 2), 1.0);
        assert_eq!(sc.get(1, 2, 0), 1.0);
        assert_eq!(sc.get(1, 0, 2), -1.0);
        assert_eq!(
            sc.tensor().as_slice().iter().filter(|x| **x != 0.0).count(),
            6
        );
    }

    #[test]
    fn sl2r_matches_defining_matrices() {
        let (sc, rep) = named_algebra::<f64>("sl2r").unwrap();
        let (h, e, f) = (rep.mat(0), rep.mat(1), rep.mat(2));
        assert_eq!(h.commutator(e), e.scale(2.0));
        assert_eq!(h.commutator(f), f.scale(-2.0));
        assert_eq!(e.commutator(f), *h);
        assert_eq!(sc.get(1, 0, 1), 2.0);
        assert_eq!(sc.get(2, 0, 2), -2.0);
        assert_eq!(sc.get(0, 1, 2), 1.0);
    }

    #[test]
    fn killing_forms_are_ad_invariant() {
        for name in ["su2", "so3", "sl2r"] {
            let (sc, rep) = named_algebra::<f64>(name).unwrap();
            let killing = trace_form(&adjoint_rep(&sc)).unwrap();
            assert!(check_ad_invariance(&killing, &sc) < 1e-12, "{name}");
            let defining = trace_form(&rep).unwrap();
            assert!(check_ad_invariance(&defining, &sc) < 1e-12, "{name}");
        }
    }

    #[test]
    fn su2_realified_trace_form_is_minus_identity() {
        let (_, rep) = named_algebra::<f64>("su2").unwrap();
        assert_eq!(
            trace_form(&rep).unwrap().matrix(),
            &Mat::identity(3).scale(-1.0)
        );
    }

    #[test]
    fn unknown_names_fail() {
        for bad in ["su3", "abelian(0)", "abelian(x)", ""] {
            assert!(matches!(
                named_algebra::<f64>(bad),
                Err(Error::UnknownAlgebra(_))
            ));
        }
    }

    #[test]
    fn display_roundtrips() {
        for a in [
            NamedAlgebra::Abelian(5),
            NamedAlgebra::Sl2r,
            NamedAlgebra::Heisenberg3,
        ] {
            assert_eq!(a.to_string().parse::<NamedAlgebra>().unwrap(), a);
        }
    }
}
