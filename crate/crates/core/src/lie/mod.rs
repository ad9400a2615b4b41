//! Lie-algebra data: structure constants, matrix representations and trace
//! forms.
//!
//! Index convention: `C^l_{mn}` is stored at `(l, m, n)` so that
//! `[T_m, T_n] = C^l_{mn} T_l`. The adjoint matrices are
//! `(C_n)^l_k = C^l_{nk}`.

mod file;
mod named;

pub use file::AlgebraDefinition;
pub use named::{named_algebra, NamedAlgebra};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::Scalar;

/// Trace forms whose one-norm condition number reaches this are rejected.
pub const MAX_TRACE_FORM_CONDITION: f64 = 1e12;

/// Worst residuals found while validating a structure-constant tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals<S> {
    pub antisymmetry: S,
    pub antisymmetry_at: [usize; 3],
    pub jacobi: S,
    pub jacobi_at: [usize; 4],
}

/// Validated structure constants `C^l_{mn}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<S> {
    c: Tensor3<S>,
    residuals: StructureResiduals<S>,
}

impl<S: Scalar> StructureConstants<S> {
    /// Wraps a tensor without checking antisymmetry or Jacobi. Used for
    /// deliberately broken negative controls.
    pub fn unchecked(c: Tensor3<S>) -> Result<Self> {
        let [a, b, d] = c.dims();
        if a != b || b != d || a == 0 {
            return Err(Error::ShapeMismatch(format!(
                "structure constants must be n×n×n with n ≥ 1, got {a}×{b}×{d}"
            )));
        }
        let residuals = residuals(&c);
        Ok(Self { c, residuals })
    }

    pub fn dim(&self) -> usize {
        self.c.dims()[0]
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize, n: usize) -> S {
        self.c[(l, m, n)]
    }

    pub fn tensor(&self) -> &Tensor3<S> {
        &self.c
    }

    pub fn residuals(&self) -> &StructureResiduals<S> {
        &self.residuals
    }

    pub fn is_abelian(&self) -> bool {
        self.c.max_abs() == S::zero()
    }

    /// `(C_n)^l_k = C^l_{nk}`.
    pub fn ad_matrix(&self, n: usize) -> Mat<S> {
        let g = self.dim();
        Mat::from_fn(g, g, |l, k| self.c[(l, n, k)])
    }

    /// Structure constants in the basis `T'_m = P^a_m T_a`.
    pub fn change_basis(&self, p: &Mat<S>) -> Result<Self> {
        let g = self.dim();
        let p_inv = p.inverse()?;
        let mut out = Tensor3::zeros(g, g, g);
        for l in 0..g {
            for m in 0..g {
                for n in 0..g {
                    let mut acc = S::zero();
                    for (a, b, c, v) in self.c.nonzeros() {
                        acc += p_inv[(l, a)] * v * p[(b, m)] * p[(c, n)];
                    }
                    out[(l, m, n)] = acc;
                }
            }
        }
        Self::unchecked(out)
    }
}

fn residuals<S: Scalar>(c: &Tensor3<S>) -> StructureResiduals<S> {
    let (antisymmetry, antisymmetry_at) = antisymmetry_residual(c);
    let (jacobi, jacobi_at) = jacobi_residual(c);
    StructureResiduals {
        antisymmetry,
        antisymmetry_at,
        jacobi,
        jacobi_at,
    }
}

/// Max `|C^l_{mn} + C^l_{nm}|` and where it occurs.
pub fn antisymmetry_residual<S: Scalar>(c: &Tensor3<S>) -> (S, [usize; 3]) {
    let g = c.dims()[0];
    let mut worst = (S::zero(), [0; 3]);
    for l in 0..g {
        for m in 0..g {
            for n in m..g {
                let r = (c[(l, m, n)] + c[(l, n, m)]).abs();
                if r > worst.0 {
                    worst = (r, [l, m, n]);
                }
            }
        }
    }
    worst
}

/// Max over `(k, l, u, v)` of
/// `C^k_{ln}C^n_{uv} + C^n_{vl}C^k_{un} + C^n_{lu}C^k_{vn}` (summed on `n`).
pub fn jacobi_residual<S: Scalar>(c: &Tensor3<S>) -> (S, [usize; 4]) {
    let g = c.dims()[0];
    let mut worst = (S::zero(), [0; 4]);
    for k in 0..g {
        for l in 0..g {
            for u in 0..g {
                for v in 0..g {
                    let mut acc = S::zero();
                    for n in 0..g {
                        acc += c[(k, l, n)] * c[(n, u, v)]
                            + c[(n, v, l)] * c[(k, u, n)]
                            + c[(n, l, u)] * c[(k, v, n)];
                    }
                    if acc.abs() > worst.0 {
                        worst = (acc.abs(), [k, l, u, v]);
                    }
                }
            }
        }
    }
    worst
}

/// Checks antisymmetry and the Jacobi identity at the roundoff tolerance.
pub fn validate_structure<S: Scalar>(c: Tensor3<S>) -> Result<StructureConstants<S>> {
    let sc = StructureConstants::unchecked(c)?;
    let tol = S::roundoff_tol();
    let r = sc.residuals;
    if r.antisymmetry >= tol {
        return Err(Error::AntisymmetryViolation {
            residual: r.antisymmetry.to_f64_lossy(),
            indices: r.antisymmetry_at,
        });
    }
    if r.jacobi >= tol {
        return Err(Error::JacobiViolation {
            residual: r.jacobi.to_f64_lossy(),
            indices: r.jacobi_at,
        });
    }
    Ok(sc)
}

/// Real matrix representation `T_m ↦ R_m` of an algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<S> {
    mats: Vec<Mat<S>>,
}

impl<S: Scalar> Representation<S> {
    /// Wraps square matrices of a common size; the homomorphism property is
    /// checked separately by [`Representation::validate`].
    pub fn new(mats: Vec<Mat<S>>) -> Result<Self> {
        let n = mats.first().map(Mat::rows).unwrap_or(0);
        if n == 0 {
            return Err(Error::ShapeMismatch("empty representation".into()));
        }
        if mats.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::ShapeMismatch(
                "representation matrices must share one square size".into(),
            ));
        }
        Ok(Self { mats })
    }

    pub fn n_rep(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn n_generators(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[Mat<S>] {
        &self.mats
    }

    pub fn mat(&self, m: usize) -> &Mat<S> {
        &self.mats[m]
    }

    /// `Σ_i coeffs[i] R_i`.
    pub fn combine(&self, coeffs: &[S]) -> Mat<S> {
        let n = self.n_rep();
        let mut out = Mat::zeros(n, n);
        for (c, r) in coeffs.iter().zip(&self.mats) {
            if *c != S::zero() {
                out = &out + &r.scale(*c);
            }
        }
        out
    }

    /// Max entry of `R_m R_n − R_n R_m − C^l_{mn} R_l` over all `(m, n)`.
    pub fn homomorphism_residual(&self, sc: &StructureConstants<S>) -> (S, [usize; 2]) {
        let g = sc.dim();
        let mut worst = (S::zero(), [0; 2]);
        for m in 0..g {
            for n in m + 1..g {
                let coeffs: Vec<S> = (0..g).map(|l| sc.get(l, m, n)).collect();
                let lhs = self.mats[m].commutator(&self.mats[n]);
                let r = (&lhs - &self.combine(&coeffs)).max_abs();
                if r > worst.0 {
                    worst = (r, [m, n]);
                }
            }
        }
        worst
    }

    pub fn validate(self, sc: &StructureConstants<S>) -> Result<Self> {
        if self.n_generators() != sc.dim() {
            return Err(Error::ShapeMismatch(format!(
                "representation has {} matrices for an algebra of dimension {}",
                self.n_generators(),
                sc.dim()
            )));
        }
        let (r, at) = self.homomorphism_residual(sc);
        if r >= S::roundoff_tol() {
            return Err(Error::HomomorphismViolation {
                residual: r.to_f64_lossy(),
                indices: at,
            });
        }
        Ok(self)
    }
}

/// Adjoint representation `(C_n)^l_k = C^l_{nk}`.
pub fn adjoint_rep<S: Scalar>(sc: &StructureConstants<S>) -> Representation<S> {
    Representation {
        mats: (0..sc.dim()).map(|n| sc.ad_matrix(n)).collect(),
    }
}

/// Symmetric invertible bilinear form `T_{mn}` with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceForm<S> {
    t: Mat<S>,
    t_inv: Mat<S>,
    condition: S,
}

impl<S: Scalar> TraceForm<S> {
    /// Symmetrizes `m` and rejects it when the condition number reaches
    /// [`MAX_TRACE_FORM_CONDITION`].
    pub fn from_matrix(m: &Mat<S>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::ShapeMismatch("trace form must be square".into()));
        }
        let half = S::lit(0.5);
        let n = m.rows();
        let t = Mat::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                (m[(i, j)] + m[(j, i)]) * half
            }
        });
        let condition = t.condition_number();
        if !(condition < S::lit(MAX_TRACE_FORM_CONDITION)) {
            return Err(Error::DegenerateTraceForm {
                condition: condition.to_f64_lossy(),
            });
        }
        let t_inv = t.inverse()?;
        Ok(Self {
            t,
            t_inv,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> S {
        self.t[(m, n)]
    }

    pub fn matrix(&self) -> &Mat<S> {
        &self.t
    }

    pub fn inverse(&self) -> &Mat<S> {
        &self.t_inv
    }

    pub fn condition(&self) -> S {
        self.condition
    }
}

/// `T_{mn} = tr(R_m R_n)`.
pub fn trace_form<S: Scalar>(rep: &Representation<S>) -> Result<TraceForm<S>> {
    let g = rep.n_generators();
    let raw = Mat::from_fn(g, g, |m, n| (rep.mat(m) * rep.mat(n)).trace());
    TraceForm::from_matrix(&raw)
}

/// Max `|T_{km}C^k_{ln} + T_{nk}C^k_{lm}|` over `(l, m, n)`.
///
/// Zero exactly when `T` is ad-invariant, which makes the right-hand side of
/// the second-order field equation vanish identically.
pub fn check_ad_invariance<S: Scalar>(t: &TraceForm<S>, sc: &StructureConstants<S>) -> S {
    let g = sc.dim();
    let mut worst = S::zero();
    for l in 0..g {
        for m in 0..g {
            for n in 0..g {
                let acc: S = (0..g)
                    .map(|k| t.get(k, m) * sc.get(k, l, n) + t.get(n, k) * sc.get(k, l, m))
                    .sum();
                worst = worst.max(acc.abs());
            }
        }
    }
    worst
}
