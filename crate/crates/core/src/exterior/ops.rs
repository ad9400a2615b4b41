use super::basis::Basis;
use super::form::{disjoint_sign, sign_of, FormField};
use crate::error::{Error, Result};
use crate::linalg::Tensor3;
use crate::scalar::Scalar;

/// How the algebra indices of the two wedge factors combine.
#[derive(Clone, Copy, Debug)]
pub enum IndexCombine<'a, S> {
    /// `out^{(i, j)} = a^i ∧ b^j` with combined index `i * n_b + j`.
    Outer,
    /// `out^l = K[(l, i, j)] a^i ∧ b^j`.
    Contract(&'a Tensor3<S>),
}

/// Pointwise wedge product.
pub fn wedge<S: Scalar>(
    a: &FormField<S>,
    b: &FormField<S>,
    combine: IndexCombine<'_, S>,
) -> Result<FormField<S>> {
    let grid = a.grid();
    if grid != b.grid() {
        return Err(Error::ShapeMismatch(
            "wedge of forms on different grids".into(),
        ));
    }
    let d = grid.dim();
    let (p, q) = (a.degree(), b.degree());
    if p + q > d {
        return Err(Error::DegreeOverflow { p, q, d });
    }
    let (ba, bb, bo) = (Basis::new(d, p), Basis::new(d, q), Basis::new(d, p + q));
    // (k_a, k_b, k_out, sign) for every pair of disjoint basis elements
    let mut pairs = Vec::new();
    for ka in 0..ba.len() {
        for kb in 0..bb.len() {
            let (ma, mb) = (ba.mask(ka), bb.mask(kb));
            if ma & mb == 0 {
                pairs.push((ka, kb, bo.index(ma | mb), disjoint_sign::<S>(ma, mb)));
            }
        }
    }
    let (na, nb) = (a.n_comp(), b.n_comp());
    match combine {
        IndexCombine::Outer => {
            let mut out = FormField::zeros(grid, p + q, na * nb)?;
            for pt in 0..grid.n_points() {
                for i in 0..na {
                    let ca = a.components_at(pt, i);
                    for j in 0..nb {
                        let cb = b.components_at(pt, j);
                        for &(ka, kb, ko, s) in &pairs {
                            out.add_at(pt, i * nb + j, ko, s * ca[ka] * cb[kb]);
                        }
                    }
                }
            }
            Ok(out)
        }
        IndexCombine::Contract(k) => {
            let [n_out, ki, kj] = k.dims();
            if ki != na || kj != nb {
                return Err(Error::ShapeMismatch(format!(
                    "contraction tensor is {n_out}×{ki}×{kj} for factors with {na} and {nb} components"
                )));
            }
            let entries = k.nonzeros();
            let mut out = FormField::zeros(grid, p + q, n_out)?;
            for pt in 0..grid.n_points() {
                for &(l, i, j, c) in &entries {
                    let ca = a.components_at(pt, i);
                    let cb = b.components_at(pt, j);
                    for &(ka, kb, ko, s) in &pairs {
                        out.add_at(pt, l, ko, c * s * ca[ka] * cb[kb]);
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Exterior derivative with second-order central differences on the periodic
/// grid: `(da) = Σ_μ dx^μ ∧ ∂_μ a`.
pub fn ext_d<S: Scalar>(a: &FormField<S>) -> Result<FormField<S>> {
    let grid = a.grid();
    let d = grid.dim();
    let p = a.degree();
    if p >= d {
        return Err(Error::DegreeOverflow { p, q: 1, d });
    }
    let (bi, bo) = (Basis::new(d, p), Basis::new(d, p + 1));
    // for each input basis element: (axis, output index, sign of dx^μ ∧ dx^I)
    let terms: Vec<Vec<(usize, usize, S)>> = (0..bi.len())
        .map(|k| {
            let m = bi.mask(k);
            (0..d)
                .filter(|&mu| m & (1 << mu) == 0)
                .map(|mu| {
                    let bit = 1u32 << mu;
                    (mu, bo.index(m | bit), disjoint_sign::<S>(bit, m))
                })
                .collect()
        })
        .collect();
    let inv_2h: Vec<S> = grid.spacing().iter().map(|&h| S::one() / (h + h)).collect();
    let mut out = FormField::zeros(grid, p + 1, a.n_comp())?;
    let mut fwd = vec![0; d];
    let mut bwd = vec![0; d];
    for pt in 0..grid.n_points() {
        for mu in 0..d {
            fwd[mu] = grid.shift(pt, mu, true);
            bwd[mu] = grid.shift(pt, mu, false);
        }
        for c in 0..a.n_comp() {
            for (k, list) in terms.iter().enumerate() {
                for &(mu, ko, s) in list {
                    let diff = (a.value(fwd[mu], c, k) - a.value(bwd[mu], c, k)) * inv_2h[mu];
                    out.add_at(pt, c, ko, s * diff);
                }
            }
        }
    }
    Ok(out)
}

/// Hodge star: `(★a)_{ν…} = (1/p!) a^{μ₁…μ_p} ε_{μ₁…μ_p ν…}` with indices
/// raised by the grid metric and `ε_{01…D-1} = +1`.
///
/// Satisfies `★★ = (-1)^{p(D-p)+s}`.
pub fn hodge<S: Scalar>(a: &FormField<S>) -> Result<FormField<S>> {
    let grid = a.grid();
    let d = grid.dim();
    let p = a.degree();
    let (bi, bo) = (Basis::new(d, p), Basis::new(d, d - p));
    let full: u32 = if d == 32 { u32::MAX } else { (1u32 << d) - 1 };
    let map: Vec<(usize, S)> = (0..bi.len())
        .map(|k| {
            let m = bi.mask(k);
            let comp = full & !m;
            let raise = (0..d)
                .filter(|&mu| m & (1 << mu) != 0)
                .fold(S::one(), |acc, mu| acc * grid.metric(mu));
            (bo.index(comp), raise * disjoint_sign::<S>(m, comp))
        })
        .collect();
    let mut out = FormField::zeros(grid, d - p, a.n_comp())?;
    for pt in 0..grid.n_points() {
        for c in 0..a.n_comp() {
            for (k, &(ko, f)) in map.iter().enumerate() {
                out.set(pt, c, ko, f * a.value(pt, c, k));
            }
        }
    }
    Ok(out)
}

/// `(-1)^{p(D-p)+s}`, the eigenvalue of `★★` on `p`-forms.
pub fn double_star_sign<S: Scalar>(p: usize, d: usize, s: usize) -> S {
    sign_of(((p * (d - p)) + s) % 2 == 1)
}
