use std::path::Path;

use serde::Serialize;

use super::basis::{binomial, shuffle_sign, Basis};
use super::grid::{Signature, SpacetimeGrid};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Grid-sampled differential `p`-form carrying `n_comp` algebra components.
///
/// Storage is point-major: `data[(point * n_comp + a) * n_basis + k]` where
/// `k` runs over strictly increasing multi-indices in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct FormField<S> {
    grid: SpacetimeGrid<S>,
    degree: usize,
    n_comp: usize,
    n_basis: usize,
    data: Vec<S>,
}

impl<S: Scalar> FormField<S> {
    pub fn zeros(grid: &SpacetimeGrid<S>, degree: usize, n_comp: usize) -> Result<Self> {
        let d = grid.dim();
        if degree > d {
            return Err(Error::DegreeOverflow { p: degree, q: 0, d });
        }
        if n_comp == 0 {
            return Err(Error::InvalidArgument("n_comp must be positive".into()));
        }
        let n_basis = binomial(d, degree);
        Ok(Self {
            grid: grid.clone(),
            degree,
            n_comp,
            n_basis,
            data: vec![S::zero(); grid.n_points() * n_comp * n_basis],
        })
    }

    /// Fills components from `f(position, algebra_index, multi_index)`.
    pub fn from_fn(
        grid: &SpacetimeGrid<S>,
        degree: usize,
        n_comp: usize,
        mut f: impl FnMut(&[S], usize, &[usize]) -> S,
    ) -> Result<Self> {
        let mut out = Self::zeros(grid, degree, n_comp)?;
        let basis = Basis::new(grid.dim(), degree);
        let multi: Vec<Vec<usize>> = (0..basis.len()).map(|k| basis.indices(k)).collect();
        for pt in 0..grid.n_points() {
            let x = grid.position(pt);
            for a in 0..n_comp {
                for (k, idx) in multi.iter().enumerate() {
                    let v = f(&x, a, idx);
                    out.set(pt, a, k, v);
                }
            }
        }
        Ok(out)
    }

    pub fn from_data(
        grid: &SpacetimeGrid<S>,
        degree: usize,
        n_comp: usize,
        data: Vec<S>,
    ) -> Result<Self> {
        let mut out = Self::zeros(grid, degree, n_comp)?;
        if data.len() != out.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got {}",
                out.data.len(),
                data.len()
            )));
        }
        out.data = data;
        Ok(out)
    }

    pub fn grid(&self) -> &SpacetimeGrid<S> {
        &self.grid
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    /// `binom(D, p)`.
    #[inline]
    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    fn offset(&self, point: usize, a: usize, k: usize) -> usize {
        (point * self.n_comp + a) * self.n_basis + k
    }

    #[inline]
    pub fn value(&self, point: usize, a: usize, k: usize) -> S {
        self.data[self.offset(point, a, k)]
    }

    #[inline]
    pub fn set(&mut self, point: usize, a: usize, k: usize, v: S) {
        let o = self.offset(point, a, k);
        self.data[o] = v;
    }

    #[inline]
    pub(crate) fn add_at(&mut self, point: usize, a: usize, k: usize, v: S) {
        let o = self.offset(point, a, k);
        self.data[o] += v;
    }

    /// All canonical components of algebra index `a` at a point.
    pub fn components_at(&self, point: usize, a: usize) -> &[S] {
        let o = self.offset(point, a, 0);
        &self.data[o..o + self.n_basis]
    }

    /// Canonical index of the multi-index `indices` (must be strictly increasing).
    pub fn basis_index(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.degree || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{indices:?} is not a strictly increasing {}-index",
                self.degree
            )));
        }
        if indices.iter().any(|&i| i >= self.grid.dim()) {
            return Err(Error::InvalidArgument(format!("{indices:?} out of range")));
        }
        let mask = indices.iter().fold(0u32, |m, &i| m | (1 << i));
        Ok(Basis::new(self.grid.dim(), self.degree).index(mask))
    }

    /// Full antisymmetric tensor component `a_{μ₁…μ_p}` for arbitrary indices,
    /// reconstructed from canonical storage.
    pub fn component(&self, point: usize, a: usize, indices: &[usize]) -> S {
        assert_eq!(indices.len(), self.degree, "wrong number of indices");
        let mut sorted = indices.to_vec();
        let mut odd = false;
        // bubble sort, counting swaps
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return S::zero();
        }
        let mask = sorted.iter().fold(0u32, |m, &i| m | (1 << i));
        let k = Basis::new(self.grid.dim(), self.degree).index(mask);
        let v = self.value(point, a, k);
        if odd {
            -v
        } else {
            v
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("forms live on different grids".into()));
        }
        if self.degree != other.degree || self.n_comp != other.n_comp {
            return Err(Error::ShapeMismatch(format!(
                "({}-form, {} comps) vs ({}-form, {} comps)",
                self.degree, self.n_comp, other.degree, other.n_comp
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_map(other, |a, b| a - b))
    }

    fn zip_map(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..self.clone_shape()
        }
    }

    fn clone_shape(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            degree: self.degree,
            n_comp: self.n_comp,
            n_basis: self.n_basis,
            data: Vec::new(),
        }
    }

    pub fn scale(&self, alpha: S) -> Self {
        self.map(|x| x * alpha)
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            data: self.data.iter().map(|&x| f(x)).collect(),
            ..self.clone_shape()
        }
    }

    /// Pointwise linear recombination of algebra components:
    /// `out^l = Σ_a coeffs[(l, a)] self^a`.
    pub fn mix(&self, coeffs: &Mat<S>) -> Result<Self> {
        if coeffs.cols() != self.n_comp {
            return Err(Error::ShapeMismatch(format!(
                "mixing matrix has {} columns for {} components",
                coeffs.cols(),
                self.n_comp
            )));
        }
        let mut out = Self::zeros(&self.grid, self.degree, coeffs.rows())?;
        for pt in 0..self.grid.n_points() {
            for l in 0..coeffs.rows() {
                for a in 0..self.n_comp {
                    let c = coeffs[(l, a)];
                    if c == S::zero() {
                        continue;
                    }
                    for k in 0..self.n_basis {
                        out.add_at(pt, l, k, c * self.value(pt, a, k));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Scalar-valued form holding algebra component `a`.
    pub fn component_field(&self, a: usize) -> Result<Self> {
        if a >= self.n_comp {
            return Err(Error::InvalidArgument(format!(
                "component {a} out of range"
            )));
        }
        let mut out = Self::zeros(&self.grid, self.degree, 1)?;
        for pt in 0..self.grid.n_points() {
            for k in 0..self.n_basis {
                out.set(pt, 0, k, self.value(pt, a, k));
            }
        }
        Ok(out)
    }

    /// Max absolute value over all components and points.
    pub fn norm_linf(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// `sqrt(Σ |v|² ∏h)` over all stored components.
    pub fn norm_l2(&self) -> S {
        let sum: S = self.data.iter().map(|&x| x * x).sum();
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// `norm_linf` restricted to points whose coordinate along `axis` lies in
    /// `[margin, n - margin)`. Used when `axis` is not physically periodic and
    /// the wrapped stencils near the seam carry no information.
    pub fn norm_linf_interior(&self, axis: usize, margin: usize) -> S {
        let n = self.grid.shape()[axis];
        let mut worst = S::zero();
        for pt in 0..self.grid.n_points() {
            let c = self.grid.coord(pt, axis);
            if c < margin || c + margin >= n {
                continue;
            }
            for a in 0..self.n_comp {
                for &v in self.components_at(pt, a) {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }

    /// Writes a structured-text dump: header fields then row-major data in
    /// storage order.
    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        #[derive(Serialize)]
        struct Dump<'a> {
            d: usize,
            shape: &'a [usize],
            h: Vec<f64>,
            signature: Signature,
            degree: usize,
            n_comp: usize,
            layout: &'static str,
            data: Vec<f64>,
        }
        let dump = Dump {
            d: self.grid.dim(),
            shape: self.grid.shape(),
            h: self
                .grid
                .spacing()
                .iter()
                .map(|h| h.to_f64_lossy())
                .collect(),
            signature: self.grid.signature(),
            degree: self.degree,
            n_comp: self.n_comp,
            layout: "point-major, then algebra component, then increasing multi-index",
            data: self.data.iter().map(|v| v.to_f64_lossy()).collect(),
        };
        let text = serde_json::to_string(&dump).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Sign `(-1)^{#(a, b) inversions}`, exposed for wedge/star bookkeeping.
#[inline]
pub(crate) fn sign_of<S: Scalar>(odd: bool) -> S {
    if odd {
        -S::one()
    } else {
        S::one()
    }
}

#[inline]
pub(crate) fn disjoint_sign<S: Scalar>(a: u32, b: u32) -> S {
    sign_of(shuffle_sign(a, b))
}
