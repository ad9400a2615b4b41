use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported spacetime dimension (basis masks are `u32`, lookup
/// tables have `2^D` slots).
pub const MAX_DIM: usize = 10;

/// Smallest number of points per axis.
pub const MIN_EXTENT: usize = 4;

/// Metric signature. Lorentzian is `diag(-1, +1, …, +1)` with `s = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    #[default]
    Lorentzian,
    Euclidean,
}

impl Signature {
    /// Number of negative metric eigenvalues.
    pub fn s(self) -> usize {
        match self {
            Signature::Lorentzian => 1,
            Signature::Euclidean => 0,
        }
    }
}

/// Periodic uniform grid over flat `D`-dimensional spacetime.
///
/// Points are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeGrid<S> {
    shape: Vec<usize>,
    spacing: Vec<S>,
    signature: Signature,
    strides: Vec<usize>,
    n_points: usize,
}

impl<S: Scalar> SpacetimeGrid<S> {
    pub fn new(shape: Vec<usize>, spacing: Vec<S>, signature: Signature) -> Result<Self> {
        let d = shape.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::InvalidGrid(format!(
                "dimension {d} outside 2..={MAX_DIM}"
            )));
        }
        if spacing.len() != d {
            return Err(Error::InvalidGrid(format!(
                "{} spacings for {d} axes",
                spacing.len()
            )));
        }
        if let Some(n) = shape.iter().find(|&&n| n < MIN_EXTENT) {
            return Err(Error::InvalidGrid(format!(
                "extent {n} below the minimum of {MIN_EXTENT}"
            )));
        }
        if spacing.iter().any(|h| !(*h > S::zero()) || !h.is_finite()) {
            return Err(Error::InvalidGrid("spacings must be positive".into()));
        }
        let mut strides = vec![1; d];
        for mu in (0..d - 1).rev() {
            strides[mu] = strides[mu + 1] * shape[mu + 1];
        }
        let n_points = shape.iter().product();
        Ok(Self {
            shape,
            spacing,
            signature,
            strides,
            n_points,
        })
    }

    /// `d` axes of `n` points each over period `length`.
    pub fn cubic(d: usize, n: usize, length: S, signature: Signature) -> Result<Self> {
        let h = length / S::from_usize_lossy(n);
        Self::new(vec![n; d], vec![h; d], signature)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[S] {
        &self.spacing
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Period along axis `mu`.
    pub fn length(&self, mu: usize) -> S {
        self.spacing[mu] * S::from_usize_lossy(self.shape[mu])
    }

    /// Diagonal metric entry `η_{μμ}` (equal to its inverse).
    #[inline]
    pub fn metric(&self, mu: usize) -> S {
        if mu == 0 && self.signature == Signature::Lorentzian {
            -S::one()
        } else {
            S::one()
        }
    }

    /// Product of the spacings.
    pub fn cell_volume(&self) -> S {
        self.spacing.iter().fold(S::one(), |acc, &h| acc * h)
    }

    #[inline]
    pub fn coord(&self, point: usize, mu: usize) -> usize {
        (point / self.strides[mu]) % self.shape[mu]
    }

    pub fn coords(&self, point: usize) -> Vec<usize> {
        (0..self.dim()).map(|mu| self.coord(point, mu)).collect()
    }

    pub fn position(&self, point: usize) -> Vec<S> {
        (0..self.dim())
            .map(|mu| S::from_usize_lossy(self.coord(point, mu)) * self.spacing[mu])
            .collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .zip(&self.shape)
            .map(|((&c, &s), &n)| (c % n) * s)
            .sum()
    }

    /// Neighbour of `point` one step forward (`+1`) or backward (`-1`) along
    /// `mu`, wrapping periodically.
    #[inline]
    pub fn shift(&self, point: usize, mu: usize, forward: bool) -> usize {
        let n = self.shape[mu];
        let c = self.coord(point, mu);
        let stride = self.strides[mu];
        if forward {
            if c + 1 == n {
                point - c * stride
            } else {
                point + stride
            }
        } else if c == 0 {
            point + (n - 1) * stride
        } else {
            point - stride
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_extents_and_bad_spacing() {
        assert!(SpacetimeGrid::new(vec![3, 8], vec![1.0, 1.0], Signature::Lorentzian).is_err());
        assert!(SpacetimeGrid::new(vec![8, 8], vec![1.0, 0.0], Signature::Lorentzian).is_err());
        assert!(SpacetimeGrid::new(vec![8], vec![1.0], Signature::Lorentzian).is_err());
    }

    #[test]
    fn shift_wraps() {
        let g = SpacetimeGrid::new(vec![4, 5], vec![1.0, 1.0], Signature::Euclidean).unwrap();
        let p = g.index(&[3, 4]);
        assert_eq!(g.coords(g.shift(p, 0, true)), vec![0, 4]);
        assert_eq!(g.coords(g.shift(p, 1, true)), vec![3, 0]);
        let q = g.index(&[0, 0]);
        assert_eq!(g.coords(g.shift(q, 1, false)), vec![0, 4]);
        assert_eq!(g.coords(g.shift(q, 0, false)), vec![3, 0]);
    }

    #[test]
    fn metric_signs() {
        let g = SpacetimeGrid::<f64>::cubic(3, 4, 1.0, Signature::Lorentzian).unwrap();
        assert_eq!((g.metric(0), g.metric(1), g.metric(2)), (-1.0, 1.0, 1.0));
        let e = SpacetimeGrid::<f64>::cubic(3, 4, 1.0, Signature::Euclidean).unwrap();
        assert_eq!(e.metric(0), 1.0);
    }
}
