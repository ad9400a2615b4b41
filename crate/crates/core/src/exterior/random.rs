//! Deterministic smooth periodic test fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::basis::Basis;
use super::form::FormField;
use super::grid::SpacetimeGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest integer wavenumber drawn per axis.
pub const MAX_WAVENUMBER: i64 = 2;

#[derive(Clone, Debug)]
struct Mode {
    k: Vec<i64>,
    amplitude: f64,
    phase: f64,
}

/// A trigonometric polynomial per (algebra index, basis component).
///
/// Modes depend only on the seed and the grid dimension, so the same spec
/// sampled on grids of equal period but different resolution describes the
/// same continuum field.
#[derive(Clone, Debug)]
pub struct SmoothFieldSpec {
    d: usize,
    degree: usize,
    n_comp: usize,
    modes: Vec<Vec<Mode>>,
}

impl SmoothFieldSpec {
    pub fn new(d: usize, degree: usize, n_comp: usize, seed: u64, n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("n_modes must be at least 1".into()));
        }
        if degree > d {
            return Err(Error::DegreeOverflow { p: degree, q: 0, d });
        }
        let n_basis = Basis::new(d, degree).len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..n_comp * n_basis)
            .map(|_| {
                let mut modes: Vec<Mode> = (0..n_modes)
                    .map(|_| {
                        let k = loop {
                            let k: Vec<i64> = (0..d)
                                .map(|_| rng.gen_range(-MAX_WAVENUMBER..=MAX_WAVENUMBER))
                                .collect();
                            if k.iter().any(|&x| x != 0) {
                                break k;
                            }
                        };
                        Mode {
                            k,
                            amplitude: rng.gen_range(0.2..1.0),
                            phase: rng.gen_range(0.0..std::f64::consts::TAU),
                        }
                    })
                    .collect();
                let total: f64 = modes.iter().map(|m| m.amplitude).sum();
                modes.iter_mut().for_each(|m| m.amplitude /= total);
                modes
            })
            .collect();
        Ok(Self {
            d,
            degree,
            n_comp,
            modes,
        })
    }

    /// Value at an integer lattice coordinate (any integers, not only those
    /// inside the grid). Exactly periodic with the grid extents.
    pub fn eval_lattice(&self, shape: &[usize], coords: &[i64], a: usize, k: usize) -> f64 {
        let n_basis = self.modes.len() / self.n_comp;
        self.modes[a * n_basis + k]
            .iter()
            .map(|m| {
                let turns: f64 =
                    m.k.iter()
                        .zip(coords)
                        .zip(shape)
                        .map(|((&kk, &c), &n)| (kk * c).rem_euclid(n as i64) as f64 / n as f64)
                        .sum();
                m.amplitude * (std::f64::consts::TAU * turns + m.phase).cos()
            })
            .sum()
    }

    pub fn sample<S: Scalar>(&self, grid: &SpacetimeGrid<S>, amplitude: S) -> Result<FormField<S>> {
        if grid.dim() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "spec is {}-dimensional, grid is {}-dimensional",
                self.d,
                grid.dim()
            )));
        }
        let mut out = FormField::zeros(grid, self.degree, self.n_comp)?;
        let shape = grid.shape().to_vec();
        for pt in 0..grid.n_points() {
            let coords: Vec<i64> = grid.coords(pt).iter().map(|&c| c as i64).collect();
            for a in 0..self.n_comp {
                for k in 0..out.n_basis() {
                    let v = self.eval_lattice(&shape, &coords, a, k);
                    out.set(pt, a, k, amplitude * S::lit(v));
                }
            }
        }
        Ok(out)
    }
}

/// Truncated-Fourier random field with amplitude at most 1, deterministic per
/// seed.
pub fn random_smooth_field<S: Scalar>(
    grid: &SpacetimeGrid<S>,
    degree: usize,
    n_comp: usize,
    seed: u64,
    n_modes: usize,
) -> Result<FormField<S>> {
    SmoothFieldSpec::new(grid.dim(), degree, n_comp, seed, n_modes)?.sample(grid, S::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Signature;

    fn grid() -> SpacetimeGrid<f64> {
        SpacetimeGrid::new(vec![8, 6, 5], vec![0.5, 0.3, 1.0], Signature::Lorentzian).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let g = grid();
        let a = random_smooth_field(&g, 1, 2, 42, 3).unwrap();
        let b = random_smooth_field(&g, 1, 2, 42, 3).unwrap();
        let c = random_smooth_field(&g, 1, 2, 43, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(random_smooth_field(&grid(), 0, 1, 1, 0).is_err());
    }

    #[test]
    fn bounded_by_one() {
        let f = random_smooth_field(&grid(), 2, 3, 7, 5).unwrap();
        assert!(f.norm_linf() <= 1.0);
        assert!(f.norm_linf() > 0.0);
    }

    #[test]
    fn exactly_periodic_across_the_seam() {
        let spec = SmoothFieldSpec::new(3, 1, 2, 9, 4).unwrap();
        let shape = [8, 6, 5];
        for a in 0..2 {
            for k in 0..3 {
                for (i, j, l) in [(0, 0, 0), (3, 2, 1), (7, 5, 4)] {
                    let base = spec.eval_lattice(&shape, &[i, j, l], a, k);
                    assert_eq!(base, spec.eval_lattice(&shape, &[i + 8, j, l], a, k));
                    assert_eq!(base, spec.eval_lattice(&shape, &[i, j - 6, l], a, k));
                    assert_eq!(base, spec.eval_lattice(&shape, &[i, j, l + 5], a, k));
                }
            }
        }
    }
}
