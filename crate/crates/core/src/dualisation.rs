//! The doubled symmetry algebra `{T_m, T̃_m}`.
//!
//! Brackets:
//!
//! * `[T_m, T_n] = C^l_{mn} T_l`
//! * `[T_m, T̃_i] = D^l_{mi} T̃_l` with `D_n = -T⁻¹ C_nᵀ T`
//! * `[T̃_i, T̃_j} = 0`, never stored.
//!
//! Dual generators couple to `(D-2)`-form potentials, so their ℤ₂ parity is
//! `D mod 2`.

use crate::error::{Error, Result};
use crate::exterior::{random_smooth_field, wedge, FormField, IndexCombine, SpacetimeGrid};
use crate::lie::{StructureConstants, TraceForm};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::{parity_sign, Scalar};

/// ℤ₂ grading of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(p: usize) -> Self {
        if p % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Structure data of the doubled algebra for a spacetime of dimension `D`.
#[derive(Clone, Debug)]
pub struct DoubledAlgebra<S> {
    sc: StructureConstants<S>,
    t: TraceForm<S>,
    d_tensor: Tensor3<S>,
    d_mats: Vec<Mat<S>>,
    spacetime_dim: usize,
}

impl<S: Scalar> DoubledAlgebra<S> {
    /// Assembles a doubled algebra from explicit `D^l_{mi}` without checking
    /// anything. Intended for hand-built negative controls.
    pub fn from_parts_unchecked(
        sc: StructureConstants<S>,
        t: TraceForm<S>,
        d_tensor: Tensor3<S>,
        spacetime_dim: usize,
    ) -> Result<Self> {
        let g = sc.dim();
        if d_tensor.dims() != [g, g, g] || t.dim() != g {
            return Err(Error::ShapeMismatch(
                "dual constants, trace form and algebra dimension disagree".into(),
            ));
        }
        if spacetime_dim < 2 {
            return Err(Error::InvalidArgument(
                "spacetime dimension must be ≥ 2".into(),
            ));
        }
        let d_mats = (0..g)
            .map(|n| Mat::from_fn(g, g, |l, k| d_tensor[(l, n, k)]))
            .collect();
        Ok(Self {
            sc,
            t,
            d_tensor,
            d_mats,
            spacetime_dim,
        })
    }

    pub fn structure(&self) -> &StructureConstants<S> {
        &self.sc
    }

    pub fn trace_form(&self) -> &TraceForm<S> {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.sc.dim()
    }

    pub fn spacetime_dim(&self) -> usize {
        self.spacetime_dim
    }

    /// `D^l_{mi}` stored at `(l, m, i)`.
    pub fn d_tensor(&self) -> &Tensor3<S> {
        &self.d_tensor
    }

    #[inline]
    pub fn d(&self, l: usize, m: usize, i: usize) -> S {
        self.d_tensor[(l, m, i)]
    }

    /// `(D_n)^l_k = D^l_{nk}`.
    pub fn d_matrix(&self, n: usize) -> &Mat<S> {
        &self.d_mats[n]
    }

    /// Parity of the dual generators: that of the `(D-2)`-form potentials.
    pub fn dual_parity(&self) -> Parity {
        Parity::of_degree(self.spacetime_dim - 2)
    }
}

/// `D_n = -T⁻¹ C_nᵀ T`, with the intertwining relation
/// `T_{kl} D^k_{nm} = C^k_{ln} T_{mk}` verified before returning.
pub fn dual_constants<S: Scalar>(
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
    spacetime_dim: usize,
) -> Result<DoubledAlgebra<S>> {
    let g = sc.dim();
    if t.dim() != g {
        return Err(Error::ShapeMismatch(format!(
            "trace form is {}×{} for an algebra of dimension {g}",
            t.dim(),
            t.dim()
        )));
    }
    let mut d_tensor = Tensor3::zeros(g, g, g);
    for n in 0..g {
        let c_n = sc.ad_matrix(n);
        let d_n = (&(t.inverse() * &c_n.transpose()) * t.matrix()).scale(-S::one());
        for l in 0..g {
            for k in 0..g {
                d_tensor[(l, n, k)] = d_n[(l, k)];
            }
        }
    }
    let da = DoubledAlgebra::from_parts_unchecked(sc.clone(), t.clone(), d_tensor, spacetime_dim)?;
    let residual = verify_intertwining(&da);
    // relative to the size of the inputs so badly scaled trace forms are not
    // rejected for pure roundoff
    let scale = S::one() + t.matrix().max_abs() * sc.tensor().max_abs() * S::from_usize_lossy(g);
    if !(residual < S::roundoff_tol() * scale) {
        return Err(Error::IntertwiningFailure {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(da)
}

/// Max over `(l, n, m)` of `|T_{kl} D^k_{nm} - C^k_{ln} T_{mk}|`.
pub fn verify_intertwining<S: Scalar>(da: &DoubledAlgebra<S>) -> S {
    let g = da.dim();
    let (t, sc) = (da.trace_form(), da.structure());
    let mut worst = S::zero();
    for l in 0..g {
        for n in 0..g {
            for m in 0..g {
                let mut acc = S::zero();
                for k in 0..g {
                    acc += t.get(k, l) * da.d(k, n, m) - sc.get(k, l, n) * t.get(m, k);
                }
                worst = worst.max(acc.abs());
            }
        }
    }
    worst
}

/// Per-class maxima of the graded Jacobi residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradedJacobiReport<S> {
    /// `(T, T, T)`: the Jacobi identity of `C`.
    pub ttt: S,
    /// `(T, T, T̃)`: `[D_m, D_n] - C^l_{mn} D_l`.
    pub tt_dual: S,
    /// `(T, T̃, T̃)`: every term contains `[T̃, T̃}`; zero by construction.
    pub t_dual_dual: S,
    /// `(T̃, T̃, T̃)`: zero by construction.
    pub dual_dual_dual: S,
}

impl<S: Scalar> GradedJacobiReport<S> {
    pub fn max(&self) -> S {
        self.ttt
            .max(self.tt_dual)
            .max(self.t_dual_dual)
            .max(self.dual_dual_dual)
    }
}

pub fn graded_jacobi_check<S: Scalar>(da: &DoubledAlgebra<S>) -> GradedJacobiReport<S> {
    let g = da.dim();
    let sc = da.structure();
    let mut tt_dual = S::zero();
    for m in 0..g {
        for n in 0..g {
            let lhs = da.d_matrix(m).commutator(da.d_matrix(n));
            let mut rhs = Mat::zeros(g, g);
            for l in 0..g {
                let c = sc.get(l, m, n);
                if c != S::zero() {
                    rhs = &rhs + &da.d_matrix(l).scale(c);
                }
            }
            tt_dual = tt_dual.max((&lhs - &rhs).max_abs());
        }
    }
    GradedJacobiReport {
        ttt: sc.residuals().jacobi,
        tt_dual,
        t_dual_dual: S::zero(),
        dual_dual_dual: S::zero(),
    }
}

/// A generator of the doubled algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Original(usize),
    Dual(usize),
}

/// Pseudo-involution: `S T_i = T̃_i`, `S T̃_i = (-1)^D T_i`.
pub fn s_action(gen: Generator, spacetime_dim: usize) -> (Generator, i32) {
    match gen {
        Generator::Original(i) => (Generator::Dual(i), 1),
        Generator::Dual(i) => (
            Generator::Original(i),
            if spacetime_dim % 2 == 0 { 1 } else { -1 },
        ),
    }
}

/// Sign of `S²` on original generators.
pub fn s_squared_sign(spacetime_dim: usize) -> i32 {
    let (once, s1) = s_action(Generator::Original(0), spacetime_dim);
    let (_, s2) = s_action(once, spacetime_dim);
    s1 * s2
}

/// Matrices of the doubled algebra on `R^{n_g + 1}`:
/// `ρ(T_m) = [[D_m, 0], [0, 0]]`, `ρ(T̃_i) = [[0, e_i], [0, 0]]`.
#[derive(Clone, Debug)]
pub struct DoubledRepresentation<S> {
    pub originals: Vec<Mat<S>>,
    pub duals: Vec<Mat<S>>,
}

/// Worst residuals of the three bracket families in [`DoubledRepresentation`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubledRepResiduals<S> {
    pub original_original: S,
    pub original_dual: S,
    pub dual_products: S,
}

pub fn doubled_rep<S: Scalar>(da: &DoubledAlgebra<S>) -> DoubledRepresentation<S> {
    let g = da.dim();
    let originals = (0..g)
        .map(|m| {
            let dm = da.d_matrix(m);
            Mat::from_fn(g + 1, g + 1, |i, j| {
                if i < g && j < g {
                    dm[(i, j)]
                } else {
                    S::zero()
                }
            })
        })
        .collect();
    let duals = (0..g)
        .map(|i| {
            let mut e = Mat::zeros(g + 1, g + 1);
            e[(i, g)] = S::one();
            e
        })
        .collect();
    DoubledRepresentation { originals, duals }
}

impl<S: Scalar> DoubledRepresentation<S> {
    pub fn n_rep(&self) -> usize {
        self.duals[0].rows()
    }

    /// Checks `[ρ(T_m), ρ(T_n)] = C^l_{mn} ρ(T_l)`,
    /// `[ρ(T_m), ρ(T̃_i)] = D^l_{mi} ρ(T̃_l)` and `ρ(T̃_i) ρ(T̃_j) = 0`.
    pub fn residuals(&self, da: &DoubledAlgebra<S>) -> DoubledRepResiduals<S> {
        let g = da.dim();
        let n = self.n_rep();
        let combo = |mats: &[Mat<S>], coeff: &dyn Fn(usize) -> S| {
            let mut acc = Mat::zeros(n, n);
            for (l, m) in mats.iter().enumerate() {
                let c = coeff(l);
                if c != S::zero() {
                    acc = &acc + &m.scale(c);
                }
            }
            acc
        };
        let mut out = DoubledRepResiduals {
            original_original: S::zero(),
            original_dual: S::zero(),
            dual_products: S::zero(),
        };
        for m in 0..g {
            for k in 0..g {
                let lhs = self.originals[m].commutator(&self.originals[k]);
                let rhs = combo(&self.originals, &|l| da.structure().get(l, m, k));
                out.original_original = out.original_original.max((&lhs - &rhs).max_abs());

                let lhs = self.originals[m].commutator(&self.duals[k]);
                let rhs = combo(&self.duals, &|l| da.d(l, m, k));
                out.original_dual = out.original_dual.max((&lhs - &rhs).max_abs());

                let prod = &self.duals[m] * &self.duals[k];
                out.dual_products = out.dual_products.max(prod.max_abs());
            }
        }
        out
    }

    /// `ρ(φ^m T_m + φ̃^i T̃_i)`.
    pub fn combine(&self, originals: &[S], duals: &[S]) -> Mat<S> {
        let n = self.n_rep();
        let mut acc = Mat::zeros(n, n);
        for (c, m) in originals.iter().zip(&self.originals) {
            acc = &acc + &m.scale(*c);
        }
        for (c, m) in duals.iter().zip(&self.duals) {
            acc = &acc + &m.scale(*c);
        }
        acc
    }
}

/// Both sides of the Jacobi cancellation between the two multiplier terms of
/// the differentiated first-order equations:
/// `½ C^k_{ln} C^n_{uv} F^u∧F^v∧A_k` and `C^k_{ln} C^t_{kv} F^n∧F^v∧A_t`.
pub fn jacobi_cancellation_terms<S: Scalar>(
    sc: &StructureConstants<S>,
    f: &FormField<S>,
    a: &FormField<S>,
) -> Result<(FormField<S>, FormField<S>)> {
    let g = sc.dim();
    if f.n_comp() != g || a.n_comp() != g || f.degree() != 1 {
        return Err(Error::ShapeMismatch(
            "expected 1-forms F and multipliers A with n_g components".into(),
        ));
    }
    let ff = wedge(f, f, IndexCombine::Outer)?; // component u * g + v
    let half = S::lit(0.5);
    let mut k1 = Tensor3::zeros(g, g * g, g);
    let mut k2 = Tensor3::zeros(g, g * g, g);
    for l in 0..g {
        for u in 0..g {
            for v in 0..g {
                for k in 0..g {
                    // ½ C^k_{ln} C^n_{uv}, pairing F^u∧F^v with A_k
                    let mut s1 = S::zero();
                    for n in 0..g {
                        s1 += sc.get(k, l, n) * sc.get(n, u, v);
                    }
                    k1[(l, u * g + v, k)] = half * s1;
                    // C^j_{lu} C^k_{jv}, pairing F^u∧F^v with A_k
                    let mut s2 = S::zero();
                    for j in 0..g {
                        s2 += sc.get(j, l, u) * sc.get(k, j, v);
                    }
                    k2[(l, u * g + v, k)] = s2;
                }
            }
        }
    }
    let lhs = wedge(&ff, a, IndexCombine::Contract(&k1))?;
    let rhs = wedge(&ff, a, IndexCombine::Contract(&k2))?;
    Ok((lhs, rhs))
}

/// L∞ of the difference of the two sides on random smooth `F` (1-forms) and
/// `A` ((D-2)-forms) drawn from `seed`.
pub fn jacobi_cancellation_check<S: Scalar>(
    sc: &StructureConstants<S>,
    grid: &SpacetimeGrid<S>,
    seed: u64,
) -> Result<S> {
    let d = grid.dim();
    let g = sc.dim();
    let f = random_smooth_field(grid, 1, g, seed, 3)?;
    let a = random_smooth_field(grid, d - 2, g, seed.wrapping_add(0x9e37_79b9), 3)?;
    let (lhs, rhs) = jacobi_cancellation_terms(sc, &f, &a)?;
    Ok(lhs.try_sub(&rhs)?.norm_linf())
}

/// Sign picked up when `F̃^i T̃_i` (a `(D-1)`-form times a generator of the
/// dual parity) is moved past `F^m T_m`, relative to `F^m∧F̃^i T̃_i T_m`.
///
/// For a consistent grading this is `-1`, so the mixed terms of `G″∧G″`
/// assemble into the commutator `[T_m, T̃_i]`.
pub fn mixed_ordering_sign<S: Scalar>(da: &DoubledAlgebra<S>) -> S {
    let d = da.spacetime_dim();
    // T̃ moves past the 1-form F, then the (D-1)-form F̃ moves past F.
    parity_sign::<S>(da.dual_parity().bit() + (d - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::Signature;
    use crate::lie::{adjoint_rep, named_algebra, trace_form, validate_structure};

    fn killing(name: &str) -> (StructureConstants<f64>, TraceForm<f64>) {
        let (sc, _) = named_algebra::<f64>(name).unwrap();
        let t = trace_form(&adjoint_rep(&sc)).unwrap();
        (sc, t)
    }

    /// `D_n = -T⁻¹ C_nᵀ T` evaluated with plain nested loops.
    fn oracle_d(sc: &StructureConstants<f64>, t: &Mat<f64>) -> Vec<Mat<f64>> {
        let g = sc.dim();
        let t_inv = t.inverse().unwrap();
        (0..g)
            .map(|n| {
                Mat::from_fn(g, g, |l, k| {
                    let mut s = 0.0;
                    for a in 0..g {
                        for b in 0..g {
                            // (C_nᵀ)_{ab} = C^b_{na}
                            s += t_inv[(l, a)] * sc.get(b, n, a) * t[(b, k)];
                        }
                    }
                    -s
                })
            })
            .collect()
    }

    #[test]
    fn abelian_dual_constants_vanish() {
        let (sc, _) = named_algebra::<f64>("abelian(3)").unwrap();
        let t = TraceForm::from_matrix(&Mat::diag(&[1.0, 2.0, -3.0])).unwrap();
        let da = dual_constants(&sc, &t, 3).unwrap();
        assert_eq!(da.d_tensor().max_abs(), 0.0);
        assert_eq!(verify_intertwining(&da), 0.0);
    }

    #[test]
    fn su2_killing_gives_d_equal_c() {
        let (sc, t) = killing("su2");
        let da = dual_constants(&sc, &t, 4).unwrap();
        let oracle = oracle_d(&sc, t.matrix());
        for n in 0..3 {
            assert!((da.d_matrix(n) - &sc.ad_matrix(n)).max_abs() < 1e-14);
            assert!((da.d_matrix(n) - &oracle[n]).max_abs() < 1e-14);
        }
    }

    #[test]
    fn su2_skewed_form_differs_but_intertwines() {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let t = TraceForm::from_matrix(&Mat::diag(&[1.0, 1.0, 2.0])).unwrap();
        let da = dual_constants(&sc, &t, 3).unwrap();
        let diff: f64 = (0..3)
            .map(|n| (da.d_matrix(n) - &sc.ad_matrix(n)).max_abs())
            .fold(0.0, f64::max);
        assert!(diff > 0.1);
        assert!(verify_intertwining(&da) < 1e-12);
        let oracle = oracle_d(&sc, t.matrix());
        for n in 0..3 {
            assert!((da.d_matrix(n) - &oracle[n]).max_abs() < 1e-14);
        }
    }

    #[test]
    fn perturbation_shows_up_in_intertwining() {
        let (sc, t) = killing("su2");
        let da = dual_constants(&sc, &t, 3).unwrap();
        let mut d = da.d_tensor().clone();
        d[(0, 1, 2)] += 1e-3;
        let bad = DoubledAlgebra::from_parts_unchecked(sc, t, d, 3).unwrap();
        // T = -2I: the perturbation of D^0_{12} enters once, scaled by |T_{00}|
        let r = verify_intertwining(&bad);
        assert!((r - 2e-3).abs() < 1e-12, "{r}");
    }

    #[test]
    fn graded_jacobi_for_killing_dualisations() {
        for name in ["su2", "sl2r", "so3"] {
            let (sc, t) = killing(name);
            let da = dual_constants(&sc, &t, 3).unwrap();
            let r = graded_jacobi_check(&da);
            assert!(r.max() < 1e-12, "{name}: {r:?}");
            assert_eq!(r.t_dual_dual, 0.0);
        }
    }

    #[test]
    fn hand_built_d_breaks_closure() {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let t = TraceForm::from_matrix(&Mat::diag(&[1.0, 1.0, 2.0])).unwrap();
        // D_n = C_n closes on its own, so scale one matrix to break it
        let mut d = sc.tensor().clone();
        for l in 0..3 {
            for k in 0..3 {
                d[(l, 2, k)] *= 2.0;
            }
        }
        let bad = DoubledAlgebra::from_parts_unchecked(sc, t, d, 3).unwrap();
        assert!(graded_jacobi_check(&bad).tt_dual > 0.5);
        assert!(verify_intertwining(&bad) > 0.5);
    }

    #[test]
    fn s_action_signs() {
        assert_eq!(s_action(Generator::Original(2), 3), (Generator::Dual(2), 1));
        assert_eq!(
            s_action(Generator::Dual(1), 3),
            (Generator::Original(1), -1)
        );
        assert_eq!(s_action(Generator::Dual(1), 4), (Generator::Original(1), 1));
        assert_eq!(s_squared_sign(2), 1);
        assert_eq!(s_squared_sign(3), -1);
        assert_eq!(s_squared_sign(4), 1);
    }

    #[test]
    fn doubled_rep_brackets() {
        let (sc, t) = killing("su2");
        let da = dual_constants(&sc, &t, 3).unwrap();
        let rep = doubled_rep(&da);
        assert_eq!(rep.n_rep(), 4);
        let r = rep.residuals(&da);
        assert!(r.original_original < 1e-13);
        assert!(r.original_dual < 1e-13);
        assert_eq!(r.dual_products, 0.0);
    }

    #[test]
    fn abelian_doubled_rep() {
        let (sc, _) = named_algebra::<f64>("abelian(2)").unwrap();
        let t = TraceForm::from_matrix(&Mat::identity(2)).unwrap();
        let rep = doubled_rep(&dual_constants(&sc, &t, 2).unwrap());
        assert!(rep.originals.iter().all(|m| m.max_abs() == 0.0));
        for m in &rep.duals {
            for i in 0..3 {
                for j in 0..=i {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn degenerate_trace_form_cannot_be_built() {
        let (sc, rep) = named_algebra::<f64>("heisenberg3").unwrap();
        assert!(matches!(
            trace_form(&rep),
            Err(Error::DegenerateTraceForm { .. })
        ));
        let _ = sc;
    }

    #[test]
    fn jacobi_cancellation_examples() {
        let grid = SpacetimeGrid::cubic(3, 6, 1.0, Signature::Lorentzian).unwrap();
        let (ab, _) = named_algebra::<f64>("abelian(3)").unwrap();
        assert_eq!(jacobi_cancellation_check(&ab, &grid, 1).unwrap(), 0.0);
        let (su2, _) = named_algebra::<f64>("su2").unwrap();
        assert!(jacobi_cancellation_check(&su2, &grid, 1).unwrap() < 1e-13);

        // [T0,T1] = T2 + T0 keeps antisymmetry but breaks Jacobi
        let mut broken = su2.tensor().clone();
        broken[(0, 0, 1)] = 1.0;
        broken[(0, 1, 0)] = -1.0;
        assert!(validate_structure(broken.clone()).is_err());
        let broken = StructureConstants::unchecked(broken).unwrap();
        assert!(jacobi_cancellation_check(&broken, &grid, 1).unwrap() > 0.05);
    }

    #[test]
    fn mixed_terms_form_a_commutator() {
        let (sc, t) = killing("su2");
        for d in 2..=5 {
            let da = dual_constants(&sc, &t, d).unwrap();
            assert_eq!(mixed_ordering_sign(&da), -1.0, "D = {d}");
        }
    }
}
