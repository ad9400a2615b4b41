//! Exponential parametrization `g = exp(φ^i T_i)`.
//!
//! The Noether current `g⁻¹dg = W^m_n dφ^n T_m` is assembled from
//! `M^n_m = C^n_{lm} φ^l` and `W = (I - e^{-M}) M⁻¹`. Since `M(φ) φ = 0`, `M`
//! is never invertible and `W` is evaluated through its everywhere-convergent
//! series `Σ_k (-1)^k M^k / (k+1)!`.

use crate::error::{Error, Result};
use crate::exterior::{ext_d, wedge, FormField, IndexCombine};
use crate::lie::{Representation, StructureConstants};
use crate::linalg::{Mat, Tensor3};
use crate::scalar::Scalar;

/// Default bound on `‖φ‖∞` accepted by [`ScalarField::new`].
pub const DEFAULT_AMPLITUDE_CAP: f64 = 10.0;

/// Largest `‖M‖∞` for which the W series is summed.
pub const W_SERIES_NORM_CAP: f64 = 30.0;

/// Relative truncation threshold of the W series.
pub const W_SERIES_TOL: f64 = 1e-15;

const MAX_SERIES_TERMS: usize = 400;

/// Scalars `φ^i(x)`: a 0-form with one component per generator.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<S> {
    field: FormField<S>,
}

impl<S: Scalar> ScalarField<S> {
    pub fn new(field: FormField<S>) -> Result<Self> {
        Self::with_cap(field, S::lit(DEFAULT_AMPLITUDE_CAP))
    }

    pub fn with_cap(field: FormField<S>, cap: S) -> Result<Self> {
        if field.degree() != 0 {
            return Err(Error::InvalidArgument(format!(
                "scalar field must be a 0-form, got degree {}",
                field.degree()
            )));
        }
        if field.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "scalar field has non-finite values".into(),
            ));
        }
        let amp = field.norm_linf();
        if amp > cap {
            return Err(Error::InvalidArgument(format!(
                "‖φ‖∞ = {amp} exceeds the amplitude cap {cap}"
            )));
        }
        Ok(Self { field })
    }

    pub fn field(&self) -> &FormField<S> {
        &self.field
    }

    pub fn n_g(&self) -> usize {
        self.field.n_comp()
    }

    /// `φ^i` at one grid point.
    pub fn at(&self, point: usize) -> Vec<S> {
        (0..self.n_g())
            .map(|i| self.field.value(point, i, 0))
            .collect()
    }
}

/// `M^n_m = C^n_{lm} φ^l`.
pub fn build_m<S: Scalar>(phi: &[S], sc: &StructureConstants<S>) -> Mat<S> {
    let g = sc.dim();
    assert_eq!(phi.len(), g, "φ has the wrong number of components");
    let mut m = Mat::zeros(g, g);
    for (n, l, mm, c) in sc.tensor().nonzeros() {
        m[(n, mm)] += c * phi[l];
    }
    m
}

/// `W = Σ_k (-1)^k M^k / (k+1)!`, truncated once the next term falls below
/// `1e-15·(1 + ‖partial sum‖)`.
///
/// Alternating cancellation costs roughly `‖M‖ / ln 10` digits, which is why
/// amplitudes are capped well below [`W_SERIES_NORM_CAP`] in practice.
pub fn w_matrix<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>> {
    let norm = m.norm_inf();
    if !(norm <= S::lit(W_SERIES_NORM_CAP)) {
        return Err(Error::SeriesDivergence {
            norm: norm.to_f64_lossy(),
            cap: W_SERIES_NORM_CAP,
        });
    }
    let n = m.rows();
    let tol = S::lit(W_SERIES_TOL);
    let mut sum = Mat::identity(n);
    let mut term = Mat::identity(n);
    for k in 1..MAX_SERIES_TERMS {
        // term_k = -term_{k-1} M / (k+1)
        term = (&term * m).scale(-S::one() / S::from_usize_lossy(k + 1));
        sum = &sum + &term;
        if term.norm_inf() < tol * (S::one() + sum.norm_inf()) {
            break;
        }
    }
    Ok(sum)
}

/// Directional derivative `(∂_ε W(M + ε Ṁ))|₀ · v`, by differentiating the
/// series term by term.
pub fn w_derivative_apply<S: Scalar>(m: &Mat<S>, m_dot: &Mat<S>, v: &[S]) -> Result<Vec<S>> {
    let norm = m.norm_inf();
    if !(norm <= S::lit(W_SERIES_NORM_CAP)) {
        return Err(Error::SeriesDivergence {
            norm: norm.to_f64_lossy(),
            cap: W_SERIES_NORM_CAP,
        });
    }
    let n = v.len();
    let norm_dot = m_dot.norm_inf();
    let norm_v = v.iter().fold(S::zero(), |a, x| a.max(x.abs()));
    let tol = S::lit(W_SERIES_TOL);
    // p_k = M^k v, q_k = ∂_ε (M + εṀ)^k v
    let mut p = v.to_vec();
    let mut q = vec![S::zero(); n];
    let mut sum = vec![S::zero(); n];
    let mut coeff = S::one();
    let mut bound = norm_dot * norm_v;
    for k in 1..MAX_SERIES_TERMS {
        let mq = m.mat_vec(&q);
        let dp = m_dot.mat_vec(&p);
        q = mq.iter().zip(&dp).map(|(&a, &b)| a + b).collect();
        p = m.mat_vec(&p);
        coeff = -coeff / S::from_usize_lossy(k + 1);
        for (s, &x) in sum.iter_mut().zip(&q) {
            *s += coeff * x;
        }
        // ‖q_k‖ ≤ k ‖Ṁ‖ ‖M‖^{k-1} ‖v‖
        let scale = sum.iter().fold(S::zero(), |a, x| a.max(x.abs()));
        if coeff.abs() * bound * S::from_usize_lossy(k) < tol * (S::one() + scale) && k > 1 {
            break;
        }
        bound = bound * norm;
    }
    Ok(sum)
}

/// `F^m = W^m_n(φ) dφ^n`, a 1-form with `n_g` components.
pub fn field_strengths<S: Scalar>(
    phi: &ScalarField<S>,
    sc: &StructureConstants<S>,
) -> Result<FormField<S>> {
    let g = sc.dim();
    if phi.n_g() != g {
        return Err(Error::ShapeMismatch(format!(
            "φ has {} components, algebra dimension is {g}",
            phi.n_g()
        )));
    }
    let dphi = ext_d(phi.field())?;
    let grid = dphi.grid().clone();
    let d = grid.dim();
    let mut f = FormField::zeros(&grid, 1, g)?;
    for pt in 0..grid.n_points() {
        let w = w_matrix(&build_m(&phi.at(pt), sc))?;
        for mu in 0..d {
            let column: Vec<S> = (0..g).map(|n| dphi.value(pt, n, mu)).collect();
            let fm = w.mat_vec(&column);
            for (m, v) in fm.into_iter().enumerate() {
                f.set(pt, m, mu, v);
            }
        }
    }
    Ok(f)
}

/// `g = exp(φ^i R_i)`.
pub fn exp_map<S: Scalar>(phi: &[S], rep: &Representation<S>) -> Mat<S> {
    rep.combine(phi).expm()
}

/// `g⁻¹ dg` computed from the group element itself: central differences of
/// `g` at neighbouring points, left-multiplied by `g⁻¹ = exp(-φ^i R_i)`.
///
/// The result is a matrix-valued 1-form stored with `N²` components in
/// row-major order.
pub fn noether_current_direct<S: Scalar>(
    phi: &ScalarField<S>,
    rep: &Representation<S>,
) -> Result<FormField<S>> {
    if rep.n_generators() != phi.n_g() {
        return Err(Error::ShapeMismatch(
            "representation and scalar field disagree on the algebra dimension".into(),
        ));
    }
    let grid = phi.field().grid().clone();
    let n = rep.n_rep();
    let group: Vec<Mat<S>> = (0..grid.n_points())
        .map(|pt| exp_map(&phi.at(pt), rep))
        .collect();
    let mut out = FormField::zeros(&grid, 1, n * n)?;
    for pt in 0..grid.n_points() {
        let minus: Vec<S> = phi.at(pt).iter().map(|&x| -x).collect();
        let g_inv = exp_map(&minus, rep);
        for mu in 0..grid.dim() {
            let inv_2h = S::one() / (grid.spacing()[mu] + grid.spacing()[mu]);
            let dg = (&group[grid.shift(pt, mu, true)] - &group[grid.shift(pt, mu, false)])
                .scale(inv_2h);
            let cur = &g_inv * &dg;
            for (e, &v) in cur.as_slice().iter().enumerate() {
                out.set(pt, e, mu, v);
            }
        }
    }
    Ok(out)
}

/// `F^m R_m` as a matrix-valued form (same layout as
/// [`noether_current_direct`]).
pub fn current_from_strengths<S: Scalar>(
    f: &FormField<S>,
    rep: &Representation<S>,
) -> Result<FormField<S>> {
    if f.n_comp() != rep.n_generators() {
        return Err(Error::ShapeMismatch(
            "field strengths and representation disagree on the algebra dimension".into(),
        ));
    }
    let n = rep.n_rep();
    let coeffs = Mat::from_fn(n * n, rep.n_generators(), |e, m| rep.mat(m).as_slice()[e]);
    f.mix(&coeffs)
}

/// `dG + G∧G` for a matrix-valued 1-form `G` stored with `N²` components.
pub fn matrix_bianchi_residual<S: Scalar>(
    current: &FormField<S>,
    n: usize,
) -> Result<FormField<S>> {
    if current.n_comp() != n * n || current.degree() != 1 {
        return Err(Error::ShapeMismatch(
            "expected a matrix-valued 1-form".into(),
        ));
    }
    // (G∧G)_{ij} = G_{ik} ∧ G_{kj}
    let mut product = Tensor3::zeros(n * n, n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                product[(i * n + j, i * n + k, k * n + j)] = S::one();
            }
        }
    }
    let gg = wedge(current, current, IndexCombine::Contract(&product))?;
    ext_d(current)?.try_add(&gg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{Signature, SpacetimeGrid};
    use crate::lie::named_algebra;

    #[test]
    fn abelian_m_is_zero() {
        let (sc, _) = named_algebra::<f64>("abelian(3)").unwrap();
        assert_eq!(build_m(&[1.0, -2.0, 0.5], &sc).max_abs(), 0.0);
    }

    #[test]
    fn heisenberg_m_entries() {
        let (sc, _) = named_algebra::<f64>("heisenberg3").unwrap();
        let (a, b, c) = (0.7, -1.3, 2.1);
        let m = build_m(&[a, b, c], &sc);
        let mut expected = Mat::zeros(3, 3);
        expected[(2, 1)] = a;
        expected[(2, 0)] = -b;
        assert_eq!(m, expected);
    }

    #[test]
    fn su2_m_is_rotation_generator() {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let theta = 0.9;
        assert_eq!(
            build_m(&[0.0, 0.0, theta], &sc),
            sc.ad_matrix(2).scale(theta)
        );
    }

    #[test]
    fn w_of_zero_is_identity() {
        assert_eq!(
            w_matrix(&Mat::<f64>::zeros(3, 3)).unwrap(),
            Mat::identity(3)
        );
    }

    #[test]
    fn heisenberg_w_truncates() {
        let (sc, _) = named_algebra::<f64>("heisenberg3").unwrap();
        let m = build_m(&[0.4, -1.1, 3.0], &sc);
        assert_eq!((&m * &m).max_abs(), 0.0);
        let w = w_matrix(&m).unwrap();
        let closed = &Mat::identity(3) - &m.scale(0.5);
        assert!((&w - &closed).max_abs() <= 1e-15);
        // brute-force 50-term summation
        let mut brute = Mat::zeros(3, 3);
        let mut power = Mat::identity(3);
        let mut fact = 1.0;
        for k in 0..50 {
            fact *= (k + 1) as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            brute = &brute + &power.scale(sign / fact);
            power = &power * &m;
        }
        assert!((&w - &brute).max_abs() <= 1e-15);
    }

    #[test]
    fn series_cap_is_enforced() {
        let m = Mat::<f64>::identity(2).scale(31.0);
        assert!(matches!(w_matrix(&m), Err(Error::SeriesDivergence { .. })));
    }

    #[test]
    fn w_fixes_phi() {
        let (sc, _) = named_algebra::<f64>("sl2r").unwrap();
        let phi = [0.8, -1.7, 2.4];
        let w = w_matrix(&build_m(&phi, &sc)).unwrap();
        let wphi = w.mat_vec(&phi);
        for (a, b) in wphi.iter().zip(&phi) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn w_derivative_matches_finite_difference() {
        let (sc, _) = named_algebra::<f64>("su2").unwrap();
        let phi = [0.3, -0.5, 0.9];
        let dir = [0.7, 0.2, -0.4];
        let v = [1.0, 2.0, -0.5];
        let m = build_m(&phi, &sc);
        let md = build_m(&dir, &sc);
        let analytic = w_derivative_apply(&m, &md, &v).unwrap();
        let eps = 1e-5;
        let shifted = |s: f64| {
            let p: Vec<f64> = phi.iter().zip(&dir).map(|(a, b)| a + s * b).collect();
            w_matrix(&build_m(&p, &sc)).unwrap().mat_vec(&v)
        };
        let (plus, minus) = (shifted(eps), shifted(-eps));
        for i in 0..3 {
            let fd = (plus[i] - minus[i]) / (2.0 * eps);
            assert!(
                (fd - analytic[i]).abs() < 1e-9,
                "{i}: {fd} vs {}",
                analytic[i]
            );
        }
    }

    #[test]
    fn exp_map_identity_and_inverse() {
        let (_, rep) = named_algebra::<f64>("su2").unwrap();
        assert_eq!(exp_map(&[0.0; 3], &rep), Mat::identity(4));
        let phi = [1.2, -0.4, 2.5];
        let minus: Vec<f64> = phi.iter().map(|x| -x).collect();
        let prod = &exp_map(&phi, &rep) * &exp_map(&minus, &rep);
        assert!((&prod - &Mat::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn so3_quarter_turn_matches_rodrigues() {
        let (_, rep) = named_algebra::<f64>("so3").unwrap();
        let r = exp_map(&[0.0, 0.0, std::f64::consts::FRAC_PI_2], &rep);
        // rotation by π/2 about axis 3: R = I + sinθ K + (1 - cosθ) K², K = L_3
        let k = rep.mat(2);
        let rodrigues = &(&Mat::identity(3) + k) + &(k * k);
        assert!((&r - &rodrigues).max_abs() < 1e-14);
    }

    #[test]
    fn constant_phi_has_zero_current() {
        let (_, rep) = named_algebra::<f64>("su2").unwrap();
        let grid = SpacetimeGrid::cubic(2, 8, 1.0, Signature::Lorentzian).unwrap();
        let f = FormField::from_fn(&grid, 0, 3, |_, a, _| 0.3 * (a as f64 + 1.0)).unwrap();
        let cur = noether_current_direct(&ScalarField::new(f).unwrap(), &rep).unwrap();
        assert_eq!(cur.norm_linf(), 0.0);
    }

    #[test]
    fn amplitude_cap() {
        let grid = SpacetimeGrid::cubic(2, 4, 1.0, Signature::Lorentzian).unwrap();
        let f = FormField::from_fn(&grid, 0, 1, |_, _, _| 11.0).unwrap();
        assert!(ScalarField::new(f.clone()).is_err());
        assert!(ScalarField::with_cap(f, 20.0).is_ok());
    }
}
