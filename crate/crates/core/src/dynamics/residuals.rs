use super::{DoubledCurrent, DualPotentialField, MultiplierField};
use crate::dualisation::{doubled_rep, DoubledAlgebra};
use crate::error::{Error, Result};
use crate::exterior::{ext_d, hodge, wedge, FormField, IndexCombine};
use crate::lie::{StructureConstants, TraceForm};
use crate::linalg::{Mat, Tensor3};
use crate::parametrization::{exp_map, ScalarField};
use crate::scalar::{parity_sign, Scalar};

fn check_strengths<S: Scalar>(f: &FormField<S>, g: usize) -> Result<()> {
    if f.degree() != 1 || f.n_comp() != g {
        return Err(Error::ShapeMismatch(format!(
            "field strengths must be a 1-form with {g} components, got degree {} with {}",
            f.degree(),
            f.n_comp()
        )));
    }
    Ok(())
}

/// `dF^l + ½ C^l_{mn} F^m∧F^n`.
pub fn bianchi_residual<S: Scalar>(
    f: &FormField<S>,
    sc: &StructureConstants<S>,
) -> Result<FormField<S>> {
    check_strengths(f, sc.dim())?;
    let half = sc.tensor().map(|c| c * S::lit(0.5));
    let ff = wedge(f, f, IndexCombine::Contract(&half))?;
    ext_d(f)?.try_add(&ff)
}

/// `K(l, n, m) = C^k_{ln} T_{mk}`.
fn ct_tensor<S: Scalar>(sc: &StructureConstants<S>, t: &TraceForm<S>) -> Tensor3<S> {
    let g = sc.dim();
    Tensor3::from_fn(g, g, g, |l, n, m| {
        (0..g).map(|k| sc.get(k, l, n) * t.get(m, k)).sum()
    })
}

/// The two terms of the second-order equation,
/// `d(T_{ml} ★F^m)` and `C^k_{ln} T_{mk} F^n∧★F^m`.
pub fn second_order_terms<S: Scalar>(
    f: &FormField<S>,
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
) -> Result<(FormField<S>, FormField<S>)> {
    check_strengths(f, sc.dim())?;
    let star = hodge(f)?;
    let kinetic = ext_d(&star.mix(t.matrix())?)?;
    let k = ct_tensor(sc, t);
    let source = wedge(f, &star, IndexCombine::Contract(&k))?;
    Ok((kinetic, source))
}

/// `d(T_{ml} ★F^m) + C^k_{ln} T_{mk} F^n∧★F^m`, a `D`-form per `l`.
pub fn second_order_residual<S: Scalar>(
    f: &FormField<S>,
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
) -> Result<FormField<S>> {
    let (kinetic, source) = second_order_terms(f, sc, t)?;
    kinetic.try_add(&source)
}

/// `(-1)^D T_{ml} ★F^m + dA_l + C^k_{ln} F^n∧A_k`, a `(D-1)`-form per `l`.
pub fn first_order_residual<S: Scalar>(
    f: &FormField<S>,
    a: &MultiplierField<S>,
    sc: &StructureConstants<S>,
    t: &TraceForm<S>,
) -> Result<FormField<S>> {
    let g = sc.dim();
    check_strengths(f, g)?;
    let a = a.field();
    if a.n_comp() != g {
        return Err(Error::ShapeMismatch(
            "multiplier has the wrong number of components".into(),
        ));
    }
    let d = f.grid().dim();
    let star_t = hodge(f)?.mix(t.matrix())?.scale(parity_sign::<S>(d));
    // K(l, n, k) = C^k_{ln}
    let k = Tensor3::from_fn(g, g, g, |l, n, k| sc.get(k, l, n));
    let fa = wedge(f, a, IndexCombine::Contract(&k))?;
    star_t.try_add(&ext_d(a)?)?.try_add(&fa)
}

/// On-shell doubled current: `F^m T_m + (-1)^D ★F^i T̃_i`.
pub fn doubled_current<S: Scalar>(f: &FormField<S>, d_dim: usize) -> Result<DoubledCurrent<S>> {
    if f.degree() != 1 {
        return Err(Error::ShapeMismatch(
            "field strengths must be a 1-form".into(),
        ));
    }
    if f.grid().dim() != d_dim {
        return Err(Error::ShapeMismatch(format!(
            "field lives in D = {}, requested D = {d_dim}",
            f.grid().dim()
        )));
    }
    Ok(DoubledCurrent {
        t_part: f.clone(),
        dual_part: hodge(f)?.scale(parity_sign::<S>(d_dim)),
    })
}

/// Coefficients of `T_l` and `T̃_l` in `dG″ + G″∧G″`.
///
/// The mixed products combine into `F^m∧F̃^i [T_m, T̃_i]`, which gives
/// `dF̃^l + D^l_{mi} F^m∧F̃^i` on the dual side. Products of two dual
/// generators vanish, so no `F̃∧F̃` term survives, also in `D = 2` where it
/// would otherwise be a 2-form.
pub fn cartan_maurer_residual<S: Scalar>(
    dc: &DoubledCurrent<S>,
    da: &DoubledAlgebra<S>,
) -> Result<(FormField<S>, FormField<S>)> {
    let g = da.dim();
    check_strengths(&dc.t_part, g)?;
    if dc.dual_part.n_comp() != g || dc.dual_part.degree() + 1 != da.spacetime_dim() {
        return Err(Error::ShapeMismatch(
            "dual part must be a (D-1)-form with n_g components".into(),
        ));
    }
    let t_res = bianchi_residual(&dc.t_part, da.structure())?;
    let mixed = wedge(
        &dc.t_part,
        &dc.dual_part,
        IndexCombine::Contract(da.d_tensor()),
    )?;
    let dual_res = ext_d(&dc.dual_part)?.try_add(&mixed)?;
    Ok((t_res, dual_res))
}

/// `‖(-1)^D T_{kl} dual_res^k - second_order_residual_l‖∞` on the doubled
/// current built from `f`.
pub fn chain_identity_mismatch<S: Scalar>(f: &FormField<S>, da: &DoubledAlgebra<S>) -> Result<S> {
    let d = da.spacetime_dim();
    let dc = doubled_current(f, d)?;
    let (_, dual_res) = cartan_maurer_residual(&dc, da)?;
    let contracted = dual_res
        .mix(da.trace_form().matrix())?
        .scale(parity_sign::<S>(d));
    let second = second_order_residual(f, da.structure(), da.trace_form())?;
    Ok(contracted.try_sub(&second)?.norm_linf())
}

fn check_dual<S: Scalar>(dual_pot: &DualPotentialField<S>, g: usize) -> Result<()> {
    if dual_pot.field().n_comp() != g {
        return Err(Error::ShapeMismatch(
            "dual potential has the wrong number of components".into(),
        ));
    }
    Ok(())
}

/// `F̃^l = dφ̃^l + D^l_{mj} F^m∧φ̃^j`.
pub fn dual_field_strength<S: Scalar>(
    f: &FormField<S>,
    dual_pot: &DualPotentialField<S>,
    da: &DoubledAlgebra<S>,
) -> Result<FormField<S>> {
    check_strengths(f, da.dim())?;
    check_dual(dual_pot, da.dim())?;
    let phi_t = dual_pot.field();
    let mixed = wedge(f, phi_t, IndexCombine::Contract(da.d_tensor()))?;
    ext_d(phi_t)?.try_add(&mixed)
}

/// `(-1)^D ★F^l - D^l_{mj} F^m∧φ̃^j - dφ̃^l`.
pub fn twisted_selfduality_residual<S: Scalar>(
    f: &FormField<S>,
    dual_pot: &DualPotentialField<S>,
    da: &DoubledAlgebra<S>,
) -> Result<FormField<S>> {
    let d = f.grid().dim();
    let star = hodge(f)?.scale(parity_sign::<S>(d));
    star.try_sub(&dual_field_strength(f, dual_pot, da)?)
}

/// `A_n = -T_{jn} φ̃^j`.
pub fn map_dual_to_multiplier<S: Scalar>(
    dual_pot: &DualPotentialField<S>,
    t: &TraceForm<S>,
) -> Result<MultiplierField<S>> {
    check_dual(dual_pot, t.dim())?;
    let coeffs = Mat::from_fn(t.dim(), t.dim(), |n, j| -t.get(j, n));
    MultiplierField::new(dual_pot.field().mix(&coeffs)?)
}

/// `‖T_{kl} tsd^k - first_order_l(A)‖∞` for an explicit multiplier `A`.
pub fn formulations_mismatch<S: Scalar>(
    f: &FormField<S>,
    dual_pot: &DualPotentialField<S>,
    a: &MultiplierField<S>,
    da: &DoubledAlgebra<S>,
) -> Result<S> {
    let tsd = twisted_selfduality_residual(f, dual_pot, da)?.mix(da.trace_form().matrix())?;
    let first = first_order_residual(f, a, da.structure(), da.trace_form())?;
    Ok(tsd.try_sub(&first)?.norm_linf())
}

/// [`formulations_mismatch`] at `A = map_dual_to_multiplier(φ̃)`. Zero up to
/// roundoff for any fields, on-shell or not.
pub fn formulations_equivalence_check<S: Scalar>(
    f: &FormField<S>,
    dual_pot: &DualPotentialField<S>,
    da: &DoubledAlgebra<S>,
) -> Result<S> {
    let a = map_dual_to_multiplier(dual_pot, da.trace_form())?;
    formulations_mismatch(f, dual_pot, &a, da)
}

/// Dual-sector coefficient of `g′⁻¹dg′` for
/// `g′ = exp(φ^m ρ(T_m)) (1 + φ̃^i ρ(T̃_i))` in the nilpotent doubled
/// representation, with `dg′` by central differences. Only defined in
/// `D = 2`, where the dual potentials are scalars.
///
/// Agrees with [`dual_field_strength`] up to discretisation error.
pub fn doubled_current_via_rep<S: Scalar>(
    phi: &ScalarField<S>,
    dual_pot: &DualPotentialField<S>,
    da: &DoubledAlgebra<S>,
) -> Result<FormField<S>> {
    let g = da.dim();
    let grid = phi.field().grid().clone();
    if grid.dim() != 2 || da.spacetime_dim() != 2 {
        return Err(Error::InvalidArgument(
            "the doubled group element is only built for D = 2".into(),
        ));
    }
    if phi.n_g() != g {
        return Err(Error::ShapeMismatch(
            "φ has the wrong number of components".into(),
        ));
    }
    check_dual(dual_pot, g)?;
    if dual_pot.field().grid() != &grid {
        return Err(Error::ShapeMismatch(
            "φ and φ̃ live on different grids".into(),
        ));
    }
    let rep = doubled_rep(da);
    let base = crate::lie::Representation::new(rep.originals.clone())?;
    let n = rep.n_rep();
    let zeros = vec![S::zero(); g];
    let dual_at =
        |pt: usize| -> Vec<S> { (0..g).map(|i| dual_pot.field().value(pt, i, 0)).collect() };
    let identity = Mat::identity(n);
    let group: Vec<Mat<S>> = (0..grid.n_points())
        .map(|pt| &exp_map(&phi.at(pt), &base) * &(&identity + &rep.combine(&zeros, &dual_at(pt))))
        .collect();
    let mut out = FormField::zeros(&grid, 1, g)?;
    for pt in 0..grid.n_points() {
        let minus: Vec<S> = phi.at(pt).iter().map(|&x| -x).collect();
        // (1 + Y)⁻¹ = 1 - Y since Y² = 0
        let inv = &(&identity - &rep.combine(&zeros, &dual_at(pt))) * &exp_map(&minus, &base);
        for mu in 0..2 {
            let inv_2h = S::one() / (grid.spacing()[mu] + grid.spacing()[mu]);
            let dg = (&group[grid.shift(pt, mu, true)] - &group[grid.shift(pt, mu, false)])
                .scale(inv_2h);
            let cur = &inv * &dg;
            for i in 0..g {
                out.set(pt, i, mu, cur[(i, g)]);
            }
        }
    }
    Ok(out)
}
