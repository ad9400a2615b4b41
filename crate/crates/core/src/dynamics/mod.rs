//! Field equations, identities and on-shell configurations.
//!
//! Residual kernels work in any dimension on periodic grids. The solver and
//! the multiplier integration are restricted to `1+1` dimensions, where the
//! multipliers and dual potentials are scalars.

mod multipliers;
mod residuals;
mod solver;

pub use multipliers::{integrate_multipliers_1p1, MultiplierHistory};
pub use residuals::{
    bianchi_residual, cartan_maurer_residual, chain_identity_mismatch, doubled_current,
    doubled_current_via_rep, dual_field_strength, first_order_residual,
    formulations_equivalence_check, formulations_mismatch, map_dual_to_multiplier,
    second_order_residual, second_order_terms, twisted_selfduality_residual,
};
pub use solver::{evolve_pcm_1p1, on_shell_residuals, OnShellResiduals, SolverConfig, Trajectory};

use crate::error::{Error, Result};
use crate::exterior::FormField;

fn check_codegree_two<S: crate::Scalar>(field: &FormField<S>, what: &str) -> Result<()> {
    let d = field.grid().dim();
    if field.degree() + 2 != d {
        return Err(Error::ShapeMismatch(format!(
            "{what} must be a {}-form in D = {d}, got degree {}",
            d - 2,
            field.degree()
        )));
    }
    Ok(())
}

/// Lagrange multipliers `A_l`, `(D-2)`-forms with one component per
/// generator.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierField<S> {
    field: FormField<S>,
}

impl<S: crate::Scalar> MultiplierField<S> {
    pub fn new(field: FormField<S>) -> Result<Self> {
        check_codegree_two(&field, "multiplier")?;
        Ok(Self { field })
    }

    pub fn field(&self) -> &FormField<S> {
        &self.field
    }

    pub fn into_field(self) -> FormField<S> {
        self.field
    }
}

/// Dual potentials `φ̃^l`, `(D-2)`-forms with one component per generator.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPotentialField<S> {
    field: FormField<S>,
}

impl<S: crate::Scalar> DualPotentialField<S> {
    pub fn new(field: FormField<S>) -> Result<Self> {
        check_codegree_two(&field, "dual potential")?;
        Ok(Self { field })
    }

    pub fn field(&self) -> &FormField<S> {
        &self.field
    }
}

/// Coefficients of `G″ = F^m T_m + F̃^i T̃_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledCurrent<S> {
    /// 1-form coefficients of `T_m`.
    pub t_part: FormField<S>,
    /// `(D-1)`-form coefficients of `T̃_i`.
    pub dual_part: FormField<S>,
}
