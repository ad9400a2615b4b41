//! Numerical toolkit for the first-order formulation and dualisation of the
//! principal sigma model on a Lie group.
//!
//! The crate builds the doubled symmetry algebra (dual structure constants
//! `D_n = -T⁻¹ C_nᵀ T`) from arbitrary structure constants and trace forms, and
//! evaluates the field equations and identities of the model on periodic
//! finite-difference grids so they can be certified numerically.
//!
//! All kernels are generic over [`Scalar`] (`f64` and `f32`); the aliases at
//! the crate root fix the scalar for the common cases.

pub mod convergence;
pub mod dualisation;
pub mod dynamics;
pub mod error;
pub mod exterior;
pub mod lie;
pub mod linalg;
pub mod parametrization;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mat64 = linalg::Mat<f64>;
pub type Mat32 = linalg::Mat<f32>;
pub type Tensor3F64 = linalg::Tensor3<f64>;
pub type StructureConstants64 = lie::StructureConstants<f64>;
pub type StructureConstants32 = lie::StructureConstants<f32>;
pub type Representation64 = lie::Representation<f64>;
pub type Representation32 = lie::Representation<f32>;
pub type TraceForm64 = lie::TraceForm<f64>;
pub type TraceForm32 = lie::TraceForm<f32>;
pub type Grid64 = exterior::SpacetimeGrid<f64>;
pub type Grid32 = exterior::SpacetimeGrid<f32>;
pub type FormField64 = exterior::FormField<f64>;
pub type FormField32 = exterior::FormField<f32>;
pub type ScalarField64 = parametrization::ScalarField<f64>;
pub type DoubledAlgebra64 = dualisation::DoubledAlgebra<f64>;
pub type DoubledAlgebra32 = dualisation::DoubledAlgebra<f32>;
pub type SolverConfig64 = dynamics::SolverConfig<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
