//! Discrete exterior calculus for algebra-valued forms on a periodic uniform
//! grid: wedge product, central-difference exterior derivative and the Hodge
//! star of the flat metric.

mod basis;
mod form;
mod grid;
mod ops;
mod random;

pub use form::FormField;
pub use grid::{Signature, SpacetimeGrid, MAX_DIM, MIN_EXTENT};
pub use ops::{double_star_sign, ext_d, hodge, wedge, IndexCombine};
pub use random::{random_smooth_field, SmoothFieldSpec, MAX_WAVENUMBER};
