use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structure constants are not antisymmetric: residual {residual:e} at (l, m, n) = {indices:?}")]
    AntisymmetryViolation { residual: f64, indices: [usize; 3] },

    #[error("Jacobi identity violated: residual {residual:e} at (k, l, u, v) = {indices:?}")]
    JacobiViolation { residual: f64, indices: [usize; 4] },

    #[error("representation is not a homomorphism: residual {residual:e} at (m, n) = {indices:?}")]
    HomomorphismViolation { residual: f64, indices: [usize; 2] },

    #[error("trace form is degenerate (condition number {condition:e})")]
    DegenerateTraceForm { condition: f64 },

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("form degree overflow: {p} + {q} exceeds spacetime dimension {d}")]
    DegreeOverflow { p: usize, q: usize, d: usize },

    #[error("W-matrix series refused: ‖M‖∞ = {norm:e} exceeds the cap {cap:e}")]
    SeriesDivergence { norm: f64, cap: f64 },

    #[error("dual constants fail the intertwining relation: residual {residual:e}")]
    IntertwiningFailure { residual: f64 },

    #[error("evolution matrix T·W(φ) is singular at t = {time}, grid point {point}")]
    SingularEvolutionMatrix { time: f64, point: usize },

    #[error("matrix is singular (zero pivot in column {column})")]
    Singular { column: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("failed to parse algebra definition: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
