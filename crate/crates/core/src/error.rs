use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has {got} entries, expected {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.15}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix has a negative eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),

    #[error("time step must be positive, got {0}")]
    TimeStep(f64),

    #[error("trace drifted by {drift:.3e} in one step; reduce the step size")]
    StepSize { drift: f64 },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error(
        "ambiguous clustering: neighbouring values {left:.6e} and {right:.6e} are within \
         twice the tolerance {tol:.3e} but fall in different clusters"
    )]
    Degeneracy { left: f64, right: f64, tol: f64 },

    #[error("site projectors overlap; a current needs two distinct sites")]
    SameSite,

    #[error("average of a current operator has imaginary part {0:.3e}")]
    NonHermitianCurrent(f64),

    #[error("postselection probability {0:.3e} is too small for a weak value")]
    Postselection(f64),

    #[error("steady-state sector {sector} has no support in the kernel")]
    MissingSector { sector: usize },

    #[error("operation needs a 3-dimensional steady-state kernel, found {0}")]
    KernelDimension(usize),

    #[error("steady-state relation violated: mismatch {0:.3e}")]
    SteadyStateMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
