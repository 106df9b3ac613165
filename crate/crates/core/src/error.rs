use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is singular: numerical rank {rank} of {dim}")]
    Singular { rank: usize, dim: usize },

    #[error("generators are linearly dependent: numerical rank {rank} of {count}")]
    DegenerateBasis { rank: usize, count: usize },

    #[error("family is not closed under the bracket: pair ({0}, {1}) leaves the span (residual {2:.3e})", .i + 1, .j + 1, .residual)]
    NotClosed { i: usize, j: usize, residual: f64 },

    #[error("unsupported Lie algebra class: {0}")]
    Classification(String),

    #[error("functional is not a character: it does not vanish on the derived algebra (residual {0:.3e})")]
    NotCharacter(f64),

    #[error("flag error: {0}")]
    Flag(String),

    #[error("structure constants are not in Jordan-Hölder shape: {0}")]
    Shape(String),

    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("homotopy not applicable: L_{degree} is singular (rank {rank} of {dim}); the character may lie in the spectrum")]
    NotApplicable { degree: usize, rank: usize, dim: usize },

    #[error("family does not commute: pair ({0}, {1}) has commutator norm {2:.3e}", .i + 1, .j + 1, .norm)]
    NotCommuting { i: usize, j: usize, norm: f64 },

    #[error("tolerance failure: {0}")]
    Tolerance(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerical thresholds rather than by the input's structure.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Tolerance(_)
                | Error::Numerical(_)
                | Error::Internal(_)
                | Error::Flag(_)
                | Error::Singular { .. }
                | Error::NotApplicable { .. }
        )
    }
}
