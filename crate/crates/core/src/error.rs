use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coefficient matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("row {0} of the coefficient matrix is zero")]
    ZeroRow(usize),

    #[error("rows {0} and {1} define the same hyperplane")]
    ParallelRows(usize, usize),

    #[error("{n} hyperplanes exceed the subset-enumeration budget of {limit}")]
    BudgetExceeded { n: usize, limit: usize },

    #[error("parameter point is zero")]
    ZeroPoint,

    #[error("point lies on hyperplane {index}")]
    OnHyperplane { index: usize },

    #[error("leading block of squared forms is singular; rows {repair:?} give an invertible block")]
    DegenerateLeadingBlock { repair: Vec<usize> },

    #[error("Newton solve did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NoConvergence {
        iterations: usize,
        grad_norm: f64,
        trace: Vec<f64>,
    },

    #[error("data vector has zero entries {zeros:?}; use the closed-form degenerate solutions")]
    BoundaryData { zeros: Vec<usize> },

    #[error("tropical data attains its minimum at more than one index: {indices:?}")]
    AnchorNotUnique { indices: Vec<usize> },

    #[error("path for region {region} left its region at eps = {eps}")]
    PathLost { region: String, eps: f64 },

    #[error("point has a zero coordinate at index {0}")]
    ZeroCoordinate(usize),

    #[error("chamber determinant for subset {subset:?} vanishes identically")]
    DegenerateMinor { subset: Vec<usize> },

    #[error("point is not in the kernel of B")]
    NotInKernel,

    #[error("dimension {d} is not supported here")]
    DimensionUnsupported { d: usize },

    #[error("row reduction of the fixed rows failed on columns {block:?}")]
    ReductionFailed { block: Vec<usize> },
}

impl Error {
    /// Variant name, stable for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::ZeroRow(_) => "ZeroRow",
            Error::ParallelRows(..) => "ParallelRows",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::ZeroPoint => "ZeroPoint",
            Error::OnHyperplane { .. } => "OnHyperplane",
            Error::DegenerateLeadingBlock { .. } => "DegenerateLeadingBlock",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BoundaryData { .. } => "BoundaryData",
            Error::AnchorNotUnique { .. } => "AnchorNotUnique",
            Error::PathLost { .. } => "PathLost",
            Error::ZeroCoordinate(_) => "ZeroCoordinate",
            Error::DegenerateMinor { .. } => "DegenerateMinor",
            Error::NotInKernel => "NotInKernel",
            Error::DimensionUnsupported { .. } => "DimensionUnsupported",
            Error::ReductionFailed { .. } => "ReductionFailed",
        }
    }

    /// Errors caused by numerical iteration rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::PathLost { .. })
    }
}
