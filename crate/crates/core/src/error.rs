use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown model `{0}` (expected one of: diamond, stick, gun, key)")]
    UnknownModel(String),

    #[error("invalid admissibility graph: {0}")]
    InvalidGraph(String),

    #[error("parameter `{name}` = {value} must lie in the open interval (0, 1)")]
    ParameterRange { name: &'static str, value: f64 },

    #[error("parameter `{name}` = {value} must be positive and finite")]
    Positive { name: &'static str, value: f64 },

    #[error("simplex weights sum to {sum}, expected 1")]
    Simplex { sum: f64 },

    #[error("row {row} of the transition matrix sums to {sum}, expected 1")]
    RowSum { row: usize, sum: f64 },

    #[error("transition matrix entry ({row}, {col}) = {value} is invalid")]
    MatrixEntry { row: usize, col: usize, value: f64 },

    #[error("matrix support disagrees with the admissibility graph at ({0}, {1})")]
    SupportMismatch(usize, usize),

    #[error("field vector components must be finite and positive, got {0:?}")]
    InvalidField([f64; 3]),

    #[error("singular evaluation of the recursion at z = {0:?}")]
    Singular([f64; 3]),

    #[error("eta is undefined at v = {v}: the inner w-expression is {inner} < 0")]
    EtaDomain { v: f64, inner: f64 },

    #[error("U is undefined at u = {0}")]
    UDomain(f64),

    #[error("scan range upper end {v_max} is below the bound {bound} on all roots")]
    ScanRange { v_max: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("enumeration needs {count} configurations, budget is {budget}")]
    Budget { count: u128, budget: u128 },

    #[error("degenerate measure: every admissible configuration has zero weight")]
    DegenerateMeasure,

    #[error("inconsistent tree shapes: {0}")]
    Shape(String),

    #[error("invalid scan grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
