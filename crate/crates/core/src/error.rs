use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot parse {field}: {value:?}")]
    Parse { field: String, value: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("polytope is unbounded along direction {direction}")]
    Unbounded { direction: String },

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope has dimension {got}, expected full dimension {expected}")]
    NotFullDimensional { expected: usize, got: usize },

    #[error("vertex {vertex} is not a lattice point")]
    NonIntegralVertex { vertex: String },

    #[error("flag map is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("weight is negative at vertex {vertex} (value {value})")]
    NegativeWeight { vertex: String, value: String },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("point {point} is not in {m}P")]
    PointOutside { point: String, m: String },

    #[error("{what} must be {constraint}, got {value}")]
    OutOfRange {
        what: String,
        constraint: String,
        value: String,
    },

    #[error("measure total mass is {mass}, expected 1")]
    MassMismatch { mass: String },

    #[error("measure is empty")]
    EmptyMeasure,

    #[error("supremum of the CDF gap is not rational on [{lo}, {hi}]")]
    IrrationalSupremum { lo: String, hi: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Failures that can only arise from a bug, never from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
