use thiserror::Error;

use crate::scalar::Scalar;
use crate::space::AxiomViolation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("could not parse: {0}")]
    Parse(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("square root of negative value {0}")]
    NegativeRadicand(Scalar),

    #[error("point {point} is not a member of {space}")]
    Membership { point: String, space: String },

    #[error("map {map} sends {point} to {image}, outside {space}")]
    Closure {
        map: String,
        point: String,
        image: String,
        space: String,
    },

    #[error("map {map} is not defined on {space}")]
    Domain { map: String, space: String },

    #[error("distance matrix is not a metric: {0}")]
    MetricAxiom(AxiomViolation),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pair ({0}, {1}) is not a pair of distinct points")]
    PairNotDistinct(String, String),

    #[error("exhaustive pair enumeration requires a finite space, got {0}")]
    NotFinite(String),

    #[error("coefficient table has no entry for pair ({0}, {1})")]
    MissingCoefficient(String, String),

    #[error("coefficient {value} at pair ({x}, {y}) is negative")]
    NegativeCoefficient { x: String, y: String, value: Scalar },

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("counterexample construction failed: {0}")]
    Construction(String),

    #[error("theorem contradiction: {0}")]
    TheoremContradiction(String),
}

impl Error {
    /// Membership and closure failures, as opposed to malformed input.
    pub fn is_membership(&self) -> bool {
        matches!(
            self,
            Error::Membership { .. } | Error::Closure { .. } | Error::Domain { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
