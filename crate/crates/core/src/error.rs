use thiserror::Error;

use crate::instance::Weight;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("capacity must be positive, got {0}")]
    NonPositiveCapacity(Weight),

    #[error("weight {weight} outside [1, {capacity}]")]
    WeightOutOfRange { weight: Weight, capacity: Weight },

    #[error("item of weight {0} has zero demand")]
    ZeroDemand(Weight),

    #[error("total weight overflows a 64-bit integer")]
    Overflow,

    #[error("instance has {units} units, exact routines are capped at {cap}")]
    SizeCapExceeded { units: u64, cap: u64 },

    #[error("total weight {total} is not {bins} x {capacity}")]
    SumMismatch {
        total: Weight,
        bins: u64,
        capacity: Weight,
    },

    #[error("contract violated: {0}")]
    Contract(&'static str),

    #[error("{0}")]
    Parse(#[from] crate::bpplib::ParseError),

    #[error("generator: {0}")]
    Generator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
