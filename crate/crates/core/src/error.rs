use thiserror::Error;

/// Errors raised by the entropy primitives and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} does not fit in {width} digits of radix {radix}")]
    WidthOverflow { value: u64, width: usize, radix: u32 },

    #[error("width {width} is below the minimum of {min}")]
    WidthUnderflow { width: usize, min: usize },

    #[error("width {width} exceeds the maximum of {max}")]
    WidthTooLarge { width: usize, max: usize },

    #[error("trinary entropy needs an odd width, got {0}")]
    EvenWidth(usize),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("symbol counts are all zero")]
    EmptyString,

    #[error("{x} is outside the prime table (limit {limit})")]
    OutOfTable { x: u64, limit: u64 },

    #[error("requested {requested} exceeds the resource cap of {cap}")]
    ResourceCap { requested: u64, cap: u64 },

    #[error("fit needs at least {min} points, got {points}")]
    DegenerateFit { points: usize, min: usize },

    #[error("index out of bounds: {0}")]
    Bounds(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
