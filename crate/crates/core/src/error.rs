use thiserror::Error;

use crate::dyadic::DyadicRational;
use crate::interval::Interval;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    InvalidInterval { lo: f64, hi: f64, reason: &'static str },

    #[error("{num}/2^{exp} is not a dyadic rational in [0, 1] of supported depth")]
    InvalidDyadic { num: u64, exp: u32 },

    #[error("dyadic depth {exp} exceeds the exactly representable budget of 52")]
    DyadicTooDeep { exp: u32 },

    #[error("a grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),

    #[error("invalid tolerance configuration: {0}")]
    InvalidConfig(String),

    #[error("{label}: argument ({x}, {y}) lies outside {domain}")]
    OutsideDomain { label: String, x: f64, y: f64, domain: Interval },

    #[error("{label}: F({x}, {y}) = {value} leaves {codomain}")]
    Closure { label: String, x: f64, y: f64, value: f64, codomain: Interval },

    #[error("{label}: evaluation failed at ({x}, {y}): {reason}")]
    Evaluation { label: String, x: f64, y: f64, reason: String },

    #[error("generator {label}: {reason}")]
    Generator { label: String, reason: String },

    #[error("invalid gap function: {0}")]
    GapFunction(String),

    #[error("unknown catalog mean `{0}`")]
    UnknownMean(String),

    #[error("bad parameters for `{name}`: {reason}")]
    BadParameters { name: String, reason: String },

    #[error("depth {depth} outside the supported range {min}..={max}")]
    DepthOutOfRange { depth: u32, min: u32, max: u32 },

    #[error("generator table is not strictly increasing between {left} and {right}")]
    NonMonotoneTable { left: DyadicRational, right: DyadicRational },

    #[error("inversion failed: {0}")]
    Inversion(String),

    #[error("malformed generator table: {0}")]
    TableFormat(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
