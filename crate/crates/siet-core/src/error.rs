use thiserror::Error;

/// Errors produced by configuration validation, solvers and membership tests.
#[derive(Error, Debug)]
pub enum Error {
    #[error("K = {0} users, but at least 2 are required")]
    KTooSmall(usize),

    #[error("field `{field}` has length {got}, expected {expected}")]
    BadDimension {
        field: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("||h{side}||^2 = {norm_sq} exceeds 1 (energy conservation)")]
    NormViolation { side: u8, norm_sq: f64 },

    #[error("sigma{side}_sq = {value} must be strictly positive")]
    NonPositiveVariance { side: u8, value: f64 },

    #[error("p_max[{index}] = {value} is negative")]
    NegativePower { index: usize, value: f64 },

    #[error("snr{side}[{index}] = {value} is negative")]
    NegativeSnr { side: u8, index: usize, value: f64 },

    #[error("beta[{index}] = {value} is outside [0, 1]")]
    InvalidSplit { index: usize, value: f64 },

    #[error("rate component {index} = {value} must be finite and non-negative")]
    InvalidRate { index: usize, value: f64 },

    #[error("energy demand b = {0} is negative")]
    NegativeDemand(f64),

    #[error("energy demand b = {b} exceeds b_coop = {b_coop}")]
    InfeasibleDemand { b: f64, b_coop: f64 },

    #[error("the user subset is empty")]
    EmptySubset,

    #[error("decoding order is not a permutation of 0..{k}")]
    BadPermutation { k: usize },

    #[error("time-sharing weights must be non-negative and sum to 1 (sum = {sum})")]
    InvalidMixture { sum: f64 },

    #[error("direction weights must be finite and strictly positive")]
    InvalidWeights,

    #[error("boundary export supports K <= 3, got K = {0}")]
    UnsupportedK(usize),

    #[error("user {user}: no power split meets the energy demand given the other users' splits")]
    NoFeasibleResponse { user: usize },

    #[error("round {round}, user {user}: no power split meets the energy demand given the other users' splits")]
    DynamicsInfeasible { round: usize, user: usize },

    #[error("decoder must be SUD or SIC for this operation")]
    DecoderNotAtomic,

    #[error("BSC parameters out of range: p = {p} must lie in [0, 1/2], b = {b} in [0, 1-p]")]
    BscOutOfRange { p: f64, b: f64 },

    #[error("game parameters: {0}")]
    BadGame(&'static str),

    #[error("simulation config: {0}")]
    BadSimulation(&'static str),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
