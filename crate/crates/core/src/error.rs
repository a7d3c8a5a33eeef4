//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected a positive value, got {0}")]
    NonPositive(String),
    #[error("invalid rational literal `{0}`")]
    ParseRational(String),
    #[error("stream expression: {0}")]
    ParseExpr(String),
    #[error("step budget of {limit} exhausted")]
    BudgetExhausted { limit: u64 },
    #[error("requested approximation level overflows the supported query depth")]
    PrecisionOverflow,
    #[error("capacity iteration budget exhausted before certifying precision 2^-{precision}")]
    CapacityBudget { precision: u64 },
    #[error("channel file: {0}")]
    ChannelFormat(String),
    #[error("channel row {row} sums to {sum}, expected 1")]
    RowSum { row: usize, sum: String },
    #[error("channel entry ({row},{col}) = {value} lies outside [0, 1]")]
    EntryRange {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("code file: {0}")]
    CodeFormat(String),
    #[error("symbol {symbol} out of range 1..={alphabet}")]
    SymbolRange { symbol: u64, alphabet: u64 },
    #[error("message index {d} out of range 1..={m}")]
    MessageRange { d: u64, m: u64 },
    #[error("code alphabets ({code}) do not match channel alphabets ({channel})")]
    AlphabetMismatch { code: String, channel: String },
    #[error("table of {cells} cells exceeds the cell limit {limit}")]
    CellLimit { cells: String, limit: u64 },
    #[error("integer of {bits} bits exceeds the bit limit {limit}")]
    BitLimit { bits: u64, limit: u64 },
    #[error("no candidate found up to blocklength {max_blocklength}")]
    BlocklengthExceeded {
        max_blocklength: u32,
        candidates_examined: Vec<u64>,
    },
    #[error("interpolated rate {rate} is not positive: k is infeasible for this channel")]
    InfeasibleK { rate: String },
    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Resource-limit errors are recoverable diagnostics (CLI exit code 2);
    /// everything else is an invalid-input error (exit code 1).
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. }
                | Error::PrecisionOverflow
                | Error::CapacityBudget { .. }
                | Error::CellLimit { .. }
                | Error::BitLimit { .. }
                | Error::BlocklengthExceeded { .. }
                | Error::InfeasibleK { .. }
        )
    }
}
