//! Exact-arithmetic construction of block codes for discrete memoryless
//! channels.
//!
//! Given a channel, a target rate R, and an error tolerance ε, the search
//! enumerates block codes of growing blocklength and returns the first one
//! with rate ≥ R whose maximum block error probability passes an exact
//! dyadic test below ε. Everything on the decision path is exact: rationals
//! are arbitrary-precision fractions, channel entries may be verified
//! approximation streams, and the capacity of a channel is produced as a
//! stream of certified rational intervals.

pub mod capacity;
pub mod channel;
pub mod code;
pub mod error;
pub mod expr;
pub mod lambda;
mod par;
pub mod rational;
pub mod real;
pub mod search;
pub mod sim;

pub use capacity::log2_bounds;
pub use channel::{lex_order, Channel, ChannelMode};
pub use code::{
    binomial, code_count, message_number, rate_at_least, BlockCode, ChannelKind, CursorMode,
    EnumerationCursor,
};
pub use error::{Error, Result};
pub use lambda::{achieves_error, error_profile, lambda_max_exact, lambda_message, ErrorProfile};
pub use rational::{blb, Rational};
pub use real::{dyadic_below, rat_interpolation, rlb, Budget, ComputableReal};
pub use search::{capacity_sequence, find_code, find_code_ext, SearchMode, SearchOptions, SearchReport};
pub use sim::{simulate, SimulationResult};
