//! Exact and stream-mode block error probabilities.
//!
//! For message d, λ_d sums the transition probabilities of every output word
//! the decoder does not map back to d; the word-level probability is the
//! per-symbol product, so the Kronecker extension is never materialized.
//! Summation runs in lexicographic output order, making exact results
//! bit-reproducible.

use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::channel::{advance_word, Channel, ChannelMode, Words};
use crate::code::BlockCode;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::real::{dyadic_below, Budget, ComputableReal};

/// Per-message error probabilities plus their maximum, in the channel's mode.
pub enum ErrorProfile {
    Exact {
        per_message: Vec<Rational>,
        lambda_max: Rational,
    },
    Stream {
        per_message: Vec<ComputableReal>,
        lambda_max: ComputableReal,
    },
}

fn check_alphabets(code: &BlockCode, channel: &Channel) -> Result<()> {
    if code.input_size() != channel.input_size() || code.output_size() != channel.output_size() {
        return Err(Error::AlphabetMismatch {
            code: format!("M={}, N={}", code.input_size(), code.output_size()),
            channel: format!(
                "M={}, N={}",
                channel.input_size(),
                channel.output_size()
            ),
        });
    }
    Ok(())
}

/// Exact block error probability for one message of an exact-mode channel.
pub fn lambda_message_exact(code: &BlockCode, channel: &Channel, d: u64) -> Result<Rational> {
    check_alphabets(code, channel)?;
    if d == 0 || d > code.message_count() {
        return Err(Error::MessageRange {
            d,
            m: code.message_count(),
        });
    }
    debug_assert_eq!(channel.mode(), ChannelMode::Exact);
    let codeword = code.codeword(d);
    let mut sum = Rational::zero();
    let mut output = vec![1u32; code.blocklength() as usize];
    let mut index = 0usize;
    loop {
        if code.decoder()[index] as u64 != d {
            let mut term = Rational::one();
            for (x, y) in codeword.iter().zip(&output) {
                term = &term * channel.exact_entry(*x, *y);
            }
            sum = &sum + &term;
        }
        index += 1;
        if !advance_word(&mut output, code.output_size()) {
            break;
        }
    }
    Ok(sum)
}

/// Block error probability for one message as an approximation stream.
pub fn lambda_message_stream(
    code: &BlockCode,
    channel: &Channel,
    d: u64,
) -> Result<ComputableReal> {
    check_alphabets(code, channel)?;
    if d == 0 || d > code.message_count() {
        return Err(Error::MessageRange {
            d,
            m: code.message_count(),
        });
    }
    let codeword = code.codeword(d);
    let mut sum = ComputableReal::from_rational(Rational::zero());
    for (index, output) in Words::new(code.output_size(), code.blocklength() as usize).enumerate() {
        if code.decoder()[index] as u64 == d {
            continue;
        }
        let mut term = ComputableReal::from_rational(Rational::one());
        for (x, y) in codeword.iter().zip(&output) {
            term = term.mul(&channel.entry_stream(*x, *y));
        }
        sum = sum.add(&term);
    }
    Ok(sum)
}

/// λ_d in the channel's own mode.
pub fn lambda_message(code: &BlockCode, channel: &Channel, d: u64) -> Result<ErrorProfileEntry> {
    match channel.mode() {
        ChannelMode::Exact => Ok(ErrorProfileEntry::Exact(lambda_message_exact(
            code, channel, d,
        )?)),
        ChannelMode::Stream => Ok(ErrorProfileEntry::Stream(lambda_message_stream(
            code, channel, d,
        )?)),
    }
}

pub enum ErrorProfileEntry {
    Exact(Rational),
    Stream(ComputableReal),
}

/// Full profile: every λ_d and their maximum.
pub fn error_profile(code: &BlockCode, channel: &Channel) -> Result<ErrorProfile> {
    check_alphabets(code, channel)?;
    match channel.mode() {
        ChannelMode::Exact => {
            let per_message: Vec<Rational> = (1..=code.message_count())
                .map(|d| lambda_message_exact(code, channel, d))
                .collect::<Result<_>>()?;
            let lambda_max = per_message
                .iter()
                .fold(Rational::zero(), |acc, v| acc.max(v.clone()));
            Ok(ErrorProfile::Exact {
                per_message,
                lambda_max,
            })
        }
        ChannelMode::Stream => {
            let per_message: Vec<ComputableReal> = (1..=code.message_count())
                .map(|d| lambda_message_stream(code, channel, d))
                .collect::<Result<_>>()?;
            let lambda_max = per_message
                .iter()
                .skip(1)
                .fold(per_message[0].clone(), |acc, v| acc.max(v));
            Ok(ErrorProfile::Stream {
                per_message,
                lambda_max,
            })
        }
    }
}

/// Maximum block error probability, exact mode.
pub fn lambda_max_exact(code: &BlockCode, channel: &Channel) -> Result<Rational> {
    match error_profile(code, channel)? {
        ErrorProfile::Exact { lambda_max, .. } => Ok(lambda_max),
        ErrorProfile::Stream { .. } => Err(Error::InvalidInput(
            "exact λ requires an exact-mode channel".into(),
        )),
    }
}

/// Acceptance test for error tolerance 2^-b.
///
/// Exact mode compares λ_max < 2^-(b+1) exactly: the exact value is its own
/// zero-error approximation, so the dyadic test degenerates to this strict
/// comparison and the indeterminate band disappears. Stream mode runs the
/// dyadic test verbatim (query at b+2 against 2^-(b+1)). In both modes a
/// `true` answer guarantees λ_max < 2^-b.
pub fn achieves_error(
    code: &BlockCode,
    channel: &Channel,
    b: u64,
    budget: &Budget,
) -> Result<bool> {
    match error_profile(code, channel)? {
        ErrorProfile::Exact { lambda_max, .. } => {
            Ok(lambda_max < Rational::pow2(-(b as i64) - 1))
        }
        ErrorProfile::Stream { lambda_max, .. } => dyadic_below(&lambda_max, b, budget),
    }
}

/// Precomputed output-word distributions for the codewords of one
/// blocklength, shared across many candidates during a search. Values and
/// summation order are identical to [`lambda_message_exact`].
pub(crate) struct RowTable {
    rows: Vec<Arc<Vec<BigUint>>>,
    denominator: BigUint,
    n: u32,
}

impl RowTable {
    /// Worth building only when the full table comfortably fits in memory.
    pub(crate) const CELL_HEURISTIC: u64 = 1 << 21;

    pub(crate) fn build(channel: &Channel, n: u32) -> Option<Self> {
        if channel.mode() != ChannelMode::Exact {
            return None;
        }
        let inputs = (channel.input_size() as u64).checked_pow(n)?;
        let outputs = (channel.output_size() as u64).checked_pow(n)?;
        if inputs.checked_mul(outputs)? > Self::CELL_HEURISTIC {
            return None;
        }
        // one common denominator L^n turns every per-word probability into a
        // plain integer numerator, so candidate sums need no reduction
        let mut lcm = BigUint::one();
        for x in 1..=channel.input_size() {
            for y in 1..=channel.output_size() {
                lcm = lcm.lcm(channel.exact_entry(x, y).denom());
            }
        }
        let scaled: Vec<Vec<BigUint>> = (1..=channel.input_size())
            .map(|x| {
                (1..=channel.output_size())
                    .map(|y| {
                        let entry = channel.exact_entry(x, y);
                        entry.numer() * (&lcm / entry.denom())
                    })
                    .collect()
            })
            .collect();
        let output_size = channel.output_size();
        let rows = Words::new(channel.input_size(), n as usize)
            .map(|codeword| {
                let mut row = Vec::with_capacity(outputs as usize);
                let mut output = vec![1u32; n as usize];
                loop {
                    let mut term = BigUint::one();
                    for (x, y) in codeword.iter().zip(&output) {
                        term *= &scaled[(*x - 1) as usize][(*y - 1) as usize];
                    }
                    row.push(term);
                    if !advance_word(&mut output, output_size) {
                        break;
                    }
                }
                Arc::new(row)
            })
            .collect();
        let denominator = lcm.pow(n);
        Some(Self {
            rows,
            denominator,
            n,
        })
    }

    /// Exact test λ_max < 2^-(b+1), with per-message early exit.
    pub(crate) fn passes(&self, code: &BlockCode, b: u64) -> bool {
        debug_assert_eq!(code.blocklength(), self.n);
        for d in 1..=code.message_count() {
            // λ_d = S_d / L^n < 2^-(b+1)  ⟺  S_d · 2^(b+1) < L^n
            let sum = self.message_numerator(code, d);
            if (sum << (b + 1)) >= self.denominator {
                return false;
            }
        }
        true
    }

    #[cfg(test)]
    pub(crate) fn lambda_max(&self, code: &BlockCode) -> Rational {
        let worst = (1..=code.message_count())
            .map(|d| self.message_numerator(code, d))
            .max()
            .unwrap_or_default();
        Rational::new(false, worst, self.denominator.clone()).expect("L^n > 0")
    }

    fn message_numerator(&self, code: &BlockCode, d: u64) -> BigUint {
        let rank = crate::channel::lex_order(code.codeword(d), code.input_size())
            .expect("validated codeword");
        let row = &self.rows[(rank - 1) as usize];
        let mut sum = BigUint::default();
        for (index, value) in row.iter().enumerate() {
            if code.decoder()[index] as u64 != d {
                sum += value;
            }
        }
        sum
    }
}
