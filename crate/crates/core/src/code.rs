//! Block codes and their canonical enumerations.
//!
//! A code pairs an encoder table (one length-n input word per message) with a
//! decoder table over all length-n output words, indexed by lexicographic
//! rank. Two enumerations exist: the full family of all encoder/decoder
//! pairs, and the pruned family of injective, lexicographically ordered
//! encoders paired with the minimum-Hamming-distance decoder.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::channel::{checked_pow, lex_order, word_of_rank};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockCode {
    m: u64,
    n: u32,
    #[serde(rename = "M")]
    input_size: u32,
    #[serde(rename = "N")]
    output_size: u32,
    encoder: Vec<Vec<u32>>,
    decoder: Vec<u32>,
}

impl BlockCode {
    pub fn new(
        m: u64,
        n: u32,
        input_size: u32,
        output_size: u32,
        encoder: Vec<Vec<u32>>,
        decoder: Vec<u32>,
    ) -> Result<Self> {
        let code = Self {
            m,
            n,
            input_size,
            output_size,
            encoder,
            decoder,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let code: Self =
            serde_json::from_str(text).map_err(|e| Error::CodeFormat(e.to_string()))?;
        code.validate()?;
        Ok(code)
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.input_size == 0 || self.output_size == 0 {
            return Err(Error::CodeFormat("m, n, M, N must all be positive".into()));
        }
        if self.encoder.len() as u64 != self.m {
            return Err(Error::CodeFormat(format!(
                "encoder has {} rows, expected m = {}",
                self.encoder.len(),
                self.m
            )));
        }
        for word in &self.encoder {
            if word.len() != self.n as usize {
                return Err(Error::CodeFormat(format!(
                    "codeword length {} differs from n = {}",
                    word.len(),
                    self.n
                )));
            }
            for &symbol in word {
                if symbol == 0 || symbol > self.input_size {
                    return Err(Error::SymbolRange {
                        symbol: symbol as u64,
                        alphabet: self.input_size as u64,
                    });
                }
            }
        }
        let table = checked_pow(self.output_size as u64, self.n)?;
        if self.decoder.len() as u64 != table {
            return Err(Error::CodeFormat(format!(
                "decoder has {} entries, expected N^n = {}",
                self.decoder.len(),
                table
            )));
        }
        for &message in &self.decoder {
            if message == 0 || message as u64 > self.m {
                return Err(Error::MessageRange {
                    d: message as u64,
                    m: self.m,
                });
            }
        }
        Ok(())
    }

    pub fn message_count(&self) -> u64 {
        self.m
    }

    pub fn blocklength(&self) -> u32 {
        self.n
    }

    pub fn input_size(&self) -> u32 {
        self.input_size
    }

    pub fn output_size(&self) -> u32 {
        self.output_size
    }

    /// Codeword for a 1-based message index.
    pub fn codeword(&self, d: u64) -> &[u32] {
        &self.encoder[(d - 1) as usize]
    }

    pub fn encoder(&self) -> &[Vec<u32>] {
        &self.encoder
    }

    pub fn decoder(&self) -> &[u32] {
        &self.decoder
    }

    /// Decoded message for an output word, via its lexicographic rank.
    pub fn decode(&self, word: &[u32]) -> Result<u32> {
        let rank = lex_order(word, self.output_size)?;
        Ok(self.decoder[(rank - 1) as usize])
    }

    pub fn has_repeated_codeword(&self) -> bool {
        let mut sorted = self.encoder.clone();
        sorted.sort();
        sorted.windows(2).any(|w| w[0] == w[1])
    }
}

/// Exact message count ⌈2^(n·R)⌉ for a positive rational rate, via the
/// integer test i^den ≥ 2^(n·num). `bit_limit` caps the exponent bit growth.
pub fn message_number(rate: &Rational, n: u32, bit_limit: u64) -> Result<BigUint> {
    if !rate.is_positive() {
        return Err(Error::NonPositive(rate.to_string()));
    }
    let num = rate
        .numer()
        .to_u64()
        .ok_or(Error::BitLimit {
            bits: rate.numer().bits(),
            limit: bit_limit,
        })?
        .checked_mul(n as u64)
        .ok_or(Error::PrecisionOverflow)?;
    if num > bit_limit {
        return Err(Error::BitLimit {
            bits: num,
            limit: bit_limit,
        });
    }
    let den = rate.denom().to_u32().ok_or(Error::BitLimit {
        bits: rate.denom().bits(),
        limit: bit_limit,
    })?;
    // 2^(n·num/den) lies in [2^q, 2^(q+1)]; bisect for the least i with
    // i^den ≥ 2^(n·num)
    let target = BigUint::one() << num;
    let q = num / den as u64;
    let mut lo = BigUint::one() << q;
    if lo.pow(den) >= target {
        return Ok(lo);
    }
    let mut hi = BigUint::one() << (q + 1);
    // invariant: lo^den < target ≤ hi^den
    while &lo + BigUint::one() < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if mid.pow(den) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Exact rate test m^den(R) ≥ 2^(n·num(R)), i.e. log2(m)/n ≥ R, without
/// logarithms.
pub fn rate_at_least(code: &BlockCode, rate: &Rational) -> bool {
    let (m_pow, two_pow) = rate_check_terms(code.message_count(), code.blocklength(), rate);
    m_pow >= two_pow
}

/// The two sides of the rate test, for reporting.
pub fn rate_check_terms(m: u64, n: u32, rate: &Rational) -> (BigUint, BigUint) {
    let den = rate.denom().to_u32().unwrap_or(u32::MAX);
    let num = rate.numer().to_u64().unwrap_or(u64::MAX);
    let m_pow = BigUint::from(m).pow(den);
    let two_pow = if rate.is_negative() {
        BigUint::zero()
    } else {
        BigUint::one() << (num.saturating_mul(n as u64))
    };
    (m_pow, two_pow)
}

/// |C_{M,N,m,n}| = M^(m·n) · m^(N^n).
pub fn code_count(input_size: u32, output_size: u32, m: u64, n: u32) -> Result<BigUint> {
    if input_size == 0 || output_size == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidInput("code_count needs positive sizes".into()));
    }
    let encoder_exp = u32::try_from(m.checked_mul(n as u64).ok_or(Error::PrecisionOverflow)?)
        .map_err(|_| Error::PrecisionOverflow)?;
    let decoder_exp = u32::try_from(checked_pow(output_size as u64, n)?)
        .map_err(|_| Error::PrecisionOverflow)?;
    Ok(BigUint::from(input_size).pow(encoder_exp) * BigUint::from(m).pow(decoder_exp))
}

/// C(k, r) pairs, for pruned-family sizes.
pub fn binomial(k: u64, r: u64) -> BigUint {
    if r > k {
        return BigUint::zero();
    }
    let r = r.min(k - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(k - i) / BigUint::from(i + 1);
    }
    acc
}

/// The decoder family used by pruned enumeration. Minimum-Hamming-distance
/// decoding is maximum-likelihood only for the symmetric channels this mode
/// is meant for, which is why the kind is an explicit parameter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChannelKind {
    Hamming,
}

#[derive(Clone, Debug)]
pub enum CursorMode {
    Full,
    Pruned(ChannelKind),
}

enum CursorState {
    /// Encoder-major odometers: encoder flat tuple is the high digit block,
    /// decoder table the low one.
    Full {
        encoder: Vec<u32>,
        decoder: Vec<u32>,
    },
    /// Strictly increasing codeword ranks (1-based), advanced in
    /// lexicographic combination order.
    Pruned { ranks: Vec<u64> },
}

/// Lazy, deterministic enumeration of a code family in canonical order.
///
/// Cursors are single-owner mutable state; for a parallel scan, seek several
/// cursors to disjoint position ranges. Candidate-at-position is a pure
/// function of the parameters, so any split yields the same codes.
pub struct EnumerationCursor {
    input_size: u32,
    output_size: u32,
    m: u64,
    n: u32,
    mode: CursorMode,
    table_len: u64,
    state: CursorState,
    position: BigUint,
    exhausted: bool,
}

impl EnumerationCursor {
    pub fn new(
        input_size: u32,
        output_size: u32,
        m: u64,
        n: u32,
        mode: CursorMode,
        cell_limit: u64,
    ) -> Result<Self> {
        if input_size == 0 || output_size == 0 || m == 0 || n == 0 {
            return Err(Error::InvalidInput("enumeration needs positive sizes".into()));
        }
        let table_len = checked_pow(output_size as u64, n)?;
        if table_len > cell_limit {
            return Err(Error::CellLimit {
                cells: table_len.to_string(),
                limit: cell_limit,
            });
        }
        u32::try_from(m).map_err(|_| Error::CellLimit {
            cells: format!("m = {m}"),
            limit: cell_limit,
        })?;
        let (state, exhausted) = match mode {
            CursorMode::Full => (
                CursorState::Full {
                    encoder: vec![1; (m as usize) * (n as usize)],
                    decoder: vec![1; table_len as usize],
                },
                false,
            ),
            CursorMode::Pruned(_) => {
                let codewords = checked_pow(input_size as u64, n)?;
                if m > codewords {
                    // no injective encoder exists
                    (CursorState::Pruned { ranks: Vec::new() }, true)
                } else {
                    (
                        CursorState::Pruned {
                            ranks: (1..=m).collect(),
                        },
                        false,
                    )
                }
            }
        };
        Ok(Self {
            input_size,
            output_size,
            m,
            n,
            mode,
            table_len,
            state,
            position: BigUint::zero(),
            exhausted,
        })
    }

    /// Number of codes in the family.
    pub fn total(&self) -> Result<BigUint> {
        match self.mode {
            CursorMode::Full => code_count(self.input_size, self.output_size, self.m, self.n),
            CursorMode::Pruned(_) => {
                Ok(binomial(checked_pow(self.input_size as u64, self.n)?, self.m))
            }
        }
    }

    /// 0-based position of the next candidate.
    pub fn position(&self) -> &BigUint {
        &self.position
    }

    /// Jumps so the next emitted candidate is the one at a 0-based position.
    pub fn seek(&mut self, position: &BigUint) -> Result<()> {
        let total = self.total()?;
        if position >= &total {
            self.exhausted = true;
            self.position = total;
            return Ok(());
        }
        self.exhausted = false;
        self.position = position.clone();
        match &mut self.state {
            CursorState::Full { encoder, decoder } => {
                let decoder_total = BigUint::from(self.m).pow(
                    u32::try_from(self.table_len).map_err(|_| Error::PrecisionOverflow)?,
                );
                let (enc_idx, dec_idx) = position.div_rem(&decoder_total);
                unrank_odometer(&enc_idx, self.input_size as u64, encoder);
                unrank_odometer(&dec_idx, self.m, decoder);
            }
            CursorState::Pruned { ranks } => {
                let codewords = checked_pow(self.input_size as u64, self.n)?;
                *ranks = unrank_combination(position, codewords, self.m);
            }
        }
        Ok(())
    }

    pub fn next_code(&mut self) -> Option<BlockCode> {
        if self.exhausted {
            return None;
        }
        let code = match &self.state {
            CursorState::Full { encoder, decoder } => BlockCode {
                m: self.m,
                n: self.n,
                input_size: self.input_size,
                output_size: self.output_size,
                encoder: encoder
                    .chunks(self.n as usize)
                    .map(|word| word.to_vec())
                    .collect(),
                decoder: decoder.clone(),
            },
            CursorState::Pruned { ranks } => {
                let encoder: Vec<Vec<u32>> = ranks
                    .iter()
                    .map(|&r| word_of_rank(r, self.input_size, self.n as usize))
                    .collect();
                let decoder = match self.mode {
                    CursorMode::Pruned(ChannelKind::Hamming) => {
                        hamming_decoder(&encoder, self.output_size, self.n)
                    }
                    CursorMode::Full => unreachable!(),
                };
                BlockCode {
                    m: self.m,
                    n: self.n,
                    input_size: self.input_size,
                    output_size: self.output_size,
                    encoder,
                    decoder,
                }
            }
        };
        self.advance();
        Some(code)
    }

    fn advance(&mut self) {
        self.position += 1u32;
        match &mut self.state {
            CursorState::Full { encoder, decoder } => {
                // decoder is the minor block: encoder advances on wrap
                if !increment_odometer(decoder, self.m as u32)
                    && !increment_odometer(encoder, self.input_size)
                {
                    self.exhausted = true;
                }
            }
            CursorState::Pruned { ranks } => {
                let codewords = checked_pow(self.input_size as u64, self.n)
                    .expect("validated at construction");
                if !next_combination(ranks, codewords) {
                    self.exhausted = true;
                }
            }
        }
    }
}

impl Iterator for EnumerationCursor {
    type Item = BlockCode;

    fn next(&mut self) -> Option<BlockCode> {
        self.next_code()
    }
}

/// Advances a 1-based odometer in lexicographic order (rightmost digit is
/// least significant). Returns false on wrap-around.
fn increment_odometer(digits: &mut [u32], radix: u32) -> bool {
    for slot in digits.iter_mut().rev() {
        if *slot < radix {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}

/// Writes the base-`radix` expansion of `index` into a 1-based odometer.
fn unrank_odometer(index: &BigUint, radix: u64, digits: &mut [u32]) {
    let radix = BigUint::from(radix);
    let mut rest = index.clone();
    for slot in digits.iter_mut().rev() {
        let (q, r) = rest.div_rem(&radix);
        *slot = r.to_u32().expect("digit below radix") + 1;
        rest = q;
    }
}

/// Next m-combination of {1..k} in lexicographic order. Returns false when
/// the current one is the last.
pub(crate) fn next_combination(ranks: &mut [u64], k: u64) -> bool {
    let m = ranks.len();
    for i in (0..m).rev() {
        let max_here = k - (m - 1 - i) as u64;
        if ranks[i] < max_here {
            ranks[i] += 1;
            for j in i + 1..m {
                ranks[j] = ranks[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Combination at a 0-based position in lexicographic order over {1..k}.
fn unrank_combination(position: &BigUint, k: u64, m: u64) -> Vec<u64> {
    let mut ranks = Vec::with_capacity(m as usize);
    let mut rest = position.clone();
    let mut low = 1u64;
    for slot in 0..m {
        let remaining = m - slot - 1;
        let mut candidate = low;
        loop {
            let after = binomial(k - candidate, remaining);
            if rest < after {
                break;
            }
            rest -= after;
            candidate += 1;
        }
        ranks.push(candidate);
        low = candidate + 1;
    }
    ranks
}

/// Pruned-family candidate from its codeword ranks: encoder rows in rank
/// order, decoder by minimum distance. Equals the cursor's emission for the
/// same combination.
pub(crate) fn pruned_candidate(
    input_size: u32,
    output_size: u32,
    n: u32,
    ranks: &[u64],
) -> BlockCode {
    let encoder: Vec<Vec<u32>> = ranks
        .iter()
        .map(|&r| word_of_rank(r, input_size, n as usize))
        .collect();
    let decoder = hamming_decoder(&encoder, output_size, n);
    BlockCode {
        m: ranks.len() as u64,
        n,
        input_size,
        output_size,
        encoder,
        decoder,
    }
}

/// Minimum-Hamming-distance decoder table over all output words, ties broken
/// toward the smallest message index.
pub fn hamming_decoder(encoder: &[Vec<u32>], output_size: u32, n: u32) -> Vec<u32> {
    let capacity = (output_size as u64)
        .checked_pow(n)
        .and_then(|c| usize::try_from(c).ok())
        .unwrap_or(0);
    let mut table = Vec::with_capacity(capacity);
    let mut word = vec![1u32; n as usize];
    loop {
        let mut best = (u32::MAX, 0u32);
        for (i, codeword) in encoder.iter().enumerate() {
            let distance = codeword
                .iter()
                .zip(&word)
                .filter(|(a, b)| a != b)
                .count() as u32;
            if distance < best.0 {
                best = (distance, i as u32 + 1);
            }
        }
        table.push(best.1);
        if !crate::channel::advance_word(&mut word, output_size) {
            break;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn q(text: &str) -> Rational {
        text.parse().unwrap()
    }

    const BITS: u64 = 1_000_000;
    const CELLS: u64 = 1 << 26;

    #[test]
    fn message_number_examples() {
        assert_eq!(message_number(&q("1/2"), 3, BITS).unwrap(), 3u32.into());
        assert_eq!(message_number(&q("1"), 4, BITS).unwrap(), 16u32.into());
        assert_eq!(message_number(&q("1/8"), 9, BITS).unwrap(), 3u32.into());
        assert_eq!(message_number(&q("1/3"), 1, BITS).unwrap(), 2u32.into());
        assert!(matches!(
            message_number(&q("0"), 3, BITS),
            Err(Error::NonPositive(_))
        ));
        assert!(matches!(
            message_number(&q("5"), 100, 64),
            Err(Error::BitLimit { .. })
        ));
    }

    #[test]
    fn message_number_is_the_exact_ceiling() {
        // m^den ≥ 2^(n·num) and (m−1)^den < 2^(n·num)
        for num in 1u32..=5 {
            for den in 1u32..=7 {
                for n in 1u32..=6 {
                    let rate = Rational::ratio(num as i64, den as i64);
                    let m = message_number(&rate, n, BITS).unwrap();
                    let target = BigUint::one() << (n * num) as u64;
                    assert!(m.pow(den) >= target);
                    assert!((&m - BigUint::one()).pow(den) < target);
                }
            }
        }
    }

    #[test]
    fn rate_test_examples() {
        let repeat = BlockCode::new(
            2,
            3,
            2,
            2,
            vec![vec![1, 1, 1], vec![2, 2, 2]],
            vec![1, 1, 1, 2, 1, 2, 2, 2],
        )
        .unwrap();
        assert!(rate_at_least(&repeat, &q("1/3")));
        assert!(!rate_at_least(&repeat, &q("1/2")));
        let trivial = BlockCode::new(1, 2, 2, 2, vec![vec![1, 1]], vec![1, 1, 1, 1]).unwrap();
        assert!(!rate_at_least(&trivial, &q("1/10")));
    }

    #[test]
    fn code_count_examples() {
        assert_eq!(code_count(2, 2, 2, 1).unwrap(), 16u32.into());
        assert_eq!(code_count(2, 2, 2, 3).unwrap(), 16384u32.into());
        assert_eq!(code_count(3, 5, 1, 2).unwrap(), 9u32.into());
    }

    #[test]
    fn full_enumeration_matches_count_and_is_duplicate_free() {
        for input_size in 1u32..=2 {
            for output_size in 1u32..=2 {
                for m in 1u64..=2 {
                    for n in 1u32..=2 {
                        let cursor = EnumerationCursor::new(
                            input_size,
                            output_size,
                            m,
                            n,
                            CursorMode::Full,
                            CELLS,
                        )
                        .unwrap();
                        let codes: Vec<_> = cursor.collect();
                        let expected = code_count(input_size, output_size, m, n).unwrap();
                        assert_eq!(BigUint::from(codes.len()), expected);
                        let distinct: HashSet<String> = codes
                            .iter()
                            .map(|c| serde_json::to_string(c).unwrap())
                            .collect();
                        assert_eq!(distinct.len(), codes.len());
                    }
                }
            }
        }
    }

    #[test]
    fn full_enumeration_starts_at_the_lexicographic_minimum() {
        let mut cursor = EnumerationCursor::new(2, 2, 2, 1, CursorMode::Full, CELLS).unwrap();
        let first = cursor.next_code().unwrap();
        assert_eq!(first.encoder(), &[vec![1], vec![1]]);
        assert_eq!(first.decoder(), &[1, 1]);
        assert_eq!(cursor.by_ref().count(), 15);
    }

    #[test]
    fn forced_decoder_with_one_message() {
        let cursor = EnumerationCursor::new(2, 2, 1, 1, CursorMode::Full, CELLS).unwrap();
        let codes: Vec<_> = cursor.collect();
        assert_eq!(codes.len(), 2);
        assert_eq!(codes[0].encoder(), &[vec![1]]);
        assert_eq!(codes[1].encoder(), &[vec![2]]);
        assert!(codes.iter().all(|c| c.decoder() == [1, 1]));
    }

    #[test]
    fn pruned_enumeration_counts_and_shape() {
        let kind = ChannelKind::Hamming;
        let only = EnumerationCursor::new(2, 2, 2, 1, CursorMode::Pruned(kind), CELLS)
            .unwrap()
            .collect::<Vec<_>>();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].encoder(), &[vec![1], vec![2]]);
        assert_eq!(only[0].decoder(), &[1, 2]);

        let pairs = EnumerationCursor::new(2, 2, 2, 3, CursorMode::Pruned(kind), CELLS)
            .unwrap()
            .collect::<Vec<_>>();
        assert_eq!(pairs.len(), 28); // C(8, 2)
        for code in &pairs {
            assert!(code.encoder()[0] < code.encoder()[1], "not ordered");
        }
    }

    #[test]
    fn pruned_is_empty_when_no_injective_encoder_exists() {
        let kind = ChannelKind::Hamming;
        let mut cursor = EnumerationCursor::new(1, 2, 2, 1, CursorMode::Pruned(kind), CELLS).unwrap();
        assert!(cursor.next_code().is_none());
        assert_eq!(cursor.total().unwrap(), BigUint::zero());
    }

    #[test]
    fn pruned_decoder_is_majority_vote_on_repetition_codewords() {
        let kind = ChannelKind::Hamming;
        let codes: Vec<_> = EnumerationCursor::new(2, 2, 2, 3, CursorMode::Pruned(kind), CELLS)
            .unwrap()
            .collect();
        let repetition = codes
            .iter()
            .find(|c| c.encoder() == [vec![1, 1, 1], vec![2, 2, 2]])
            .unwrap();
        assert_eq!(repetition.decoder(), &[1, 1, 1, 2, 1, 2, 2, 2]);
    }

    #[test]
    fn pruned_codes_appear_in_the_full_enumeration() {
        for n in 1u32..=2 {
            let full: HashSet<String> =
                EnumerationCursor::new(2, 2, 2, n, CursorMode::Full, CELLS)
                    .unwrap()
                    .map(|c| serde_json::to_string(&c).unwrap())
                    .collect();
            for code in
                EnumerationCursor::new(2, 2, 2, n, CursorMode::Pruned(ChannelKind::Hamming), CELLS)
                    .unwrap()
            {
                assert!(full.contains(&serde_json::to_string(&code).unwrap()));
            }
        }
    }

    #[test]
    fn seek_agrees_with_sequential_enumeration() {
        for mode in [CursorMode::Full, CursorMode::Pruned(ChannelKind::Hamming)] {
            let all: Vec<_> = EnumerationCursor::new(2, 2, 2, 2, mode.clone(), CELLS)
                .unwrap()
                .collect();
            for (i, expected) in all.iter().enumerate() {
                let mut cursor =
                    EnumerationCursor::new(2, 2, 2, 2, mode.clone(), CELLS).unwrap();
                cursor.seek(&BigUint::from(i)).unwrap();
                assert_eq!(&cursor.next_code().unwrap(), expected);
            }
            let mut past = EnumerationCursor::new(2, 2, 2, 2, mode.clone(), CELLS).unwrap();
            let total = past.total().unwrap();
            past.seek(&total).unwrap();
            assert!(past.next_code().is_none());
        }
    }

    #[test]
    fn code_json_round_trip_matches_schema() {
        let text = r#"{"m":2,"n":3,"M":2,"N":2,"encoder":[[1,1,1],[2,2,2]],"decoder":[1,1,1,2,1,2,2,2]}"#;
        let code = BlockCode::from_json(text).unwrap();
        assert_eq!(code.message_count(), 2);
        assert_eq!(code.decode(&[1, 2, 1]).unwrap(), 1);
        let back = serde_json::to_string(&code).unwrap();
        assert_eq!(serde_json::from_str::<BlockCode>(&back).unwrap(), code);
    }

    #[test]
    fn code_validation_rejects_malformed_tables() {
        let bad = [
            r#"{"m":2,"n":1,"M":2,"N":2,"encoder":[[1]],"decoder":[1,2]}"#,
            r#"{"m":2,"n":1,"M":2,"N":2,"encoder":[[1],[3]],"decoder":[1,2]}"#,
            r#"{"m":2,"n":1,"M":2,"N":2,"encoder":[[1],[2]],"decoder":[1]}"#,
            r#"{"m":2,"n":1,"M":2,"N":2,"encoder":[[1],[2]],"decoder":[1,3]}"#,
            r#"{"m":2,"n":1,"M":2,"N":2,"encoder":[[1],[2]],"decoder":[1,0]}"#,
            r#"{"m":0,"n":1,"M":2,"N":2,"encoder":[],"decoder":[1,1]}"#,
        ];
        for text in bad {
            assert!(BlockCode::from_json(text).is_err(), "accepted {text}");
        }
    }
}
