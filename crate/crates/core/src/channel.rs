//! Discrete memoryless channels as stochastic matrices.
//!
//! Entries are either exact rationals or approximation streams; a channel
//! never mixes the two. Exact channels are validated exactly; stream
//! channels are validated to precision 2^-20, which is the best any
//! algorithm can do for stream entries.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::real::{Budget, ComputableReal};

pub const DEFAULT_CELL_LIMIT: u64 = 1 << 26;

/// Validation precision for stream-mode channels.
const STREAM_CHECK_BITS: i64 = 20;

#[derive(Clone)]
pub enum Rows {
    Exact(Vec<Vec<Rational>>),
    Stream(Vec<Vec<ComputableReal>>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChannelMode {
    Exact,
    Stream,
}

#[derive(Clone)]
pub struct Channel {
    input_size: u32,
    output_size: u32,
    rows: Rows,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    input_size: u32,
    output_size: u32,
    rows: Vec<Vec<String>>,
}

impl Channel {
    /// Builds an exact-mode channel, checking stochasticity exactly.
    pub fn exact(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let (input_size, output_size) = dimensions(rows.len(), rows.iter().map(|r| r.len()))?;
        let one = Rational::one();
        for (i, row) in rows.iter().enumerate() {
            let mut sum = Rational::zero();
            for (j, entry) in row.iter().enumerate() {
                if entry.is_negative() || entry > &one {
                    return Err(Error::EntryRange {
                        row: i + 1,
                        col: j + 1,
                        value: entry.to_string(),
                    });
                }
                sum = &sum + entry;
            }
            if sum != one {
                return Err(Error::RowSum {
                    row: i + 1,
                    sum: sum.to_string(),
                });
            }
        }
        Ok(Self {
            input_size,
            output_size,
            rows: Rows::Exact(rows),
        })
    }

    /// Builds a stream-mode channel. Entries and row sums are checked at
    /// precision 2^-20: values that provably violate [0,1] or row-sum 1 by
    /// more than the approximation slack are rejected. Exact verification is
    /// impossible for streams, so this is a documented soundness caveat.
    pub fn stream(rows: Vec<Vec<ComputableReal>>, budget: &Budget) -> Result<Self> {
        let (input_size, output_size) = dimensions(rows.len(), rows.iter().map(|r| r.len()))?;
        let slack = Rational::pow2(-STREAM_CHECK_BITS);
        let lo = -slack.clone();
        let hi = &Rational::one() + &slack;
        for (i, row) in rows.iter().enumerate() {
            let mut sum = ComputableReal::from_rational(Rational::zero());
            for (j, entry) in row.iter().enumerate() {
                let approx = entry.query(STREAM_CHECK_BITS as u64, budget)?;
                if approx < lo || approx > hi {
                    return Err(Error::EntryRange {
                        row: i + 1,
                        col: j + 1,
                        value: format!("~{approx}"),
                    });
                }
                sum = sum.add(entry);
            }
            let total = sum.query(STREAM_CHECK_BITS as u64, budget)?;
            if (&total - &Rational::one()).abs() > slack {
                return Err(Error::RowSum {
                    row: i + 1,
                    sum: format!("~{total}"),
                });
            }
        }
        Ok(Self {
            input_size,
            output_size,
            rows: Rows::Stream(rows),
        })
    }

    /// Parses the UTF-8 JSON channel document. Entries are rational strings
    /// (`"3/4"`) for an exact channel or stream expressions (`"(rat 3/4)"`)
    /// for a stream channel; the two syntaxes must not be mixed.
    pub fn from_json(text: &str, budget: &Budget) -> Result<Self> {
        let file: ChannelFile =
            serde_json::from_str(text).map_err(|e| Error::ChannelFormat(e.to_string()))?;
        if file.rows.len() != file.input_size as usize
            || file
                .rows
                .iter()
                .any(|r| r.len() != file.output_size as usize)
        {
            return Err(Error::ChannelFormat(format!(
                "rows must form a {}x{} matrix",
                file.input_size, file.output_size
            )));
        }
        let any_stream = file
            .rows
            .iter()
            .flatten()
            .any(|s| s.trim_start().starts_with('('));
        if any_stream {
            let rows = file
                .rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| {
                            if !s.trim_start().starts_with('(') {
                                return Err(Error::ChannelFormat(format!(
                                    "entry `{s}` mixes rational syntax into a stream channel; \
                                     write `(rat {s})`"
                                )));
                            }
                            crate::expr::parse_stream(s)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Self::stream(rows, budget)
        } else {
            let rows = file
                .rows
                .iter()
                .map(|row| row.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Self::exact(rows)
        }
    }

    pub fn input_size(&self) -> u32 {
        self.input_size
    }

    pub fn output_size(&self) -> u32 {
        self.output_size
    }

    pub fn mode(&self) -> ChannelMode {
        match self.rows {
            Rows::Exact(_) => ChannelMode::Exact,
            Rows::Stream(_) => ChannelMode::Stream,
        }
    }

    /// Transition probability for 1-based symbols, exact mode.
    pub fn exact_entry(&self, x: u32, y: u32) -> &Rational {
        match &self.rows {
            Rows::Exact(rows) => &rows[(x - 1) as usize][(y - 1) as usize],
            Rows::Stream(_) => panic!("exact_entry on a stream-mode channel"),
        }
    }

    pub fn exact_rows(&self) -> Option<&Vec<Vec<Rational>>> {
        match &self.rows {
            Rows::Exact(rows) => Some(rows),
            Rows::Stream(_) => None,
        }
    }

    /// Transition probability as a stream, either mode.
    pub fn entry_stream(&self, x: u32, y: u32) -> ComputableReal {
        match &self.rows {
            Rows::Exact(rows) => {
                ComputableReal::from_rational(rows[(x - 1) as usize][(y - 1) as usize].clone())
            }
            Rows::Stream(rows) => rows[(x - 1) as usize][(y - 1) as usize].clone(),
        }
    }

    /// n-th Kronecker power: the channel over length-n words, with entry
    /// ((lex rank of x̄), (lex rank of ȳ)) equal to ∏ₖ H[x̄ₖ][ȳₖ].
    pub fn kron_power(&self, n: u32, cell_limit: u64) -> Result<Channel> {
        if n == 0 {
            return Err(Error::InvalidInput("Kronecker power needs n >= 1".into()));
        }
        let rows_out = checked_pow(self.input_size as u64, n)?;
        let cols_out = checked_pow(self.output_size as u64, n)?;
        let cells = rows_out
            .checked_mul(cols_out)
            .ok_or_else(|| Error::CellLimit {
                cells: format!("{}^{} * {}^{}", self.input_size, n, self.output_size, n),
                limit: cell_limit,
            })?;
        if cells > cell_limit {
            return Err(Error::CellLimit {
                cells: cells.to_string(),
                limit: cell_limit,
            });
        }
        let out_input = u32::try_from(rows_out).map_err(|_| Error::CellLimit {
            cells: rows_out.to_string(),
            limit: cell_limit,
        })?;
        let out_output = u32::try_from(cols_out).map_err(|_| Error::CellLimit {
            cells: cols_out.to_string(),
            limit: cell_limit,
        })?;
        let input_words = Words::new(self.input_size, n as usize);
        match &self.rows {
            Rows::Exact(_) => {
                let rows = input_words
                    .map(|xs| {
                        Words::new(self.output_size, n as usize)
                            .map(|ys| {
                                let mut product = Rational::one();
                                for (x, y) in xs.iter().zip(&ys) {
                                    product = &product * self.exact_entry(*x, *y);
                                }
                                product
                            })
                            .collect()
                    })
                    .collect();
                Ok(Channel {
                    input_size: out_input,
                    output_size: out_output,
                    rows: Rows::Exact(rows),
                })
            }
            Rows::Stream(_) => {
                let rows = input_words
                    .map(|xs| {
                        Words::new(self.output_size, n as usize)
                            .map(|ys| {
                                let mut product =
                                    ComputableReal::from_rational(Rational::one());
                                for (x, y) in xs.iter().zip(&ys) {
                                    product = product.mul(&self.entry_stream(*x, *y));
                                }
                                product
                            })
                            .collect()
                    })
                    .collect();
                Ok(Channel {
                    input_size: out_input,
                    output_size: out_output,
                    rows: Rows::Stream(rows),
                })
            }
        }
    }

    /// Certified capacity stream; exact-mode channels only.
    pub fn capacity_stream(&self) -> Result<ComputableReal> {
        match &self.rows {
            Rows::Exact(rows) => Ok(ComputableReal::from_capacity(
                crate::capacity::CapacityStream::new(rows.clone()),
            )),
            Rows::Stream(_) => Err(Error::InvalidInput(
                "capacity requires an exact-mode channel".into(),
            )),
        }
    }

    /// Certified interval [lo, hi] with lo ≤ C ≤ hi and width below 2^-n.
    pub fn capacity_interval(&self, n: u32, budget: &Budget) -> Result<(Rational, Rational)> {
        match &self.rows {
            Rows::Exact(rows) => crate::capacity::CapacityStream::new(rows.clone())
                .certified_interval(n, budget),
            Rows::Stream(_) => Err(Error::InvalidInput(
                "capacity requires an exact-mode channel".into(),
            )),
        }
    }
}

fn dimensions(row_count: usize, col_counts: impl Iterator<Item = usize>) -> Result<(u32, u32)> {
    let input_size =
        u32::try_from(row_count).map_err(|_| Error::ChannelFormat("too many rows".into()))?;
    if input_size == 0 {
        return Err(Error::ChannelFormat("channel needs at least one row".into()));
    }
    let mut cols = None;
    for c in col_counts {
        match cols {
            None => cols = Some(c),
            Some(first) if first != c => {
                return Err(Error::ChannelFormat("ragged matrix".into()))
            }
            _ => {}
        }
    }
    let output_size = u32::try_from(cols.unwrap_or(0))
        .map_err(|_| Error::ChannelFormat("too many columns".into()))?;
    if output_size == 0 {
        return Err(Error::ChannelFormat(
            "channel needs at least one column".into(),
        ));
    }
    Ok((input_size, output_size))
}

pub(crate) fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp).ok_or(Error::PrecisionOverflow)
}

/// 1-based rank of a word in the lexicographic enumeration of [alphabet]^len:
/// 1 + Σᵢ (wordᵢ − 1)·alphabet^(len−1−i).
pub fn lex_order(word: &[u32], alphabet: u32) -> Result<u64> {
    let mut rank: u64 = 0;
    for &symbol in word {
        if symbol == 0 || symbol > alphabet {
            return Err(Error::SymbolRange {
                symbol: symbol as u64,
                alphabet: alphabet as u64,
            });
        }
        rank = rank
            .checked_mul(alphabet as u64)
            .and_then(|r| r.checked_add((symbol - 1) as u64))
            .ok_or(Error::PrecisionOverflow)?;
    }
    Ok(rank + 1)
}

/// Word of the given 1-based lexicographic rank; inverse of [`lex_order`].
pub fn word_of_rank(rank: u64, alphabet: u32, len: usize) -> Vec<u32> {
    let mut rest = rank - 1;
    let mut word = vec![1u32; len];
    for slot in word.iter_mut().rev() {
        *slot = (rest % alphabet as u64) as u32 + 1;
        rest /= alphabet as u64;
    }
    word
}

/// In-place lexicographic odometer step over 1-based symbols; returns false
/// on wrap-around.
pub(crate) fn advance_word(word: &mut [u32], alphabet: u32) -> bool {
    for slot in word.iter_mut().rev() {
        if *slot < alphabet {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}

/// Lexicographic iterator over [alphabet]^len.
pub struct Words {
    current: Option<Vec<u32>>,
    alphabet: u32,
}

impl Words {
    pub fn new(alphabet: u32, len: usize) -> Self {
        Self {
            current: Some(vec![1; len]),
            alphabet,
        }
    }
}

impl Iterator for Words {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let word = self.current.take()?;
        let mut next = word.clone();
        if advance_word(&mut next, self.alphabet) {
            self.current = Some(next);
        }
        Some(word)
    }
}
