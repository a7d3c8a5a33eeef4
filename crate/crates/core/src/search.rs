//! The exhaustive code search and its computable-real extensions.
//!
//! For n = 1, 2, … the search enumerates the blocklength-n family in
//! canonical order and returns the first candidate passing the dyadic error
//! test at b = blb(ε). Candidates are evaluated in fixed-size chunks;
//! within a chunk evaluation may run on worker threads, but a passer is
//! accepted only at the smallest canonical position, so every worker count
//! returns the same report.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::channel::{Channel, ChannelMode};
use crate::code::{
    message_number, next_combination, pruned_candidate, rate_at_least, rate_check_terms,
    BlockCode, ChannelKind, CursorMode, EnumerationCursor,
};
use crate::error::{Error, Result};
use crate::lambda::{achieves_error, lambda_max_exact, RowTable};
use crate::par::Exec;
use crate::rational::{blb, Rational};
use crate::real::{rat_interpolation, rlb, Budget, ComputableReal};

const CHUNK: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchMode {
    /// Every encoder/decoder pair.
    Full,
    /// Injective, lexicographically ordered encoders with the
    /// minimum-Hamming-distance decoder (ties to the smallest message).
    /// Sound — every returned code meets the tolerance — but the fixed
    /// tie-break means the minimal blocklength may exceed full mode's, and
    /// distance decoding is maximum-likelihood only on symmetric channels.
    Pruned,
}

impl SearchMode {
    fn cursor_mode(self) -> CursorMode {
        match self {
            SearchMode::Full => CursorMode::Full,
            SearchMode::Pruned => CursorMode::Pruned(ChannelKind::Hamming),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Full => "full",
            SearchMode::Pruned => "pruned",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub max_blocklength: u32,
    pub cell_limit: u64,
    pub bit_limit: u64,
    pub step_budget: u64,
    /// 0 = default pool size, 1 = sequential, k = k worker threads.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Full,
            max_blocklength: 16,
            cell_limit: 1 << 26,
            bit_limit: 1_000_000,
            step_budget: crate::real::DEFAULT_STEP_BUDGET,
            workers: 0,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct RateCheck {
    pub m_pow_den: String,
    pub two_pow_n_num: String,
}

#[derive(Serialize, Debug)]
pub struct SearchReport {
    pub n: u32,
    pub m: u64,
    pub code: BlockCode,
    /// Exact λ_max of the returned code (exact-mode channels).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<Rational>,
    /// Sound witness bound 2^-b on λ_max (stream-mode channels).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max_bound: Option<Rational>,
    pub rate_check: RateCheck,
    /// Per blocklength 1..=n: canonical position of the passer at the final
    /// blocklength, full family size for the exhausted ones.
    pub candidates_examined: Vec<u64>,
    pub mode: String,
    /// The rate the search actually ran with.
    pub rate: Rational,
    /// Rational lower bound substituted for a stream-valued ε.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_lower_bound: Option<Rational>,
}

/// Finds the first code, in canonical order over growing blocklengths, whose
/// maximum block error probability passes the dyadic test for ε.
///
/// Terminates with a code whenever R < C(channel); otherwise the blocklength
/// cap converts the inherent divergence into a structured resource error.
pub fn find_code(
    channel: &Channel,
    rate: &Rational,
    epsilon: &Rational,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    if !rate.is_positive() {
        return Err(Error::NonPositive(rate.to_string()));
    }
    let b = blb(epsilon)?;
    let budget = Budget::new(opts.step_budget);
    let exec = Exec::new(opts.workers)?;
    let mut examined: Vec<u64> = Vec::new();

    for n in 1..=opts.max_blocklength {
        let m_big = message_number(rate, n, opts.bit_limit)?;
        let m = m_big.to_u64().ok_or_else(|| Error::CellLimit {
            cells: format!("m = {m_big}"),
            limit: opts.cell_limit,
        })?;
        let table = match channel.mode() {
            ChannelMode::Exact => RowTable::build(channel, n),
            ChannelMode::Stream => None,
        };
        let passes = |code: &BlockCode| -> Result<bool> {
            match &table {
                Some(table) => Ok(table.passes(code, b)),
                None => achieves_error(code, channel, b, &budget),
            }
        };

        let outcome = match opts.mode {
            SearchMode::Full => {
                let cursor = EnumerationCursor::new(
                    channel.input_size(),
                    channel.output_size(),
                    m,
                    n,
                    opts.mode.cursor_mode(),
                    opts.cell_limit,
                )?;
                scan_family(cursor, &exec, passes)?
            }
            SearchMode::Pruned => scan_pruned(channel, m, n, opts, &exec, passes)?,
        };

        match outcome {
            Scan::Found { position, code } => {
                examined.push(position + 1);
                return finish_report(channel, code, rate, Found { n, m, b }, examined, opts);
            }
            Scan::Exhausted { total } => examined.push(total),
        }
    }
    Err(Error::BlocklengthExceeded {
        max_blocklength: opts.max_blocklength,
        candidates_examined: examined,
    })
}

enum Scan {
    Found { position: u64, code: BlockCode },
    Exhausted { total: u64 },
}

/// Chunked scan over a code iterator: within each fixed-size chunk the
/// verdicts may be computed in parallel, and only the smallest passing
/// canonical position is accepted.
fn scan_family(
    mut candidates: impl Iterator<Item = BlockCode>,
    exec: &Exec,
    passes: impl Fn(&BlockCode) -> Result<bool> + Send + Sync,
) -> Result<Scan> {
    let mut seen: u64 = 0;
    let mut chunk = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        chunk.extend(candidates.by_ref().take(CHUNK));
        if chunk.is_empty() {
            return Ok(Scan::Exhausted { total: seen });
        }
        let verdicts = exec.map(&chunk, |code| passes(code));
        for (offset, verdict) in verdicts.into_iter().enumerate() {
            if verdict? {
                return Ok(Scan::Found {
                    position: seen + offset as u64,
                    code: chunk.swap_remove(offset),
                });
            }
        }
        seen += chunk.len() as u64;
    }
}

/// Pruned scan: codeword-rank combinations enumerate sequentially (they are
/// a few words of state each), while encoder materialization, decoder
/// construction, and the error test all run inside the parallel region.
fn scan_pruned(
    channel: &Channel,
    m: u64,
    n: u32,
    opts: &SearchOptions,
    exec: &Exec,
    passes: impl Fn(&BlockCode) -> Result<bool> + Send + Sync,
) -> Result<Scan> {
    let table_len = crate::channel::checked_pow(channel.output_size() as u64, n)?;
    if table_len > opts.cell_limit {
        return Err(Error::CellLimit {
            cells: table_len.to_string(),
            limit: opts.cell_limit,
        });
    }
    let codewords = crate::channel::checked_pow(channel.input_size() as u64, n)?;
    if m > codewords {
        return Ok(Scan::Exhausted { total: 0 });
    }
    let mut seen: u64 = 0;
    let mut current: Vec<u64> = (1..=m).collect();
    let mut done = false;
    let mut chunk: Vec<Vec<u64>> = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        while !done && chunk.len() < CHUNK {
            chunk.push(current.clone());
            done = !next_combination(&mut current, codewords);
        }
        if chunk.is_empty() {
            return Ok(Scan::Exhausted { total: seen });
        }
        let verdicts = exec.map(&chunk, |ranks| -> Result<Option<BlockCode>> {
            let code = pruned_candidate(channel.input_size(), channel.output_size(), n, ranks);
            Ok(passes(&code)?.then_some(code))
        });
        for (offset, verdict) in verdicts.into_iter().enumerate() {
            if let Some(code) = verdict? {
                return Ok(Scan::Found {
                    position: seen + offset as u64,
                    code,
                });
            }
        }
        seen += chunk.len() as u64;
    }
}

struct Found {
    n: u32,
    m: u64,
    b: u64,
}

fn finish_report(
    channel: &Channel,
    code: BlockCode,
    rate: &Rational,
    found: Found,
    candidates_examined: Vec<u64>,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    let Found { n, m, b } = found;
    debug_assert!(rate_at_least(&code, rate));
    let (m_pow, two_pow) = rate_check_terms(m, n, rate);
    let (lambda_max, lambda_max_bound) = match channel.mode() {
        ChannelMode::Exact => {
            let exact = lambda_max_exact(&code, channel)?;
            debug_assert!(exact < Rational::pow2(-(b as i64)));
            (Some(exact), None)
        }
        ChannelMode::Stream => (None, Some(Rational::pow2(-(b as i64)))),
    };
    Ok(SearchReport {
        n,
        m,
        code,
        lambda_max,
        lambda_max_bound,
        rate_check: RateCheck {
            m_pow_den: m_pow.to_string(),
            two_pow_n_num: two_pow.to_string(),
        },
        candidates_examined,
        mode: opts.mode.as_str().to_string(),
        rate: rate.clone(),
        epsilon_lower_bound: None,
    })
}

/// Search with a stream-valued error tolerance: substitutes the rational
/// lower bound rlb(ε) and runs the rational search with it.
pub fn find_code_ext(
    channel: &Channel,
    rate: &Rational,
    epsilon: &ComputableReal,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    let budget = Budget::new(opts.step_budget);
    let bound = rlb(epsilon, &budget)?;
    let mut report = find_code(channel, rate, &bound, opts)?;
    report.epsilon_lower_bound = Some(bound);
    Ok(report)
}

/// k-th element of a capacity-achieving sequence: picks a rational rate
/// strictly inside (C − 1/k, C) by interpolation against the certified
/// capacity stream, then searches with tolerance 1/k.
pub fn capacity_sequence(channel: &Channel, k: u64, opts: &SearchOptions) -> Result<SearchReport> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let capacity = channel.capacity_stream()?;
    let budget = Budget::new(opts.step_budget);
    let offset = ComputableReal::from_rational(-Rational::new(
        false,
        1u32.into(),
        k.into(),
    )?);
    let target = capacity.add(&offset);
    let rate = rat_interpolation(&target, &capacity, &budget)?;
    if !rate.is_positive() {
        return Err(Error::InfeasibleK {
            rate: rate.to_string(),
        });
    }
    let epsilon = Rational::new(false, 1u32.into(), k.into())?;
    find_code(channel, &rate, &epsilon, opts)
}
