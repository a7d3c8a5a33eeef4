//! Monte Carlo transmission simulator for empirical cross-validation.
//!
//! Sampling is inverse-CDF over the exact rational row distributions: a
//! uniform 64-bit draw u is interpreted as u/2^64 and compared against exact
//! cumulative thresholds, so no floating point enters the path and counts
//! are identical on every platform. The generator is ChaCha8 seeded from the
//! 64-bit master seed, with one independent substream per (message,
//! trial-block); counts merge by addition, so any parallel schedule produces
//! the same result.

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{Channel, ChannelMode};
use crate::code::BlockCode;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rational::Rational;

const TRIALS_PER_BLOCK: u64 = 4096;

#[derive(Serialize, PartialEq, Eq, Debug)]
pub struct SimulationResult {
    pub per_message_trials: u64,
    pub per_message_errors: Vec<u64>,
    pub empirical_rates: Vec<Rational>,
    pub seed: u64,
}

/// Exact cumulative thresholds for one channel row: output symbol y is
/// selected by the first threshold with u·den < num·2^64.
struct RowSampler {
    thresholds: Vec<(BigUint, BigUint)>, // (num << 64, den) per cumulative sum
}

impl RowSampler {
    fn new(channel: &Channel, x: u32) -> Self {
        let mut cumulative = Rational::zero();
        let thresholds = (1..=channel.output_size())
            .map(|y| {
                cumulative = &cumulative + channel.exact_entry(x, y);
                (cumulative.numer() << 64u32, cumulative.denom().clone())
            })
            .collect();
        Self { thresholds }
    }

    fn draw(&self, u: u64) -> u32 {
        let u = BigUint::from(u);
        for (y, (num, den)) in self.thresholds.iter().enumerate() {
            if &u * den < *num {
                return y as u32 + 1;
            }
        }
        // row sums to exactly 1, so the last threshold always catches u
        self.thresholds.len() as u32
    }
}

pub fn simulate(
    code: &BlockCode,
    channel: &Channel,
    trials_per_message: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationResult> {
    if channel.mode() != ChannelMode::Exact {
        return Err(Error::InvalidInput(
            "simulation requires an exact-mode channel".into(),
        ));
    }
    if code.input_size() != channel.input_size() || code.output_size() != channel.output_size() {
        return Err(Error::AlphabetMismatch {
            code: format!("M={}, N={}", code.input_size(), code.output_size()),
            channel: format!("M={}, N={}", channel.input_size(), channel.output_size()),
        });
    }
    let samplers: Vec<RowSampler> = (1..=channel.input_size())
        .map(|x| RowSampler::new(channel, x))
        .collect();
    // place-value weights for the lexicographic rank of a received word
    let n = code.blocklength() as usize;
    let mut weights = vec![1u64; n];
    for k in (0..n.saturating_sub(1)).rev() {
        weights[k] = weights[k + 1]
            .checked_mul(code.output_size() as u64)
            .ok_or(Error::PrecisionOverflow)?;
    }

    let mut tasks = Vec::new();
    for d in 1..=code.message_count() {
        let mut remaining = trials_per_message;
        let mut block = 0u64;
        while remaining > 0 {
            let batch = remaining.min(TRIALS_PER_BLOCK);
            tasks.push((d, block, batch));
            remaining -= batch;
            block += 1;
        }
        if block > u32::MAX as u64 {
            return Err(Error::PrecisionOverflow);
        }
    }

    let exec = Exec::new(workers)?;
    let counts = exec.map(&tasks, |&(d, block, batch)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((d - 1) << 32 | block);
        let codeword = code.codeword(d);
        let mut errors = 0u64;
        for _ in 0..batch {
            let mut rank = 0u64;
            for (k, &x) in codeword.iter().enumerate() {
                let y = samplers[(x - 1) as usize].draw(rng.next_u64());
                rank += (y as u64 - 1) * weights[k];
            }
            if code.decoder()[rank as usize] as u64 != d {
                errors += 1;
            }
        }
        (d, errors)
    });

    let mut per_message_errors = vec![0u64; code.message_count() as usize];
    for (d, errors) in counts {
        per_message_errors[(d - 1) as usize] += errors;
    }
    let empirical_rates = per_message_errors
        .iter()
        .map(|&errors| {
            if trials_per_message == 0 {
                Rational::zero()
            } else {
                Rational::new(false, errors.into(), trials_per_message.into())
                    .expect("trials > 0")
            }
        })
        .collect();
    Ok(SimulationResult {
        per_message_trials: trials_per_message,
        per_message_errors,
        empirical_rates,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::BlockCode;
    use crate::lambda::lambda_message_exact;
    use crate::testutil::{bec_half, bsc, noiseless, repetition_code};

    #[test]
    fn noiseless_simulation_never_errs() {
        let result = simulate(&repetition_code(1), &noiseless(), 2_000, 7, 1).unwrap();
        assert_eq!(result.per_message_errors, vec![0, 0]);
        assert_eq!(result.empirical_rates, vec![Rational::zero(); 2]);
    }

    #[test]
    fn zero_trials_give_zero_counts() {
        let result = simulate(&repetition_code(3), &bsc("1/4"), 0, 99, 1).unwrap();
        assert_eq!(result.per_message_errors, vec![0, 0]);
        assert_eq!(result.per_message_trials, 0);
    }

    #[test]
    fn counts_are_reproducible_and_schedule_independent() {
        let code = repetition_code(3);
        let channel = bsc("1/4");
        let a = simulate(&code, &channel, 20_000, 1234, 1).unwrap();
        let b = simulate(&code, &channel, 20_000, 1234, 1).unwrap();
        let c = simulate(&code, &channel, 20_000, 1234, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let other_seed = simulate(&code, &channel, 20_000, 1235, 1).unwrap();
        assert_ne!(a.per_message_errors, other_seed.per_message_errors);
    }

    #[test]
    fn empirical_rates_track_exact_probabilities() {
        let code = repetition_code(3);
        let channel = bsc("1/4");
        let trials = 100_000u64;
        let result = simulate(&code, &channel, trials, 20240521, 0).unwrap();
        for d in 1..=2u64 {
            let exact = lambda_message_exact(&code, &channel, d)
                .unwrap()
                .to_f64();
            let observed = result.empirical_rates[(d - 1) as usize].to_f64();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (observed - exact).abs() < 4.0 * sigma,
                "message {d}: observed {observed}, exact {exact}"
            );
        }
    }

    #[test]
    fn statistical_consistency_over_the_standard_test_set() {
        let trials = 100_000u64;
        // identity code over BSC(1/100): λ = 1/100 per message
        let result = simulate(&repetition_code(1), &bsc("1/100"), trials, 31337, 0).unwrap();
        let exact = 0.01f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        for rate in &result.empirical_rates {
            assert!((rate.to_f64() - exact).abs() < 4.0 * sigma);
        }
        // 2-repetition over the erasure channel with erasures decoded as
        // message 1: λ_1 = 0 exactly, λ_2 = 1/4
        let channel = bec_half();
        let decoder = crate::channel::Words::new(3, 2)
            .map(|word| {
                if word.contains(&1) {
                    1
                } else if word.contains(&2) {
                    2
                } else {
                    1
                }
            })
            .collect();
        let code = BlockCode::new(2, 2, 2, 3, vec![vec![1, 1], vec![2, 2]], decoder).unwrap();
        let result = simulate(&code, &channel, trials, 31337, 0).unwrap();
        assert_eq!(result.per_message_errors[0], 0);
        let exact = 0.25f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((result.empirical_rates[1].to_f64() - exact).abs() < 4.0 * sigma);
    }

    #[test]
    fn per_symbol_sampling_matches_the_row_distribution() {
        let channel = bec_half();
        let sampler = RowSampler::new(&channel, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 1_000_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..draws {
            counts[(sampler.draw(rng.next_u64()) - 1) as usize] += 1;
        }
        // row is (1/2, 0, 1/2): the middle symbol must never appear
        assert_eq!(counts[1], 0);
        for &count in &[counts[0], counts[2]] {
            let expected = draws as f64 * 0.5;
            let sigma = (draws as f64 * 0.25).sqrt();
            assert!((count as f64 - expected).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn stream_channels_are_rejected() {
        let budget = crate::real::Budget::default();
        let channel = Channel::from_json(
            r#"{"input_size":2,"output_size":2,
                "rows":[["(rat 1)","(rat 0)"],["(rat 0)","(rat 1)"]]}"#,
            &budget,
        )
        .unwrap();
        assert!(simulate(&repetition_code(1), &channel, 10, 0, 1).is_err());
    }
}
