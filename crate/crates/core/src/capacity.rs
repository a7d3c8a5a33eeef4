//! Certified channel capacity via alternating maximization.
//!
//! Every bound that leaves this module is exact: logarithms are bracketed by
//! rational intervals with rigorous series remainders, mutual information and
//! divergence are assembled from those brackets with outward rounding, and
//! the iteration stops only when the certified sandwich
//! `I(p) ≤ C ≤ max_x D(W(·|x) ‖ pW)` is tighter than the requested 2^-n.
//! The update direction uses a dyadic approximation of 2^D; that choice can
//! only slow convergence, never invalidate a certificate, because the
//! sandwich holds for every exact input distribution.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::real::Budget;

/// Hard cap on the requested gap exponent; beyond this the iteration and
/// series work is unpayable.
const PRECISION_CAP: u64 = 4096;

/// Alternating-maximization iteration cap per query.
const MAX_ITERS: u32 = 20_000;

/// Rational interval [lo, hi] containing log2(q), of width at most 2^-n.
///
/// Argument reduction maps q to r ∈ [1, 2); log2(r) = ln(r)/ln(2) with both
/// logarithms bracketed by the atanh series and its explicit remainder
/// bound. Powers of two come out exact (width zero).
pub fn log2_bounds(q: &Rational, n: u32) -> Result<(Rational, Rational)> {
    if !q.is_positive() {
        return Err(Error::NonPositive(q.to_string()));
    }
    let k = floor_log2(q);
    let r = q.checked_div(&Rational::pow2(k))?;
    let k = Rational::from_integer(k);
    if r == Rational::one() {
        return Ok((k.clone(), k));
    }
    let err_bits = n + 4;
    let (ln_r_lo, ln_r_hi) = ln_bracket(&r, err_bits);
    let (ln2_lo, ln2_hi) = ln_bracket(&Rational::from_integer(2), err_bits);
    // r > 1, so all four endpoints are positive and division brackets divide
    // outward
    let lo = &k + &ln_r_lo.checked_div(&ln2_hi)?;
    let hi = &k + &ln_r_hi.checked_div(&ln2_lo)?;
    let lo = lo.floor_dyadic(n as u64 + 6);
    let hi = hi.ceil_dyadic(n as u64 + 6);
    debug_assert!(&hi - &lo <= Rational::pow2(-(n as i64)));
    Ok((lo, hi))
}

/// Exponent of the largest power of two not exceeding q.
fn floor_log2(q: &Rational) -> i64 {
    let mut k = q.numer().bits() as i64 - q.denom().bits() as i64;
    while Rational::pow2(k) > *q {
        k -= 1;
    }
    while Rational::pow2(k + 1) <= *q {
        k += 1;
    }
    k
}

/// [lo, hi] around ln(r) for r ∈ (1, 2], width ≤ 2^-err_bits, from
/// ln r = 2·atanh(z) with z = (r−1)/(r+1) ≤ 1/3:
/// remainder after the z^(2j+1) term is below 2·z^(2j+3)/((2j+3)(1−z²)).
fn ln_bracket(r: &Rational, err_bits: u32) -> (Rational, Rational) {
    let one = Rational::one();
    let z = (r - &one)
        .checked_div(&(r + &one))
        .expect("r + 1 > 0");
    let z2 = &z * &z;
    let tolerance = Rational::pow2(-(err_bits as i64));
    // 1/(1−z²) ≤ 9/8 for z ≤ 1/3
    let slack = Rational::ratio(9, 8);
    let mut sum = Rational::zero();
    let mut power = z.clone(); // z^(2j+1)
    let mut j = 0u32;
    loop {
        sum = &sum + &power.checked_div(&Rational::from_integer((2 * j + 1) as i64)).unwrap();
        power = &power * &z2;
        let remainder = &(&power.checked_div(&Rational::from_integer((2 * j + 3) as i64)).unwrap()
            * &slack)
            * &Rational::from_integer(2);
        if remainder <= tolerance {
            let lo = &sum * &Rational::from_integer(2);
            let hi = &lo + &remainder;
            return (lo, hi);
        }
        j += 1;
    }
}

/// Dyadic approximation of 2^t within relative error 2^-bits, always
/// positive. Used only to steer the capacity iteration.
pub(crate) fn exp2_approx(t: &Rational, bits: u32) -> Rational {
    let scale_bits = bits as u64 + 16;
    let digit_count = bits as u64 + 2;
    let (floor_negative, floor_mag) = t.floor_parts();
    let floor_exp = if floor_negative {
        -(floor_mag.to_i64().unwrap_or(i64::MAX / 2))
    } else {
        floor_mag.to_i64().unwrap_or(i64::MAX / 2)
    };
    let frac = t - &Rational::from_integer(floor_exp);
    // binary digits of floor(frac·2^digits), most significant first
    let digit_word = (frac.numer() << digit_count) / frac.denom();
    // roots[i] ≈ 2^(2^-(i+1)) in fixed point
    let mut acc = BigUint::one() << scale_bits;
    let mut root = (BigUint::from(2u32) << (2 * scale_bits)).sqrt();
    for i in 0..digit_count {
        if digit_word.bit(digit_count - 1 - i) {
            acc = (acc * &root) >> scale_bits;
        }
        root = (&root << scale_bits).sqrt();
    }
    let fractional = Rational::new(false, acc, BigUint::one() << scale_bits)
        .expect("scale is nonzero");
    &fractional * &Rational::pow2(floor_exp)
}

/// Approximation stream for the capacity of an exact channel.
///
/// `query(n)` returns the midpoint of a certified interval of width below
/// 2^-n around C; results are memoized per level so repeated queries are
/// free.
pub struct CapacityStream {
    rows: Vec<Vec<Rational>>,
    memo: Mutex<HashMap<u64, Rational>>,
}

impl CapacityStream {
    pub(crate) fn new(rows: Vec<Vec<Rational>>) -> Self {
        Self {
            rows,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn query(&self, n: u64, budget: &Budget) -> Result<Rational> {
        if n > PRECISION_CAP {
            return Err(Error::PrecisionOverflow);
        }
        if let Some(hit) = self.memo.lock().unwrap().get(&n) {
            return Ok(hit.clone());
        }
        let value = self.run(n as u32, budget)?;
        self.memo.lock().unwrap().insert(n, value.clone());
        Ok(value)
    }

    /// Certified interval [lo, hi] with lo ≤ C ≤ hi and hi − lo < 2^-n.
    pub fn certified_interval(&self, n: u32, budget: &Budget) -> Result<(Rational, Rational)> {
        self.iterate(n, budget)
    }

    fn run(&self, n: u32, budget: &Budget) -> Result<Rational> {
        let (lo, hi) = self.iterate(n, budget)?;
        let half = Rational::ratio(1, 2);
        let mid = &(&lo + &hi) * &half;
        // midpoint is within 2^-(n+1) of C; dyadic rounding keeps the
        // reported rational small and stays within the 2^-n contract
        Ok(mid.floor_dyadic(n as u64 + 8))
    }

    fn iterate(&self, n: u32, budget: &Budget) -> Result<(Rational, Rational)> {
        let input_size = self.rows.len();
        let output_size = self.rows[0].len();
        let prec = n + 8;
        let target = Rational::pow2(-(n as i64));
        let mult_bits = n + 24;
        let round_bits = 64u64.max(n as u64 + 32);

        // channel-entry log brackets never change across iterations
        let entry_logs: Vec<Vec<Option<(Rational, Rational)>>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|w| {
                        if w.is_zero() {
                            Ok(None)
                        } else {
                            log2_bounds(w, prec).map(Some)
                        }
                    })
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;

        let uniform = Rational::ratio(1, input_size as i64);
        let mut p: Vec<Rational> = vec![uniform; input_size];

        for _ in 0..MAX_ITERS {
            budget.consume((input_size * output_size) as u64)?;
            let mut out = vec![Rational::zero(); output_size];
            for (pi, row) in p.iter().zip(&self.rows) {
                for (oj, w) in out.iter_mut().zip(row) {
                    if !w.is_zero() {
                        *oj = &*oj + &(pi * w);
                    }
                }
            }
            let out_logs: Vec<Option<(Rational, Rational)>> = out
                .iter()
                .map(|q| {
                    if q.is_zero() {
                        Ok(None)
                    } else {
                        log2_bounds(q, prec).map(Some)
                    }
                })
                .collect::<Result<_>>()?;

            // divergence brackets D_i = Σ_j W_ij·(log2 W_ij − log2 q_j)
            let mut div_lo = Vec::with_capacity(input_size);
            let mut div_hi = Vec::with_capacity(input_size);
            for (row, logs) in self.rows.iter().zip(&entry_logs) {
                let mut lo = Rational::zero();
                let mut hi = Rational::zero();
                for j in 0..output_size {
                    let w = &row[j];
                    if w.is_zero() {
                        continue;
                    }
                    let (w_lo, w_hi) = logs[j].as_ref().expect("nonzero entry");
                    let (q_lo, q_hi) = out_logs[j].as_ref().expect("reachable output");
                    lo = &lo + &(w * &(w_lo - q_hi));
                    hi = &hi + &(w * &(w_hi - q_lo));
                }
                div_lo.push(lo);
                div_hi.push(hi);
            }

            // lower bound: I(p) = Σ_i p_i·D_i ≤ C; upper bound: max_i D_i ≥ C
            let mut lower = Rational::zero();
            for (pi, lo) in p.iter().zip(&div_lo) {
                lower = &lower + &(pi * lo);
            }
            let upper = div_hi
                .iter()
                .fold(div_hi[0].clone(), |acc, h| acc.max(h.clone()));

            if &upper - &lower < target {
                return Ok((lower, upper));
            }

            // steer: p_i ∝ p_i·2^(D_i), with D_i taken as its bracket
            // midpoint and 2^x approximated dyadically
            let half = Rational::ratio(1, 2);
            let mut next: Vec<Rational> = Vec::with_capacity(input_size);
            for i in 0..input_size {
                let mid = &(&div_lo[i] + &div_hi[i]) * &half;
                next.push(&p[i] * &exp2_approx(&mid, mult_bits));
            }
            let total = next.iter().fold(Rational::zero(), |acc, v| &acc + v);
            // dyadic rounding bounds coefficient growth; renormalizing
            // exactly keeps p a genuine distribution, which is all the
            // certificates need
            let mut rounded: Vec<Rational> = next
                .iter()
                .map(|v| {
                    let scaled = v.checked_div(&total).expect("total > 0");
                    let floored = scaled.floor_dyadic(round_bits);
                    if floored.is_zero() {
                        Rational::pow2(-(round_bits as i64))
                    } else {
                        floored
                    }
                })
                .collect();
            let mass = rounded.iter().fold(Rational::zero(), |acc, v| &acc + v);
            for value in &mut rounded {
                *value = value.checked_div(&mass).expect("mass > 0");
            }
            p = rounded;
        }
        Err(Error::CapacityBudget {
            precision: n as u64,
        })
    }
}
