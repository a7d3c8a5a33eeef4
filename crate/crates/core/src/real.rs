//! Computable real numbers as verified rational-approximation streams.
//!
//! A stream answers `query(n)` with a rational within 2^-n of its limit.
//! Queries are deterministic and pure, so streams can be shared freely
//! between threads. There is deliberately no equality or order predicate on
//! two streams: such a predicate cannot exist, and every consumer in this
//! crate works through one-sided dyadic tests instead.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::capacity::CapacityStream;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Work allowance shared by every stream evaluation in one task.
///
/// One unit is roughly one stream-node evaluation; the unbounded scans
/// (`rlb`, `rat_interpolation`) charge proportionally to their depth so a
/// violated precondition fails fast instead of grinding through ever larger
/// dyadics. The counter is atomic: a single budget may be shared by
/// concurrent queries.
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn consume(&self, steps: u64) -> Result<()> {
        let before = self.used.fetch_add(steps, Ordering::Relaxed);
        if before.saturating_add(steps) > self.limit {
            Err(Error::BudgetExhausted { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(DEFAULT_STEP_BUDGET)
    }
}

type SeriesFn = dyn Fn(u64) -> Rational + Send + Sync;

enum Kind {
    Constant(Rational),
    Sum(ComputableReal, ComputableReal),
    Product(ComputableReal, ComputableReal),
    Max(ComputableReal, ComputableReal),
    Capacity(CapacityStream),
    Series(Box<SeriesFn>),
}

struct Node {
    kind: Kind,
    /// Set when the whole subtree is constant-valued; the exact value is a
    /// valid approximation at every level, so queries short-circuit to it.
    exact: Option<Rational>,
}

/// A computable real number: a deterministic stream n ↦ qₙ with |x − qₙ| < 2^-n.
#[derive(Clone)]
pub struct ComputableReal {
    node: Arc<Node>,
}

impl ComputableReal {
    /// Constant stream: every level answers the rational itself.
    pub fn from_rational(q: Rational) -> Self {
        Self {
            node: Arc::new(Node {
                exact: Some(q.clone()),
                kind: Kind::Constant(q),
            }),
        }
    }

    pub(crate) fn from_capacity(stream: CapacityStream) -> Self {
        Self {
            node: Arc::new(Node {
                exact: None,
                kind: Kind::Capacity(stream),
            }),
        }
    }

    /// Wraps a raw approximation stream. The closure must satisfy the 2^-n
    /// contract; nothing here can check that, so this stays crate-private
    /// (unit tests use it to drive the composition schedules with
    /// non-constant operands).
    #[allow(dead_code)]
    pub(crate) fn from_fn(f: impl Fn(u64) -> Rational + Send + Sync + 'static) -> Self {
        Self {
            node: Arc::new(Node {
                exact: None,
                kind: Kind::Series(Box::new(f)),
            }),
        }
    }

    /// Sum stream: queries both operands one level deeper.
    pub fn add(&self, other: &Self) -> Self {
        let exact = match (&self.node.exact, &other.node.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Self {
            node: Arc::new(Node {
                exact,
                kind: Kind::Sum(self.clone(), other.clone()),
            }),
        }
    }

    /// Product stream. The operand level follows the magnitude-driven
    /// schedule K(n) = (M(x)+M(y))·2^(n+1) with M(x) = ⌈|query(0)|⌉ + 1.
    pub fn mul(&self, other: &Self) -> Self {
        let exact = match (&self.node.exact, &other.node.exact) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Self {
            node: Arc::new(Node {
                exact,
                kind: Kind::Product(self.clone(), other.clone()),
            }),
        }
    }

    /// Maximum stream: the levelwise rational maximum approximates the max.
    pub fn max(&self, other: &Self) -> Self {
        let exact = match (&self.node.exact, &other.node.exact) {
            (Some(a), Some(b)) => Some(a.clone().max(b.clone())),
            _ => None,
        };
        Self {
            node: Arc::new(Node {
                exact,
                kind: Kind::Max(self.clone(), other.clone()),
            }),
        }
    }

    /// The exact limit, when the stream is a constant composition.
    pub fn exact_value(&self) -> Option<&Rational> {
        self.node.exact.as_ref()
    }

    /// Kind tag, mainly for diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match &self.node.kind {
            Kind::Constant(_) => "rational-constant",
            Kind::Sum(..) => "sum",
            Kind::Product(..) => "product",
            Kind::Max(..) => "max",
            Kind::Capacity(_) => "capacity-stream",
            Kind::Series(_) => "user-series",
        }
    }

    /// Queries the approximation at level `n`: the result is within 2^-n of
    /// the stream's limit. Deterministic for fixed `n`.
    ///
    /// Budget accounting is batched per call: the walk counts its node
    /// evaluations locally and settles them in one shot, so concurrent
    /// queries do not contend on the shared counter at every node.
    pub fn query(&self, n: u64, budget: &Budget) -> Result<Rational> {
        let mut steps = 0u64;
        let result = self.query_walk(n, budget, &mut steps);
        budget.consume(steps)?;
        result
    }

    fn query_walk(&self, n: u64, budget: &Budget, steps: &mut u64) -> Result<Rational> {
        *steps += 1;
        if let Some(q) = &self.node.exact {
            return Ok(q.clone());
        }
        match &self.node.kind {
            Kind::Constant(q) => Ok(q.clone()),
            Kind::Sum(x, y) => {
                let level = n.checked_add(1).ok_or(Error::PrecisionOverflow)?;
                Ok(&x.query_walk(level, budget, steps)? + &y.query_walk(level, budget, steps)?)
            }
            Kind::Product(x, y) => {
                let mx = x.query_walk(0, budget, steps)?.ceil_abs() + 1u32;
                let my = y.query_walk(0, budget, steps)?.ceil_abs() + 1u32;
                let scale = (mx + my).to_u64().ok_or(Error::PrecisionOverflow)?;
                let level = n
                    .checked_add(1)
                    .and_then(|s| 1u64.checked_shl(u32::try_from(s).ok()?))
                    .and_then(|p| scale.checked_mul(p))
                    .ok_or(Error::PrecisionOverflow)?;
                Ok(&x.query_walk(level, budget, steps)? * &y.query_walk(level, budget, steps)?)
            }
            Kind::Max(x, y) => {
                let qx = x.query_walk(n, budget, steps)?;
                let qy = y.query_walk(n, budget, steps)?;
                Ok(qx.max(qy))
            }
            // capacity keeps its own per-iteration accounting so a runaway
            // refinement can still be cut off mid-flight
            Kind::Capacity(stream) => stream.query(n, budget),
            Kind::Series(f) => Ok(f(n)),
        }
    }
}

impl std::fmt::Debug for ComputableReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.node.exact {
            Some(q) => write!(f, "ComputableReal({} = {q})", self.kind_name()),
            None => write!(f, "ComputableReal({})", self.kind_name()),
        }
    }
}

/// One-sided dyadic threshold test: `query(b+2) < 2^-(b+1)`.
///
/// Sound: a `true` answer guarantees the limit is below 2^-b. Complete:
/// limits below 2^-(b+2) always answer `true`. Limits inside
/// [2^-(b+2), 2^-b) may answer either way; that indeterminacy is inherent,
/// not a defect.
pub fn dyadic_below(x: &ComputableReal, b: u64, budget: &Budget) -> Result<bool> {
    let level = b.checked_add(2).ok_or(Error::PrecisionOverflow)?;
    let approx = x.query(level, budget)?;
    Ok(approx < Rational::pow2(-((b + 1) as i64)))
}

/// Positive rational strictly below a positive stream limit: scans for the
/// first n with query(n) − 2^-n > 0 and returns that difference.
///
/// Diverges when the limit is ≤ 0; the budget turns that into an error.
pub fn rlb(epsilon: &ComputableReal, budget: &Budget) -> Result<Rational> {
    let mut n = 0u64;
    loop {
        budget.consume(n)?;
        let candidate = &epsilon.query(n, budget)? - &Rational::pow2(-(n as i64));
        if candidate.is_positive() {
            return Ok(candidate);
        }
        n = n.checked_add(1).ok_or(Error::PrecisionOverflow)?;
    }
}

/// A rational strictly between two stream limits alpha < beta: scans for the
/// first n at which the level-n approximations are provably separated
/// (difference above 2^(1-n)) and returns their midpoint.
///
/// Diverges when alpha ≥ beta; the budget turns that into an error.
pub fn rat_interpolation(
    alpha: &ComputableReal,
    beta: &ComputableReal,
    budget: &Budget,
) -> Result<Rational> {
    let half = Rational::ratio(1, 2);
    let mut n = 0u64;
    loop {
        budget.consume(n)?;
        let qa = alpha.query(n, budget)?;
        let qb = beta.query(n, budget)?;
        if &qb - &qa > Rational::pow2(1 - n as i64) {
            return Ok(&(&qa + &qb) * &half);
        }
        n = n.checked_add(1).ok_or(Error::PrecisionOverflow)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> Rational {
        text.parse().unwrap()
    }

    fn constant(text: &str) -> ComputableReal {
        ComputableReal::from_rational(q(text))
    }

    /// A non-constant but valid stream for `limit`: level n answers
    /// limit + (−1)^n·2^-(n+1).
    fn dithered(limit: Rational) -> ComputableReal {
        ComputableReal::from_fn(move |n| {
            let step = Rational::pow2(-(n as i64) - 1);
            if n % 2 == 0 {
                &limit + &step
            } else {
                &limit - &step
            }
        })
    }

    #[test]
    fn constants_answer_exactly_at_every_level() {
        let budget = Budget::default();
        let x = constant("1/3");
        assert_eq!(x.query(0, &budget).unwrap(), q("1/3"));
        assert_eq!(x.query(50, &budget).unwrap(), q("1/3"));
        assert_eq!(constant("0").query(7, &budget).unwrap(), q("0"));
        assert_eq!(constant("-5/4").query(0, &budget).unwrap(), q("-5/4"));
    }

    #[test]
    fn constant_compositions_propagate_exact_values() {
        let budget = Budget::default();
        let sum = constant("1/3").add(&constant("1/6"));
        assert_eq!(sum.query(0, &budget).unwrap(), q("1/2"));
        assert_eq!(sum.query(33, &budget).unwrap(), q("1/2"));
        let prod = constant("2/3").mul(&constant("3/4"));
        assert_eq!(prod.query(5, &budget).unwrap(), q("1/2"));
        assert_eq!(
            constant("5/2").mul(&constant("5/2")).query(0, &budget).unwrap(),
            q("25/4")
        );
        let max = constant("-1").max(&constant("0"));
        assert_eq!(max.query(9, &budget).unwrap(), q("0"));
        assert_eq!(sum.exact_value(), Some(&q("1/2")));
    }

    #[test]
    fn sum_schedule_shifts_operand_levels() {
        let budget = Budget::default();
        let x = dithered(q("1/3"));
        let zero = constant("0");
        let sum = x.add(&zero);
        for n in [0u64, 1, 5, 12] {
            let got = sum.query(n, &budget).unwrap();
            // operands answered at level n+1, so the sum is 1/3 ± 2^-(n+2)
            let err = (&got - &q("1/3")).abs();
            assert_eq!(err, Rational::pow2(-(n as i64) - 2));
        }
    }

    #[test]
    fn product_schedule_meets_contract_with_dithered_operands() {
        let budget = Budget::new(10_000_000);
        let x = dithered(q("5/3"));
        let y = dithered(q("-7/5"));
        let prod = x.mul(&y);
        let limit = q("5/3") * q("-7/5");
        for n in [0u64, 1, 4, 8] {
            let got = prod.query(n, &budget).unwrap();
            assert!((&got - &limit).abs() < Rational::pow2(-(n as i64)));
        }
    }

    #[test]
    fn max_schedule_meets_contract() {
        let budget = Budget::default();
        let x = dithered(q("1/4"));
        let y = dithered(q("1/2"));
        let max = x.max(&y);
        for n in [0u64, 3, 10] {
            let got = max.query(n, &budget).unwrap();
            assert!((&got - &q("1/2")).abs() < Rational::pow2(-(n as i64)));
        }
        let same = dithered(q("2/7")).max(&dithered(q("2/7")));
        assert!((&same.query(6, &budget).unwrap() - &q("2/7")).abs() < Rational::pow2(-6));
    }

    #[test]
    fn consistency_between_levels() {
        let budget = Budget::new(10_000_000);
        let streams = [
            dithered(q("3/7")),
            dithered(q("3/7")).add(&dithered(q("-1/9"))),
            dithered(q("1/2")).mul(&dithered(q("1/3"))),
            dithered(q("1/5")).max(&constant("1/6")),
        ];
        for s in &streams {
            for n in 0..12u64 {
                for m in 0..12u64 {
                    let gap = (&s.query(n, &budget).unwrap() - &s.query(m, &budget).unwrap()).abs();
                    assert!(gap <= Rational::pow2(-(n as i64)) + Rational::pow2(-(m as i64)));
                }
            }
        }
    }

    #[test]
    fn dyadic_below_examples() {
        let budget = Budget::default();
        assert!(dyadic_below(&constant("0"), 0, &budget).unwrap());
        assert!(dyadic_below(&constant("0"), 17, &budget).unwrap());
        assert!(!dyadic_below(&constant("5/32"), 2, &budget).unwrap());
        assert!(dyadic_below(&constant("5/32"), 1, &budget).unwrap());
    }

    #[test]
    fn dyadic_below_sound_and_complete_on_dithered_streams() {
        let budget = Budget::default();
        for num in 0i64..40 {
            let limit = Rational::ratio(num, 256); // spans the b = 3 bands
            let stream = dithered(limit.clone());
            let answer = dyadic_below(&stream, 3, &budget).unwrap();
            if answer {
                assert!(limit < Rational::pow2(-3), "unsound at {limit}");
            }
            if limit < Rational::pow2(-5) {
                assert!(answer, "incomplete at {limit}");
            }
        }
    }

    #[test]
    fn rlb_examples() {
        let budget = Budget::default();
        assert_eq!(rlb(&constant("1/3"), &budget).unwrap(), q("1/12"));
        assert_eq!(rlb(&constant("1"), &budget).unwrap(), q("1/2"));
        assert_eq!(rlb(&constant("1/1024"), &budget).unwrap(), q("1/2048"));
        // shifted-query sum stream: both operands answer exactly, so the
        // scan sees 1/2 at every level and stops at n = 2
        let sum = constant("1/4").add(&constant("1/4"));
        assert_eq!(rlb(&sum, &budget).unwrap(), q("1/4"));
    }

    #[test]
    fn rlb_output_is_a_positive_lower_bound() {
        let budget = Budget::default();
        for text in ["1/3", "2/7", "5", "1/100"] {
            let bound = rlb(&constant(text), &budget).unwrap();
            assert!(bound.is_positive());
            assert!(bound < q(text));
        }
    }

    #[test]
    fn rlb_on_nonpositive_limit_exhausts_budget() {
        let budget = Budget::new(5_000);
        assert!(matches!(
            rlb(&constant("0"), &budget),
            Err(Error::BudgetExhausted { .. })
        ));
        let budget = Budget::new(5_000);
        assert!(matches!(
            rlb(&constant("-2"), &budget),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn interpolation_examples() {
        let budget = Budget::default();
        assert_eq!(
            rat_interpolation(&constant("0"), &constant("1"), &budget).unwrap(),
            q("1/2")
        );
        assert_eq!(
            rat_interpolation(&constant("-1"), &constant("1"), &budget).unwrap(),
            q("0")
        );
        assert_eq!(
            rat_interpolation(&constant("1/4"), &constant("1/2"), &budget).unwrap(),
            q("3/8")
        );
    }

    #[test]
    fn interpolation_output_lies_strictly_between_limits() {
        let budget = Budget::default();
        let cases = [("1/3", "2/3"), ("-5/2", "-2"), ("0", "1/1000")];
        for (a, b) in cases {
            let got = rat_interpolation(&constant(a), &constant(b), &budget).unwrap();
            assert!(q(a) < got && got < q(b));
        }
        let dith = rat_interpolation(&dithered(q("1/4")), &dithered(q("3/4")), &budget).unwrap();
        assert!(q("1/4") < dith && dith < q("3/4"));
    }

    #[test]
    fn interpolation_on_reversed_limits_exhausts_budget() {
        let budget = Budget::new(5_000);
        assert!(matches!(
            rat_interpolation(&constant("1"), &constant("0"), &budget),
            Err(Error::BudgetExhausted { .. })
        ));
        let budget = Budget::new(5_000);
        assert!(matches!(
            rat_interpolation(&constant("1/2"), &constant("1/2"), &budget),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
