//! Exact signed rational arithmetic over arbitrary-precision integers.
//!
//! A value is a sign together with a non-negative numerator and a positive
//! denominator, kept in canonical form after every operation: the fraction is
//! reduced, and zero carries a positive sign and denominator 1.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    negative: bool,
    numer: BigUint,
    denom: BigUint,
}

impl Rational {
    /// Builds a rational from sign and magnitude parts, reducing to canonical
    /// form. A zero denominator is a division-by-zero error.
    pub fn new(negative: bool, numer: BigUint, denom: BigUint) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(negative, numer, denom))
    }

    fn canonical(negative: bool, numer: BigUint, denom: BigUint) -> Self {
        debug_assert!(!denom.is_zero());
        if numer.is_zero() {
            return Self {
                negative: false,
                numer,
                denom: BigUint::one(),
            };
        }
        let g = numer.gcd(&denom);
        if g.is_one() {
            Self {
                negative,
                numer,
                denom,
            }
        } else {
            Self {
                negative,
                numer: numer / &g,
                denom: denom / g,
            }
        }
    }

    pub fn zero() -> Self {
        Self {
            negative: false,
            numer: BigUint::zero(),
            denom: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(value: i64) -> Self {
        Self {
            negative: value < 0,
            numer: BigUint::from(value.unsigned_abs()),
            denom: BigUint::one(),
        }
    }

    pub fn from_biguint(value: BigUint) -> Self {
        Self {
            negative: false,
            numer: value,
            denom: BigUint::one(),
        }
    }

    /// Convenience constructor for literals. Panics on a zero denominator;
    /// use [`Rational::new`] for fallible construction.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Self::canonical(
            (numer < 0) != (denom < 0) && numer != 0,
            BigUint::from(numer.unsigned_abs()),
            BigUint::from(denom.unsigned_abs()),
        )
    }

    /// 2^exp for any integer exponent, negative exponents included.
    pub fn pow2(exp: i64) -> Self {
        if exp >= 0 {
            Self {
                negative: false,
                numer: BigUint::one() << exp as u64,
                denom: BigUint::one(),
            }
        } else {
            Self {
                negative: false,
                numer: BigUint::one(),
                denom: BigUint::one() << exp.unsigned_abs(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn is_positive(&self) -> bool {
        !self.negative && !self.numer.is_zero()
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn abs(&self) -> Self {
        Self {
            negative: false,
            numer: self.numer.clone(),
            denom: self.denom.clone(),
        }
    }

    /// Exact division; division by zero is reported, never silently absorbed.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(
            self.negative != rhs.negative && !self.numer.is_zero(),
            &self.numer * &rhs.denom,
            &self.denom * &rhs.numer,
        ))
    }

    /// Largest integer ≤ self, as (negative, magnitude).
    pub fn floor_parts(&self) -> (bool, BigUint) {
        let q = &self.numer / &self.denom;
        if !self.negative {
            (false, q)
        } else if (&q * &self.denom) == self.numer {
            (true, q)
        } else {
            (true, q + BigUint::one())
        }
    }

    /// Smallest integer ≥ |self|, for magnitude bounds.
    pub fn ceil_abs(&self) -> BigUint {
        let q = &self.numer / &self.denom;
        if (&q * &self.denom) == self.numer {
            q
        } else {
            q + BigUint::one()
        }
    }

    /// Largest multiple of 2^-bits that is ≤ self.
    pub fn floor_dyadic(&self, bits: u64) -> Self {
        let scaled_num = &self.numer << bits;
        let q = &scaled_num / &self.denom;
        if !self.negative {
            Self::canonical(false, q, BigUint::one() << bits)
        } else if (&q * &self.denom) == scaled_num {
            Self::canonical(true, q, BigUint::one() << bits)
        } else {
            Self::canonical(true, q + BigUint::one(), BigUint::one() << bits)
        }
    }

    /// Smallest multiple of 2^-bits that is ≥ self.
    pub fn ceil_dyadic(&self, bits: u64) -> Self {
        -(-self.clone()).floor_dyadic(bits)
    }

    /// Nearest-below f64, for reporting and statistical cross-checks only;
    /// every library decision is made in exact arithmetic.
    pub fn to_f64(&self) -> f64 {
        const KEEP: u64 = 512;
        let nb = self.numer.bits();
        let db = self.denom.bits();
        let ns = nb.saturating_sub(KEEP);
        let ds = db.saturating_sub(KEEP);
        let n = (&self.numer >> ns).to_f64().unwrap_or(f64::MAX);
        let d = (&self.denom >> ds).to_f64().unwrap_or(f64::MAX);
        let mut value = n / d;
        let shift = ns as i64 - ds as i64;
        if shift != 0 {
            value *= 2f64.powi(shift.clamp(-1400, 1400) as i32);
        }
        if self.negative {
            -value
        } else {
            value
        }
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        let left = &self.numer * &rhs.denom;
        let right = &rhs.numer * &self.denom;
        let denom = &self.denom * &rhs.denom;
        // Same sign: magnitudes add. Opposite signs: the larger cross
        // product wins and carries its sign.
        if self.negative == rhs.negative {
            Rational::canonical(self.negative, left + right, denom)
        } else if left >= right {
            Rational::canonical(self.negative, left - right, denom)
        } else {
            Rational::canonical(rhs.negative, right - left, denom)
        }
    }
}

impl Sub for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs.clone())
    }
}

impl Mul for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        Rational::canonical(
            self.negative != rhs.negative && !self.numer.is_zero() && !rhs.numer.is_zero(),
            &self.numer * &rhs.numer,
            &self.denom * &rhs.denom,
        )
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        &self * &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(mut self) -> Rational {
        if !self.numer.is_zero() {
            self.negative = !self.negative;
        }
        self
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => (&self.numer * &other.denom).cmp(&(&other.numer * &self.denom)),
            (true, true) => (&other.numer * &self.denom).cmp(&(&self.numer * &other.denom)),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.numer)?;
        if !self.denom.is_one() {
            write!(f, "/{}", self.denom)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Text form: optional `-`, decimal digits, optionally `/` and decimal
    /// digits. Non-canonical inputs such as `10/4` are reduced on parse.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::ParseRational(text.to_string());
        let body = text.strip_prefix('-');
        let negative = body.is_some();
        let body = body.unwrap_or(text);
        let (numer_text, denom_text) = match body.split_once('/') {
            Some((n, d)) => (n, d),
            None => (body, "1"),
        };
        let digits = |s: &str| {
            (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
                .then(|| BigUint::parse_bytes(s.as_bytes(), 10))
                .flatten()
        };
        let numer = digits(numer_text).ok_or_else(bad)?;
        let denom = digits(denom_text).ok_or_else(bad)?;
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Self::canonical(negative && !numer.is_zero(), numer, denom))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// Least `b` with 2^-b < epsilon; requires epsilon > 0.
///
/// The scan is the μ-minimization over b = 0, 1, 2, …, so the returned
/// exponent also satisfies epsilon ≤ 2^-(b-1) whenever b > 0.
pub fn blb(epsilon: &Rational) -> Result<u64> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositive(epsilon.to_string()));
    }
    let mut b = 0u64;
    loop {
        if &Rational::pow2(-(b as i64)) < epsilon {
            return Ok(b);
        }
        b += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(text: &str) -> Rational {
        text.parse().unwrap()
    }

    #[test]
    fn arithmetic_matches_field_examples() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(q("7/3") * Rational::zero(), Rational::zero());
        assert_eq!(q("-3/4").checked_div(&q("1/2")).unwrap(), q("-3/2"));
        assert_eq!(q("1/6") - q("1/2"), q("-1/3"));
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert!(matches!(
            q("1/2").checked_div(&Rational::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn compare_handles_signs_and_non_canonical_input() {
        assert_eq!(q("5/2").cmp(&q("10/4")), Ordering::Equal);
        assert_eq!(q("-1/3").cmp(&Rational::zero()), Ordering::Less);
        // cross-multiplication: 7·7 = 49 against 6·8 = 48
        assert_eq!(q("7/8").cmp(&q("6/7")), Ordering::Greater);
        assert_eq!(q("-7/8").cmp(&q("-6/7")), Ordering::Less);
    }

    #[test]
    fn max_follows_order() {
        assert_eq!(q("1/2").max(q("1/3")), q("1/2"));
        assert_eq!(q("2/7").max(q("2/7")), q("2/7"));
        assert_eq!(q("-2").max(q("-3/2")), q("-3/2"));
    }

    #[test]
    fn blb_returns_least_exponent() {
        assert_eq!(blb(&q("1/5")).unwrap(), 3);
        assert_eq!(blb(&q("1/2")).unwrap(), 2);
        assert_eq!(blb(&q("3/4")).unwrap(), 1);
        assert_eq!(blb(&q("1")).unwrap(), 1);
        assert_eq!(blb(&q("5")).unwrap(), 0);
        assert!(matches!(blb(&Rational::zero()), Err(Error::NonPositive(_))));
        assert!(matches!(blb(&q("-1/8")), Err(Error::NonPositive(_))));
    }

    #[test]
    fn display_emits_canonical_text() {
        assert_eq!(q("10/4").to_string(), "5/2");
        assert_eq!(q("-6/4").to_string(), "-3/2");
        assert_eq!(Rational::zero().to_string(), "0");
        assert_eq!(q("-0").to_string(), "0");
        assert_eq!(q("5/1").to_string(), "5");
    }

    #[test]
    fn parse_rejects_malformed_text() {
        for bad in ["", "-", "1/", "/2", "1/0", "a/b", "1.5", "+1/2", "1 / 2"] {
            assert!(bad.parse::<Rational>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn pow2_covers_both_signs() {
        assert_eq!(Rational::pow2(3), q("8"));
        assert_eq!(Rational::pow2(0), q("1"));
        assert_eq!(Rational::pow2(-4), q("1/16"));
    }

    #[test]
    fn dyadic_rounding_brackets_value() {
        let v = q("5/12");
        let lo = v.floor_dyadic(8);
        let hi = v.ceil_dyadic(8);
        assert!(lo <= v && v <= hi);
        assert!(&hi - &lo <= Rational::pow2(-8));
        let exact = q("3/8");
        assert_eq!(exact.floor_dyadic(3), exact);
        assert_eq!(exact.ceil_dyadic(3), exact);
        let neg = q("-5/12");
        assert!(neg.floor_dyadic(8) <= neg && neg <= neg.ceil_dyadic(8));
    }

    #[test]
    fn floor_parts_handles_negatives() {
        assert_eq!(q("7/2").floor_parts(), (false, BigUint::from(3u32)));
        assert_eq!(q("-7/2").floor_parts(), (true, BigUint::from(4u32)));
        assert_eq!(q("-3").floor_parts(), (true, BigUint::from(3u32)));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i32>(), 1u32..10_000).prop_map(|(n, d)| Rational::ratio(n as i64, d as i64))
    }

    proptest! {
        #[test]
        fn canonical_after_every_operation(a in arb_rational(), b in arb_rational()) {
            for r in [&a + &b, &a - &b, &a * &b] {
                if r.is_zero() {
                    prop_assert!(!r.is_negative());
                    prop_assert!(r.denom().is_one());
                } else {
                    prop_assert!(r.numer().gcd(r.denom()).is_one());
                }
                prop_assert!(!r.denom().is_zero());
            }
        }

        #[test]
        fn field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &(-a.clone()), Rational::zero());
        }

        #[test]
        fn compare_is_antisymmetric_and_matches_floats(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            let (fa, fb) = (a.to_f64(), b.to_f64());
            // f64 is exact for these small operands, so orders must agree
            if fa != fb {
                prop_assert_eq!(a.cmp(&b) == Ordering::Less, fa < fb);
            }
        }

        #[test]
        fn blb_is_tight_on_unit_interval(n in 1u32..5_000, d in 1u32..5_000) {
            let eps = Rational::ratio(n.min(d) as i64, n.max(d) as i64);
            let b = blb(&eps).unwrap();
            prop_assert!(Rational::pow2(-(b as i64)) < eps);
            prop_assert!(eps <= Rational::pow2(-(b as i64) + 1));
        }

        #[test]
        fn parse_display_round_trip(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
