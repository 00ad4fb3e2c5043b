//! Exact rational arithmetic and the harmonic-number family of sums.
//!
//! [`Rational`] is a thin newtype over `num_rational::BigRational`, which
//! already keeps values in lowest terms with a positive denominator. The
//! newtype pins down the string form used everywhere in reports
//! (`"numerator/denominator"`) and makes division by zero a recoverable
//! error instead of a panic.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("unknown special sum {0:?}")]
    UnknownSum(String),
    #[error("special sum {kind} requires n >= 1, got {n}")]
    Domain { kind: &'static str, n: u64 },
}

/// An exact rational number in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, NumError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    /// Shorthand for small literal fractions; panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("literal fraction with zero denominator")
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Self(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, NumError> {
        if rhs.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    /// Nearest `f64`; exact for values whose parts fit a double.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() {
                return v;
            }
        }
        // Huge numerators and denominators overflow the naive conversion;
        // scale both down to a common bit length first.
        let n = self.0.numer();
        let d = self.0.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000);
        let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Self(value)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Self::from_integer(value)
    }
}

impl From<u64> for Rational {
    fn from(value: u64) -> Self {
        Self::from_integer(value)
    }
}

impl From<BigInt> for Rational {
    fn from(value: BigInt) -> Self {
        Self::from_integer(value)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NumError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                Rational::new(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| err())?;
                Ok(Rational::from_integer(n))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

// `Div` panics on a zero divisor, matching the integer types; use
// `checked_div` where the divisor is data-dependent.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("rational division by zero")
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        (&self).div(&rhs)
    }
}

impl Div<&Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        (&self).div(rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Incrementally grown tables of `H_n` and `H^alt_n`.
#[derive(Debug, Clone)]
pub struct HarmonicCache {
    harmonic: Vec<Rational>,
    alternating: Vec<Rational>,
}

impl Default for HarmonicCache {
    fn default() -> Self {
        Self {
            harmonic: vec![Rational::zero()],
            alternating: vec![Rational::zero()],
        }
    }
}

impl HarmonicCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.harmonic.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ensure(&mut self, n: usize) {
        while self.harmonic.len() <= n {
            let k = self.harmonic.len() as i64;
            let term = Rational::frac(1, k);
            let h = &self.harmonic[self.harmonic.len() - 1] + &term;
            let a = if k % 2 == 0 {
                &self.alternating[self.alternating.len() - 1] + &term
            } else {
                &self.alternating[self.alternating.len() - 1] - &term
            };
            self.harmonic.push(h);
            self.alternating.push(a);
        }
    }

    /// `H_n`; the cache must already cover `n`.
    pub fn h(&self, n: usize) -> &Rational {
        &self.harmonic[n]
    }

    /// `H^alt_n`; the cache must already cover `n`.
    pub fn h_alt(&self, n: usize) -> &Rational {
        &self.alternating[n]
    }
}

fn global_cache() -> &'static RwLock<HarmonicCache> {
    static CACHE: OnceLock<RwLock<HarmonicCache>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HarmonicCache::new()))
}

fn with_cache<T>(n: usize, f: impl FnOnce(&HarmonicCache) -> T) -> T {
    {
        let cache = global_cache().read().expect("harmonic cache poisoned");
        if cache.len() > n {
            return f(&cache);
        }
    }
    let mut cache = global_cache().write().expect("harmonic cache poisoned");
    cache.ensure(n);
    f(&cache)
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> Rational {
    with_cache(n as usize, |c| c.h(n as usize).clone())
}

/// `H^alt_n = sum_{k=1..n} (-1)^k / k`, with `H^alt_0 = 0`.
pub fn alt_harmonic(n: u64) -> Rational {
    with_cache(n as usize, |c| c.h_alt(n as usize).clone())
}

/// The finite sums that appear in the closed forms for the selection costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialSum {
    /// `sum_{k=1..n-1} H_k H_{n-k}`
    HarmonicConvolution,
    /// `sum_{k=1..n-1} H_k / (n-k)`
    HarmonicOverComplement,
    /// `sum_{k=1..n} (H^alt_{k-1} / k) (n-k+1)`
    AltWeighted,
    /// `sum_{k=2..n} H^alt_{k-1} / k`
    AltOverK,
    /// `sum_{k=1..n-1} 1 / (k (n-k))`
    Reciprocal,
}

impl SpecialSum {
    pub const ALL: [SpecialSum; 5] = [
        SpecialSum::HarmonicConvolution,
        SpecialSum::HarmonicOverComplement,
        SpecialSum::AltWeighted,
        SpecialSum::AltOverK,
        SpecialSum::Reciprocal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpecialSum::HarmonicConvolution => "HH_conv",
            SpecialSum::HarmonicOverComplement => "H_over",
            SpecialSum::AltWeighted => "altw",
            SpecialSum::AltOverK => "alt_over_k",
            SpecialSum::Reciprocal => "recip",
        }
    }
}

impl FromStr for SpecialSum {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpecialSum::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| NumError::UnknownSum(s.to_string()))
    }
}

impl fmt::Display for SpecialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn special_sum(kind: SpecialSum, n: u64) -> Result<Rational, NumError> {
    if n == 0 {
        return Err(NumError::Domain {
            kind: kind.name(),
            n,
        });
    }
    let n_us = n as usize;
    let value = with_cache(n_us, |c| match kind {
        SpecialSum::HarmonicConvolution => (1..n_us).map(|k| c.h(k) * c.h(n_us - k)).sum(),
        SpecialSum::HarmonicOverComplement => (1..n_us)
            .map(|k| c.h(k) * Rational::frac(1, (n_us - k) as i64))
            .sum(),
        SpecialSum::AltWeighted => (1..=n_us)
            .map(|k| c.h_alt(k - 1) * Rational::frac((n_us - k + 1) as i64, k as i64))
            .sum(),
        SpecialSum::AltOverK => (2..=n_us)
            .map(|k| c.h_alt(k - 1) * Rational::frac(1, k as i64))
            .sum(),
        SpecialSum::Reciprocal => (1..n_us)
            .map(|k| Rational::frac(1, (k * (n_us - k)) as i64))
            .sum(),
    });
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), Rational::zero());
        assert_eq!(harmonic(2), r("3/2"));
        assert_eq!(harmonic(4), r("25/12"));
        for n in 1..200 {
            assert_eq!(harmonic(n) - harmonic(n - 1), Rational::frac(1, n as i64));
        }
    }

    #[test]
    fn alt_harmonic_values() {
        assert_eq!(alt_harmonic(0), Rational::zero());
        assert_eq!(alt_harmonic(1), r("-1"));
        assert_eq!(alt_harmonic(2), r("-1/2"));
        assert_eq!(alt_harmonic(3), r("-5/6"));
    }

    #[test]
    fn special_sum_examples() {
        assert_eq!(
            special_sum(SpecialSum::HarmonicConvolution, 2).unwrap(),
            Rational::one()
        );
        assert_eq!(special_sum(SpecialSum::AltOverK, 3).unwrap(), r("-2/3"));
        // 1/(1*2) + 1/(2*1)
        assert_eq!(
            special_sum(SpecialSum::Reciprocal, 3).unwrap(),
            Rational::one()
        );
        assert_eq!(
            special_sum(SpecialSum::AltWeighted, 1).unwrap(),
            Rational::zero()
        );
        assert!(matches!(
            special_sum(SpecialSum::Reciprocal, 0),
            Err(NumError::Domain { .. })
        ));
        assert!(matches!(
            "HH".parse::<SpecialSum>(),
            Err(NumError::UnknownSum(_))
        ));
        for kind in SpecialSum::ALL {
            assert_eq!(kind.name().parse::<SpecialSum>().unwrap(), kind);
        }
    }

    #[test]
    fn canonical_form_and_strings() {
        let x = Rational::new(6, -4).unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(r("5/1"), Rational::from_integer(5));
        assert_eq!(r("7").to_string(), "7/1");
        assert_eq!(r(" 10/4 ").to_string(), "5/2");
        assert!(matches!(
            "1/0".parse::<Rational>(),
            Err(NumError::DivisionByZero)
        ));
        assert!(matches!("x/2".parse::<Rational>(), Err(NumError::Parse(_))));
        assert_eq!(
            Rational::one().checked_div(&Rational::zero()),
            Err(NumError::DivisionByZero)
        );
        let json = serde_json::to_string(&r("25/12")).unwrap();
        assert_eq!(json, "\"25/12\"");
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r("25/12"));
    }

    #[test]
    fn huge_values_convert_to_float() {
        let big = BigInt::from(10).pow(400);
        let x = Rational::new(&big + 1, &big * 3).unwrap();
        assert!((x.to_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert!((harmonic(300).to_f64() - 6.2828).abs() < 1e-3);
    }
}
