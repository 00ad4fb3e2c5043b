//! Truncated formal power series with exact rational coefficients.
//!
//! A [`TruncSeries`] of order `N` stores the coefficients of `z^0 ..= z^N`
//! and nothing else: reading past the order is an error, and binary
//! operations keep the smaller of the two orders. Multiplying by `z^k`
//! shifts the known window, so it moves the order by `k` in both directions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{alt_harmonic, NumError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient z^{index} requested beyond truncation order {order}")]
    BeyondOrder { index: usize, order: usize },
    #[error("multiplying by z^{power} would leave a nonzero coefficient at z^{index}")]
    NegativePower { power: i64, index: usize },
    #[error("series of order {order} is too short for this operation (needs {needed})")]
    OrderTooSmall { order: usize, needed: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(value: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// `value * z^power`, truncated to `order`.
    pub fn monomial(value: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = value;
        }
        s
    }

    /// Polynomial with the given coefficients, low degree first.
    pub fn polynomial(coeffs: &[Rational], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c.clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, index: usize) -> Result<&Rational, SeriesError> {
        self.coeffs.get(index).ok_or(SeriesError::BeyondOrder {
            index,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Drops everything above `order`; asking for more than is known keeps
    /// the current order.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        Self {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplies by `z^power`. Negative powers are allowed only when the
    /// dropped low-order coefficients are all zero.
    pub fn mul_z_pow(&self, power: i64) -> Result<Self, SeriesError> {
        if power >= 0 {
            let k = power as usize;
            let mut coeffs = vec![Rational::zero(); k];
            coeffs.extend(self.coeffs.iter().cloned());
            return Ok(Self { coeffs });
        }
        let k = power.unsigned_abs() as usize;
        if k > self.order() {
            return Err(SeriesError::OrderTooSmall {
                order: self.order(),
                needed: k,
            });
        }
        if let Some(index) = self.coeffs[..k].iter().position(|c| !c.is_zero()) {
            return Err(SeriesError::NegativePower { power, index });
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Multiplies by `z^power` for `power >= 0`; see [`Self::mul_z_pow`].
    pub fn shift_by_power(&self, power: usize) -> Self {
        self.mul_z_pow(power as i64)
            .expect("nonnegative shifts cannot fail")
    }

    /// Checked division by `z`: the constant term must vanish.
    pub fn div_by_z(&self) -> Result<Self, SeriesError> {
        self.mul_z_pow(-1)
    }

    pub fn derivative(&self) -> Self {
        assert!(
            self.order() >= 1,
            "derivative of an order-0 series is unknown"
        );
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from(k as u64))
                .collect(),
        }
    }

    /// Term-wise integral from 0; the result is one order longer.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * Rational::frac(1, k as i64 + 1)),
        );
        Self { coeffs }
    }

    /// `f(-z)`: flips the sign of every odd coefficient.
    pub fn reflect(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// Multiplies by `(1-z)^a` at this series' own order.
    pub fn mul_one_minus_z_pow(&self, a: i64) -> Self {
        self * &geom_pow(a, self.order())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries(order={}, [", self.order())?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("])")
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &rhs.coeffs[k])
                .collect(),
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        TruncSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] - &rhs.coeffs[k])
                .collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncSeries { coeffs }
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($trait:ident, $method:ident) => {
        impl $trait for TruncSeries {
            type Output = TruncSeries;
            fn $method(self, rhs: TruncSeries) -> TruncSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&TruncSeries> for TruncSeries {
            type Output = TruncSeries;
            fn $method(self, rhs: &TruncSeries) -> TruncSeries {
                (&self).$method(rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        (&self).neg()
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<Rational>,
}

impl Serialize for TruncSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(serde::de::Error::custom(format!(
                "order {} needs {} coefficients, got {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        Ok(TruncSeries {
            coeffs: repr.coeffs,
        })
    }
}

/// `(1-z)^a` for any integer `a`.
pub fn geom_pow(a: i64, order: usize) -> TruncSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = Rational::one();
    coeffs.push(c.clone());
    for k in 1..=order as i64 {
        // c_k = c_{k-1} * (k-1-a) / k
        c = &c * Rational::frac(k - 1 - a, k);
        coeffs.push(c.clone());
    }
    TruncSeries { coeffs }
}

/// `log(1-z) = -sum_{k>=1} z^k / k`
pub fn log_one_minus(order: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(order);
    for k in 1..=order {
        s.coeffs[k] = Rational::frac(-1, k as i64);
    }
    s
}

/// `log(1+z) = sum_{k>=1} (-1)^{k+1} z^k / k`
pub fn log_one_plus(order: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(order);
    for k in 1..=order {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        s.coeffs[k] = Rational::frac(sign, k as i64);
    }
    s
}

/// `artanh(z) = sum_{k odd} z^k / k`
pub fn artanh(order: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(order);
    for k in (1..=order).step_by(2) {
        s.coeffs[k] = Rational::frac(1, k as i64);
    }
    s
}

/// `L2(z) = -int_0^z log(1+t)/(1-t) dt`, built from its integral definition.
pub fn l2(order: usize) -> TruncSeries {
    let integrand = log_one_plus(order).mul_one_minus_z_pow(-1);
    (-integrand.integrate()).truncate(order)
}

/// `L2(z)` from its coefficient law `[z^m] L2 = H^alt_{m-1} / m`.
pub fn l2_by_coefficients(order: usize) -> TruncSeries {
    let mut s = TruncSeries::zero(order);
    for m in 1..=order {
        s.coeffs[m] = alt_harmonic(m as u64 - 1) * Rational::frac(1, m as i64);
    }
    s
}

/// `(1/z) (z^2 P''(z))'`, the grand-average inhomogeneity. Its
/// coefficients are `n^2 (n-1) P_n` at `z^{n-2}`.
pub fn grand_inhomogeneity(p: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    if p.order() < 2 {
        return Err(SeriesError::OrderTooSmall {
            order: p.order(),
            needed: 2,
        });
    }
    let s2p2 = p.derivative().derivative().shift_by_power(2);
    s2p2.derivative().div_by_z()
}

/// Solves `(1-z)^2 C'' - 6 C = (1-z)^2 (1/z)(z^2 P'')'` with `C(0) = C'(0) = 0`:
///
/// `C(z) = (1-z)^3 int_0^z (1-t)^-6 int_0^t (1-s)^3 (1/s)(s^2 P''(s))' ds dt`.
///
/// The result has the same order as `P`.
pub fn solve_quicksort_ode(p: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    let inner = grand_inhomogeneity(p)?;
    let first = inner.mul_one_minus_z_pow(3).integrate();
    let second = first.mul_one_minus_z_pow(-6).integrate();
    Ok(second.mul_one_minus_z_pow(3))
}

/// Solves `C'' - 2/(1-z)^2 C = Q` with `C(0) = C'(0) = 0`:
///
/// `C(z) = (1-z)^2 int_0^z (1-t)^-4 int_0^t (1-s)^2 Q(s) ds dt`.
///
/// The result is two orders longer than `Q`.
pub fn solve_quickselect_ode(q: &TruncSeries) -> TruncSeries {
    let first = q.mul_one_minus_z_pow(2).integrate();
    let second = first.mul_one_minus_z_pow(-4).integrate();
    let c = second.mul_one_minus_z_pow(2);
    assert!(
        c.coeffs[0].is_zero() && c.coeffs[1].is_zero(),
        "quickselect ODE solution must satisfy C(0) = C'(0) = 0"
    );
    c
}

/// `(1-z)^2 C'' - 6 C - (1-z)^2 (1/z)(z^2 P'')'`, which vanishes for the
/// grand-average generating function belonging to `P`.
pub fn quicksort_ode_residual(
    c: &TruncSeries,
    p: &TruncSeries,
) -> Result<TruncSeries, SeriesError> {
    let lhs = c.derivative().derivative().mul_one_minus_z_pow(2) - c.scale(&Rational::from(6u64));
    let rhs = grand_inhomogeneity(p)?.mul_one_minus_z_pow(2);
    Ok(lhs - rhs)
}

/// `(1-z)^2 C'' - 2 C - (1-z)^2 Q`, which vanishes when `C` solves the
/// per-rank system.
pub fn quickselect_ode_residual(c: &TruncSeries, q: &TruncSeries) -> TruncSeries {
    let lhs = c.derivative().derivative().mul_one_minus_z_pow(2) - c.scale(&Rational::from(2u64));
    lhs - q.mul_one_minus_z_pow(2)
}
