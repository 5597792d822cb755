//! Exact integers, rationals and residue rings.
//!
//! Rationals are `num_rational::BigRational`, which keeps every value reduced
//! with a positive denominator. `ModRing` is a residue class that carries its
//! own modulus, so mixing precisions panics instead of silently truncating.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type BigRat = num_rational::BigRational;

/// Builds `n/d` as a reduced rational.
pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRat {
    BigRat::from_integer(n.into())
}

/// Generalized harmonic number `H_k^(order) = sum_{j=1..k} 1/j^order`.
pub fn harmonic(k: u64, order: u32) -> BigRat {
    let mut acc = BigRat::zero();
    for j in 1..=k {
        acc += BigRat::new(BigInt::one(), BigInt::from(j).pow(order));
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

/// `a! / (b!)^e` as an exact rational.
pub fn factorial_ratio(a: u64, b: u64, e: u32) -> BigRat {
    BigRat::new(factorial(a), factorial(b).pow(e))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation_int(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn valuation_rat(x: &BigRat, p: u64) -> Option<i64> {
    let vn = valuation_int(x.numer(), p)? as i64;
    let vd = valuation_int(x.denom(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

/// Formats a rational as `"num/den"`, or just `"num"` for integers.
pub fn rat_to_string(x: &BigRat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rat_from_str(s: &str) -> Result<BigRat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRat::new(n, d))
        }
        None => Ok(BigRat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod rat_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRat, D::Error> {
        let s = String::deserialize(d)?;
        rat_from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing lists of rationals as strings.
pub mod rat_vec_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[BigRat], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(rat_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| rat_from_str(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod int_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Residue class in `Z/mZ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModRing {
    value: BigUint,
    modulus: BigUint,
}

impl ModRing {
    pub fn new(value: impl Into<BigInt>, modulus: impl Into<BigUint>) -> Self {
        let modulus = modulus.into();
        assert!(modulus >= BigUint::from(2u32), "modulus must be at least 2");
        let m = BigInt::from(modulus.clone());
        let v = value.into().mod_floor(&m);
        ModRing { value: v.to_biguint().unwrap(), modulus }
    }

    /// `value mod p^n`.
    pub fn padic(value: impl Into<BigInt>, p: u64, n: u32) -> Self {
        ModRing::new(value, BigUint::from(p).pow(n))
    }

    pub fn zero(modulus: &BigUint) -> Self {
        ModRing { value: BigUint::zero(), modulus: modulus.clone() }
    }

    pub fn one(modulus: &BigUint) -> Self {
        ModRing { value: BigUint::one(), modulus: modulus.clone() }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Representative in `(-m/2, m/2]`.
    pub fn symmetric(&self) -> BigInt {
        let v = BigInt::from(self.value.clone());
        let m = BigInt::from(self.modulus.clone());
        if &v * 2 > m {
            v - m
        } else {
            v
        }
    }

    fn check(&self, other: &ModRing) {
        assert!(
            self.modulus == other.modulus,
            "mixed moduli: {} vs {}",
            self.modulus,
            other.modulus
        );
    }

    pub fn try_add(&self, other: &ModRing) -> Result<ModRing> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.to_string(), other.modulus.to_string()));
        }
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &ModRing) -> Result<ModRing> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.to_string(), other.modulus.to_string()));
        }
        Ok(self * other)
    }

    pub fn pow(&self, e: &BigUint) -> ModRing {
        ModRing { value: self.value.modpow(e, &self.modulus), modulus: self.modulus.clone() }
    }

    pub fn pow_u64(&self, e: u64) -> ModRing {
        self.pow(&BigUint::from(e))
    }

    /// Multiplicative inverse when the value is a unit.
    pub fn inverse(&self) -> Option<ModRing> {
        let a = BigInt::from(self.value.clone());
        let m = BigInt::from(self.modulus.clone());
        let g = a.extended_gcd(&m);
        if !g.gcd.is_one() {
            return None;
        }
        Some(ModRing::new(g.x, self.modulus.clone()))
    }

    /// Reduces to a smaller modulus dividing the current one.
    pub fn reduce_to(&self, modulus: &BigUint) -> ModRing {
        assert!((&self.modulus % modulus).is_zero(), "target modulus must divide {}", self.modulus);
        ModRing { value: &self.value % modulus, modulus: modulus.clone() }
    }

    pub fn mul_int(&self, k: i64) -> ModRing {
        self * &ModRing::new(k, self.modulus.clone())
    }
}

/// Square-and-multiply power `x^e`.
pub fn modring_pow(x: &ModRing, e: u64) -> ModRing {
    let mut result = ModRing::one(&x.modulus);
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    result
}

impl fmt::Debug for ModRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl fmt::Display for ModRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for &ModRing {
    type Output = ModRing;
    fn add(self, rhs: &ModRing) -> ModRing {
        self.check(rhs);
        ModRing { value: (&self.value + &rhs.value) % &self.modulus, modulus: self.modulus.clone() }
    }
}

impl Sub for &ModRing {
    type Output = ModRing;
    fn sub(self, rhs: &ModRing) -> ModRing {
        self.check(rhs);
        let v = (&self.value + &self.modulus - &rhs.value) % &self.modulus;
        ModRing { value: v, modulus: self.modulus.clone() }
    }
}

impl Mul for &ModRing {
    type Output = ModRing;
    fn mul(self, rhs: &ModRing) -> ModRing {
        self.check(rhs);
        ModRing { value: (&self.value * &rhs.value) % &self.modulus, modulus: self.modulus.clone() }
    }
}

impl Neg for &ModRing {
    type Output = ModRing;
    fn neg(self) -> ModRing {
        let v = (&self.modulus - &self.value) % &self.modulus;
        ModRing { value: v, modulus: self.modulus.clone() }
    }
}

impl Add for ModRing {
    type Output = ModRing;
    fn add(self, rhs: ModRing) -> ModRing {
        &self + &rhs
    }
}

impl Sub for ModRing {
    type Output = ModRing;
    fn sub(self, rhs: ModRing) -> ModRing {
        &self - &rhs
    }
}

impl Mul for ModRing {
    type Output = ModRing;
    fn mul(self, rhs: ModRing) -> ModRing {
        &self * &rhs
    }
}

impl Neg for ModRing {
    type Output = ModRing;
    fn neg(self) -> ModRing {
        -&self
    }
}

/// Reduces a p-integral rational into `Z/p^n`. Fails when the denominator is
/// divisible by `p`.
pub fn rat_to_padic(x: &BigRat, p: u64, n: u32) -> Result<ModRing> {
    let m = BigUint::from(p).pow(n);
    let num = ModRing::new(x.numer().clone(), m.clone());
    let den = ModRing::new(x.denom().clone(), m);
    let inv = den
        .inverse()
        .ok_or_else(|| Error::NotPIntegral(format!("{} has denominator divisible by {p}", rat_to_string(x))))?;
    Ok(&num * &inv)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(0, 1), BigRat::zero());
        assert_eq!(harmonic(1, 1), BigRat::one());
        assert_eq!(harmonic(3, 1), rat(11, 6));
        assert_eq!(harmonic(2, 2), rat(5, 4));
    }

    #[test]
    fn factorial_ratio_examples() {
        assert_eq!(factorial_ratio(0, 0, 5), BigRat::one());
        assert_eq!(factorial_ratio(5, 1, 5), rat_int(120));
        assert_eq!(factorial_ratio(10, 2, 5), rat_int(113400));
    }

    #[test]
    fn modring_pow_examples() {
        let m = BigUint::from(49u32);
        let x = ModRing::new(2, m.clone());
        assert_eq!(modring_pow(&x, 0), ModRing::one(&m));
        let y = modring_pow(&x, 49);
        assert_eq!(y.value(), &BigUint::from(30u32));
        assert_eq!(y.value() % 7u32, BigUint::from(2u32));
        assert_eq!(modring_pow(&y, 6), ModRing::one(&m));
        assert_eq!(modring_pow(&ModRing::one(&m), 12345), ModRing::one(&m));
    }

    #[test]
    #[should_panic(expected = "mixed moduli")]
    fn mixed_moduli_panics() {
        let a = ModRing::new(1, 7u32);
        let b = ModRing::new(1, 49u32);
        let _ = &a + &b;
    }

    #[test]
    fn mixed_moduli_checked() {
        let a = ModRing::new(1, 7u32);
        let b = ModRing::new(1, 49u32);
        assert!(a.try_add(&b).is_err());
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["11/6", "-3/4", "0", "12345678901234567890123"] {
            assert_eq!(rat_to_string(&rat_from_str(s).unwrap()), s);
        }
        assert!(rat_from_str("1/0").is_err());
        assert_eq!(rat_from_str("4/6").unwrap(), rat(2, 3));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation_int(&BigInt::from(98), 7), Some(2));
        assert_eq!(valuation_rat(&rat(5, 49), 7), Some(-2));
        assert_eq!(valuation_int(&BigInt::zero(), 7), None);
    }

    #[test]
    fn padic_reduction_of_rationals() {
        let x = rat_to_padic(&rat(1, 2), 7, 2).unwrap();
        assert_eq!((&x * &ModRing::padic(2, 7, 2)).value(), &BigUint::one());
        assert!(rat_to_padic(&rat(1, 7), 7, 2).is_err());
    }

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(17) && !is_prime(1) && !is_prime(91));
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
    }
}
