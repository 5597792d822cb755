//! Prime fields and their extensions `F_{p^r}`.
//!
//! An extension is stored as `F_p[x]/(f)` with a monic irreducible `f` found by
//! scanning candidates in a fixed order, so the same `(p, r)` always produces the
//! same modulus and generator. Elements are coefficient vectors; each element also
//! has an integer code `sum c_i p^i` used for enumeration and lookup tables.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{is_prime, prime_factors};

/// Default cap on the number of field elements.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    pub coeffs: Vec<u64>,
}

/// Discrete log tables. Elements are encoded as logarithms with `zero()` as a
/// sentinel, so multiplication is addition mod `q - 1` and addition goes
/// through the Zech logarithm `log(1 + g^k)`.
#[derive(Debug)]
pub struct LogTables {
    pub q: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl LogTables {
    /// Sentinel log for the zero element.
    #[inline]
    pub fn zero(&self) -> u32 {
        (self.q - 1) as u32
    }

    #[inline]
    pub fn order(&self) -> u32 {
        (self.q - 1) as u32
    }

    #[inline]
    pub fn log_of_code(&self, code: u32) -> u32 {
        self.log[code as usize]
    }

    #[inline]
    pub fn code_of_log(&self, l: u32) -> u32 {
        if l == self.zero() {
            0
        } else {
            self.exp[l as usize]
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let z = self.zero();
        if a == z || b == z {
            return z;
        }
        let s = a + b;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    /// `a^e` in log form.
    #[inline]
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let z = self.zero();
        if a == z {
            return if e == 0 { 0 } else { z };
        }
        ((a as u64 * e) % (z as u64)) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let z = self.zero();
        if a == z {
            return b;
        }
        if b == z {
            return a;
        }
        let d = if b >= a { b - a } else { b + z - a };
        let t = self.zech[d as usize];
        if t == z {
            return z;
        }
        let s = a + t;
        if s >= z {
            s - z
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        // -1 = g^((q-1)/2) in odd characteristic, and -1 = 1 in characteristic 2
        let z = self.zero();
        if a == z {
            return z;
        }
        if self.q.is_multiple_of(2) {
            return a;
        }
        let h = z / 2;
        let s = a + h;
        if s >= z {
            s - z
        } else {
            s
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtField {
    pub p: u64,
    pub r: u32,
    /// Monic modulus, low degree first, length `r + 1`.
    pub modulus: Vec<u64>,
    pub generator: Vec<u64>,
    #[serde(skip)]
    tables: Arc<OnceLock<LogTables>>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus && self.generator == other.generator
    }
}

impl Eq for ExtField {}

/// Builds `F_{p^r}` with the default size cap.
pub fn make_ext_field(p: u64, r: u32) -> Result<ExtField> {
    make_ext_field_capped(p, r, DEFAULT_FIELD_CAP)
}

pub fn make_ext_field_capped(p: u64, r: u32, cap: u64) -> Result<ExtField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(Error::Precondition("extension degree must be positive".into()));
    }
    let q = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
    if q > cap as u128 {
        return Err(Error::CapExceeded { size: q, cap: cap as u128 });
    }
    let modulus = if r == 1 { vec![0, 1] } else { find_irreducible(p, r as usize) };
    let mut field = ExtField { p, r, modulus, generator: vec![0; r as usize], tables: Arc::new(OnceLock::new()) };
    field.generator = field.find_generator();
    Ok(field)
}

fn find_irreducible(p: u64, r: usize) -> Vec<u64> {
    let count = p.pow(r as u32);
    for code in 0..count {
        let mut f = code_to_coeffs(code, p, r);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn code_to_coeffs(mut code: u64, p: u64, r: usize) -> Vec<u64> {
    let mut c = Vec::with_capacity(r);
    for _ in 0..r {
        c.push(code % p);
        code /= p;
    }
    c
}

// Polynomial helpers over F_p, low degree first, trimmed of high zeros.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while a.len() > dm {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = da - dm + i;
            a[idx] = (a[idx] + p * p - c * mi % p) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = poly_rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(out)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let r = f.len() - 1;
    let x = vec![0, 1];
    let xq = poly_powmod(&x, (p as u128).pow(r as u32), f, p);
    if poly_sub(&xq, &x, p) != Vec::<u64>::new() {
        return false;
    }
    for l in prime_factors(r as u64) {
        let e = (p as u128).pow((r as u64 / l) as u32);
        let h = poly_sub(&poly_powmod(&x, e, f, p), &x, p);
        if poly_gcd(f, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

impl ExtField {
    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    pub fn prime_field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: vec![0; self.r as usize] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        let mut c = vec![0; self.r as usize];
        c[0] = n.rem_euclid(self.p as i64) as u64;
        FieldElem { coeffs: c }
    }

    pub fn elem(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Precondition(format!("{coeffs:?} is not an element of F_{}^{}", self.p, self.r)));
        }
        let mut c = coeffs.to_vec();
        c.resize(self.r as usize, 0);
        Ok(FieldElem { coeffs: c })
    }

    pub fn code(&self, x: &FieldElem) -> u64 {
        x.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn from_code(&self, code: u64) -> FieldElem {
        FieldElem { coeffs: code_to_coeffs(code, self.p, self.r as usize) }
    }

    pub fn is_zero(&self, x: &FieldElem) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    fn pad(&self, v: Vec<u64>) -> FieldElem {
        let mut c = v;
        c.resize(self.r as usize, 0);
        FieldElem { coeffs: c }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let c = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) % self.p).collect();
        FieldElem { coeffs: c }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let c = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + self.p - y) % self.p).collect();
        FieldElem { coeffs: c }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.pad(poly_mulmod(&trim(a.coeffs.clone()), &trim(b.coeffs.clone()), &self.modulus, self.p))
    }

    pub fn pow(&self, a: &FieldElem, e: u128) -> FieldElem {
        self.pad(poly_powmod(&trim(a.coeffs.clone()), e, &self.modulus, self.p))
    }

    pub fn inv(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, (self.q() - 2) as u128))
        }
    }

    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.p as u128)
    }

    /// Absolute trace `x + x^p + ... + x^{p^{r-1}}`, an element of `F_p`.
    pub fn trace(&self, x: &FieldElem) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for _ in 0..self.r {
            acc = self.add(&acc, &y);
            y = self.frobenius(&y);
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
        acc.coeffs[0]
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: &FieldElem) -> u64 {
        let n = self.q() - 1;
        let mut ord = n;
        for l in prime_factors(n) {
            while ord.is_multiple_of(l) && self.pow(a, (ord / l) as u128) == self.one() {
                ord /= l;
            }
        }
        ord
    }

    fn find_generator(&self) -> Vec<u64> {
        let n = self.q() - 1;
        for code in 1..self.q() {
            let g = self.from_code(code);
            if self.order(&g) == n {
                return g.coeffs;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    pub fn generator_elem(&self) -> FieldElem {
        FieldElem { coeffs: self.generator.clone() }
    }

    /// All elements, zero first, in code order.
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q()).map(move |c| self.from_code(c))
    }

    /// Lazily built discrete-log tables.
    pub fn tables(&self) -> &LogTables {
        self.tables.get_or_init(|| self.build_tables())
    }

    fn build_tables(&self) -> LogTables {
        let q = self.q();
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; n];
        let mut log = vec![n as u32; q as usize];
        let g = self.generator_elem();
        let mut x = self.one();
        for (i, slot) in exp.iter_mut().enumerate() {
            let c = self.code(&x) as u32;
            *slot = c;
            log[c as usize] = i as u32;
            x = self.mul(&x, &g);
        }
        // Adding 1 only touches the constant coefficient, so it is cheap on codes.
        let mut zech = vec![0u32; n];
        for (k, z) in zech.iter_mut().enumerate() {
            let c = exp[k] as u64;
            let c0 = c % self.p;
            let c1 = c - c0 + (c0 + 1) % self.p;
            *z = log[c1 as usize];
        }
        LogTables { q, exp, log, zech }
    }

    /// Log-form of an element (zero sentinel for 0).
    pub fn log_of(&self, x: &FieldElem) -> u32 {
        self.tables().log_of_code(self.code(x) as u32)
    }

    /// Minimal polynomial over `F_p` of an element, monic, low degree first.
    pub fn minimal_polynomial(&self, x: &FieldElem) -> Vec<u64> {
        // Product of (T - x^{p^i}) over the Frobenius orbit, computed with coefficients in F_q.
        let mut orbit = vec![x.clone()];
        loop {
            let next = self.frobenius(orbit.last().unwrap());
            if &next == x {
                break;
            }
            orbit.push(next);
        }
        let mut poly: Vec<FieldElem> = vec![self.one()];
        for root in &orbit {
            let mut next = vec![self.zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], c);
                next[i] = self.sub(&next[i], &self.mul(c, root));
            }
            poly = next;
        }
        poly.iter().map(|c| c.coeffs[0]).collect()
    }

    /// Some root in this field of a polynomial over `F_p`, scanning in code order.
    pub fn find_root(&self, f: &[u64]) -> Option<FieldElem> {
        self.enumerate().find(|x| {
            let mut acc = self.zero();
            for &c in f.iter().rev() {
                acc = self.add(&self.mul(&acc, x), &self.from_int(c as i64));
            }
            self.is_zero(&acc)
        })
    }
}

/// JSON field descriptor `{p, r}` used in family records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one_u32")]
    pub r: u32,
}

fn one_u32() -> u32 {
    1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f7 = make_ext_field(7, 1).unwrap();
        assert_eq!(f7.modulus, vec![0, 1]);
        assert_eq!(f7.generator, vec![3]);
        let f2 = make_ext_field(2, 1).unwrap();
        assert_eq!(f2.generator, vec![1]);
        assert!(make_ext_field(9, 1).is_err());
        assert!(PrimeField::new(15).is_err());
    }

    #[test]
    fn f9_generator_has_order_8() {
        let f = make_ext_field(3, 2).unwrap();
        assert_eq!(f.q(), 9);
        assert_eq!(f.order(&f.generator_elem()), 8);
        assert_eq!(f.enumerate().count(), 9);
    }

    #[test]
    fn enumeration_is_distinct_and_zero_first() {
        let f = make_ext_field(7, 1).unwrap();
        let all: Vec<_> = f.enumerate().collect();
        assert_eq!(all.len(), 7);
        assert!(f.is_zero(&all[0]));
        let mut s = all.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 7);
        let f2 = make_ext_field(2, 1).unwrap();
        let v: Vec<_> = f2.enumerate().map(|x| x.coeffs[0]).collect();
        assert_eq!(v, vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(make_ext_field_capped(5, 4, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn trace_matches_direct_formula() {
        let f = make_ext_field(3, 2).unwrap();
        for x in f.enumerate() {
            let direct = f.add(&x, &f.pow(&x, 3));
            assert_eq!(direct.coeffs[1], 0);
            assert_eq!(f.trace(&x), direct.coeffs[0]);
        }
        assert_eq!(f.trace(&f.zero()), 0);
        let f7 = make_ext_field(7, 1).unwrap();
        for x in f7.enumerate() {
            assert_eq!(f7.trace(&x), x.coeffs[0]);
        }
    }

    #[test]
    fn log_tables_agree_with_polynomial_arithmetic() {
        for (p, r) in [(2, 3), (3, 2), (5, 2), (7, 1)] {
            let f = make_ext_field(p, r).unwrap();
            let t = f.tables();
            for a in f.enumerate() {
                for b in f.enumerate() {
                    let (la, lb) = (f.log_of(&a), f.log_of(&b));
                    assert_eq!(t.code_of_log(t.mul(la, lb)) as u64, f.code(&f.mul(&a, &b)));
                    assert_eq!(t.code_of_log(t.add(la, lb)) as u64, f.code(&f.add(&a, &b)));
                }
                assert_eq!(t.code_of_log(t.neg(f.log_of(&a))) as u64, f.code(&f.neg(&a)));
            }
        }
    }

    #[test]
    fn minimal_polynomial_has_the_element_as_root() {
        let f = make_ext_field(5, 2).unwrap();
        let g = f.generator_elem();
        let m = f.minimal_polynomial(&g);
        assert_eq!(m.len(), 3);
        let big = make_ext_field(5, 4).unwrap();
        assert!(big.find_root(&m).is_some());
    }
}
