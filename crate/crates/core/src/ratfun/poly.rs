//! Univariate polynomials and rational functions over `Q`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::numeric::{rat_to_string, BigRat};

/// Dense polynomial, lowest degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<BigRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRat::one())
    }

    pub fn constant(a: BigRat) -> Self {
        Poly::from_coeffs(vec![a])
    }

    pub fn from_int(a: i64) -> Self {
        Poly::constant(BigRat::from_integer(BigInt::from(a)))
    }

    /// The variable itself.
    pub fn x() -> Self {
        Poly::monomial(BigRat::one(), 1)
    }

    pub fn monomial(a: BigRat, deg: usize) -> Self {
        let mut c = vec![BigRat::zero(); deg + 1];
        c[deg] = a;
        Poly::from_coeffs(c)
    }

    pub fn from_coeffs(mut c: Vec<BigRat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::from_coeffs(c.iter().map(|&x| BigRat::from_integer(BigInt::from(x))).collect())
    }

    /// `prod (x - r)` over the given roots.
    pub fn from_roots(roots: &[BigRat]) -> Self {
        roots.iter().fold(Poly::one(), |acc, r| &acc * &Poly::from_coeffs(vec![-r.clone(), BigRat::one()]))
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.c.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> BigRat {
        self.c.last().cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn scale(&self, a: &BigRat) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|x| x * a).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(BigRat::one() / self.lead()))
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRat::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = BigRat::one() / d.lead();
        let mut q = vec![BigRat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = &r[i + dd] * &inv;
            if t.is_zero() {
                continue;
            }
            for (j, dj) in d.c.iter().enumerate() {
                r[i + j] -= &t * dj;
            }
            q[i] = t;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Quotient, panicking when the division is not exact.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRat) -> BigRat {
        self.c.iter().rev().fold(BigRat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(self.c.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// `p(a x + b)`.
    pub fn substitute_linear(&self, a: &BigRat, b: &BigRat) -> Poly {
        let lin = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        self.c.iter().rev().fold(Poly::zero(), |acc, c| &(&acc * &lin) + &Poly::constant(c.clone()))
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Gcd of the numerators of an integral polynomial.
    pub fn content_gcd(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer()))
    }

    /// Rational roots with multiplicity, found through the rational-root test on
    /// the primitive integral form. Remaining irrational factor is returned too.
    pub fn rational_roots(&self) -> (Vec<BigRat>, Poly) {
        let mut roots = Vec::new();
        let mut rest = self.clone();
        if rest.is_zero() {
            return (roots, rest);
        }
        while rest.coeff(0).is_zero() && !rest.is_constant() {
            roots.push(BigRat::zero());
            rest = Poly::from_coeffs(rest.c[1..].to_vec());
        }
        loop {
            if rest.is_constant() {
                break;
            }
            let ints = rest.scale(&BigRat::from_integer(rest.denominator_lcm()));
            let a0 = ints.coeff(0).numer().abs();
            let an = ints.lead().numer().abs();
            let mut found = None;
            'search: for num in divisors(&a0) {
                for den in divisors(&an) {
                    for s in [1, -1] {
                        let r = BigRat::new(&num * s, den.clone());
                        if rest.eval(&r).is_zero() {
                            found = Some(r);
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(r) => {
                    rest = rest.exact_div(&Poly::from_coeffs(vec![-r.clone(), BigRat::one()]));
                    roots.push(r);
                }
                None => break,
            }
        }
        roots.sort();
        (roots, rest)
    }

    pub fn fmt_var(&self, var: &str) -> String {
        fmt_terms(self.c.iter().enumerate().rev().map(|(i, c)| (c.clone(), mono(var, i as i64))))
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn mono(var: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    }
}

/// Joins `(coeff, monomial)` pairs as `a*m + b*m' - ...`.
pub(crate) fn fmt_terms(terms: impl Iterator<Item = (BigRat, String)>) -> String {
    let mut out = String::new();
    for (c, m) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        let body = if m.is_empty() {
            rat_to_string(&a)
        } else if a.is_one() {
            m
        } else {
            format!("{}*{}", rat_to_string(&a), m)
        };
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigRat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { c: self.c.iter().map(|x| -x).collect() }
    }
}

/// Reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFun::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        let l = d.lead();
        if !l.is_one() {
            let inv = BigRat::one() / l;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFun { num: n, den: d }
    }

    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFun::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(a: BigRat) -> Self {
        RatFun::from_poly(Poly::constant(a))
    }

    pub fn from_int(a: i64) -> Self {
        RatFun::from_poly(Poly::from_int(a))
    }

    pub fn x() -> Self {
        RatFun::from_poly(Poly::x())
    }

    /// `x^e` for any integer `e`.
    pub fn x_pow(e: i64) -> Self {
        if e >= 0 {
            RatFun::from_poly(Poly::monomial(BigRat::one(), e as usize))
        } else {
            RatFun { num: Poly::one(), den: Poly::monomial(BigRat::one(), (-e) as usize) }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn scale(&self, a: &BigRat) -> RatFun {
        if a.is_zero() {
            return RatFun::zero();
        }
        RatFun { num: self.num.scale(a), den: self.den.clone() }
    }

    pub fn inv(&self) -> RatFun {
        assert!(!self.is_zero(), "inverse of zero");
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> RatFun {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = RatFun::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    pub fn derivative(&self) -> RatFun {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun::new(n, &self.den * &self.den)
    }

    pub fn eval(&self, x: &BigRat) -> Option<BigRat> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn as_constant(&self) -> Option<BigRat> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.den.is_one_poly() {
            return self.num.fmt_var(var);
        }
        let paren = |p: &Poly| {
            let s = p.fmt_var(var);
            if p.c.iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", paren(&self.num), paren(&self.den))
    }
}

impl Poly {
    fn is_one_poly(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }
}

impl Add for &RatFun {
    type Output = RatFun;
    fn add(self, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(&self.num + &o.num, self.den.clone());
        }
        RatFun::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, o: &RatFun) -> RatFun {
        self + &(-o)
    }
}

impl Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        RatFun::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for &RatFun {
    type Output = RatFun;
    fn div(self, o: &RatFun) -> RatFun {
        self * &o.inv()
    }
}

impl Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_var("x"))
    }
}

impl Serialize for RatFun {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn poly_arithmetic() {
        let a = Poly::from_ints(&[1, 1]);
        let b = Poly::from_ints(&[1, -1]);
        assert_eq!(&a * &b, Poly::from_ints(&[1, 0, -1]));
        let (q, r) = Poly::from_ints(&[-1, 0, 0, 1]).divrem(&Poly::from_ints(&[-1, 1]));
        assert_eq!(q, Poly::from_ints(&[1, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(Poly::from_ints(&[-1, 0, 1]).gcd(&Poly::from_ints(&[1, 2, 1])), Poly::from_ints(&[1, 1]));
        assert_eq!(Poly::from_ints(&[3, 0, -2, 1]).fmt_var("psi"), "psi^3 - 2*psi^2 + 3");
    }

    #[test]
    fn rational_roots() {
        let p = Poly::from_roots(&[rat(1, 5), rat(2, 5), rat(-3, 2), rat(1, 5)]);
        let (roots, rest) = p.scale(&rat(7, 3)).rational_roots();
        assert_eq!(roots, vec![rat(-3, 2), rat(1, 5), rat(1, 5), rat(2, 5)]);
        assert!(rest.is_constant());
        let (roots, rest) = Poly::from_ints(&[2, 0, 1]).rational_roots();
        assert!(roots.is_empty());
        assert_eq!(rest.degree(), Some(2));
    }

    #[test]
    fn ratfun_normalization() {
        let f = RatFun::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[2, 2]));
        assert_eq!(f.num(), &Poly::from_coeffs(vec![rat(-1, 2), rat(1, 2)]));
        assert_eq!(f.den(), &Poly::one());
        let g = RatFun::x_pow(-2);
        assert_eq!((&g * &RatFun::x_pow(3)), RatFun::x());
        assert_eq!(g.derivative(), RatFun::x_pow(-3).scale(&rat(-2, 1)));
        let h = &RatFun::x_pow(-1) + &RatFun::one();
        assert_eq!(h.fmt_var("psi"), "(psi + 1)/psi");
    }
}
