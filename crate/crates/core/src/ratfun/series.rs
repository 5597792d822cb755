//! Truncated power series, log-blocked series, and operators polynomial in `theta`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::numeric::{rat_to_string, BigRat};

/// Commutative coefficient ring containing `Q`.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rat(a: &BigRat) -> Self;
    fn scale(&self, a: &BigRat) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Ring for BigRat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(a: &BigRat) -> Self {
        a.clone()
    }
    fn scale(&self, a: &BigRat) -> Self {
        self * a
    }
}

/// Polynomials over `Q` in formal symbols `Z2, Z3, Z4` standing for zeta values,
/// with no relations among them.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ZetaPoly {
    terms: BTreeMap<[u32; 3], BigRat>,
}

impl ZetaPoly {
    /// The symbol `Z_k` for `k` in `2..=4`.
    pub fn symbol(k: usize) -> Self {
        assert!((2..=4).contains(&k), "only Z2, Z3, Z4 are available");
        let mut e = [0; 3];
        e[k - 2] = 1;
        ZetaPoly { terms: BTreeMap::from([(e, <BigRat as One>::one())]) }
    }

    /// Total degree in the symbols, weighting `Z_k` by `k`.
    pub fn weight(&self) -> u32 {
        self.terms.keys().map(|e| 2 * e[0] + 3 * e[1] + 4 * e[2]).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> BigRat {
        self.terms.get(&[0, 0, 0]).cloned().unwrap_or_else(<BigRat as Zero>::zero)
    }

    /// Whether the value lies in `Q + Q Z2 + Q Z3 + Q Z4`.
    pub fn is_linear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() <= 1)
    }

    pub fn to_string_symbols(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut m = Vec::new();
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => m.push(format!("Z{}", i + 2)),
                        _ => m.push(format!("Z{}^{}", i + 2, k)),
                    }
                }
                if m.is_empty() {
                    rat_to_string(c)
                } else {
                    format!("{}*{}", rat_to_string(c), m.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    fn insert(&mut self, e: [u32; 3], c: BigRat) {
        let entry = self.terms.entry(e).or_insert_with(<BigRat as Zero>::zero);
        *entry += c;
        if Zero::is_zero(entry) {
            self.terms.remove(&e);
        }
    }
}

impl Ring for ZetaPoly {
    fn zero() -> Self {
        ZetaPoly::default()
    }
    fn one() -> Self {
        ZetaPoly::from_rat(&<BigRat as One>::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(*e, c.clone());
        }
        r
    }
    fn mul(&self, o: &Self) -> Self {
        let mut r = ZetaPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.insert([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        r
    }
    fn neg(&self) -> Self {
        ZetaPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
    fn from_rat(a: &BigRat) -> Self {
        let mut r = ZetaPoly::default();
        r.insert([0, 0, 0], a.clone());
        r
    }
    fn scale(&self, a: &BigRat) -> Self {
        if Zero::is_zero(a) {
            return ZetaPoly::default();
        }
        ZetaPoly { terms: self.terms.iter().map(|(e, c)| (*e, c * a)).collect() }
    }
}

/// `c_0 + c_1 t + ... + c_M t^M + O(t^{M+1})`.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<C: Ring = BigRat> {
    pub var: String,
    coeffs: Vec<C>,
}

impl<C: Ring> TruncSeries<C> {
    /// Series valid through `t^{coeffs.len() - 1}`.
    pub fn new(var: &str, coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least one coefficient");
        TruncSeries { var: var.into(), coeffs }
    }

    pub fn zero(var: &str, order: usize) -> Self {
        TruncSeries::new(var, vec![C::zero(); order + 1])
    }

    pub fn one(var: &str, order: usize) -> Self {
        let mut s = TruncSeries::zero(var, order);
        s.coeffs[0] = C::one();
        s
    }

    /// Highest exponent whose coefficient is known.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn truncate(&self, order: usize) -> Self {
        TruncSeries::new(&self.var, self.coeffs[..=order.min(self.order())].to_vec())
    }

    fn same_var(&self, o: &Self) -> Result<()> {
        if self.var != o.var {
            return Err(Error::VariableMismatch(self.var.clone(), o.var.clone()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_var(o)?;
        let m = self.order().min(o.order());
        Ok(TruncSeries::new(&self.var, (0..=m).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect()))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        TruncSeries::new(&self.var, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_var(o)?;
        let m = self.order().min(o.order());
        let mut out = vec![C::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(m + 1 - i) {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(TruncSeries::new(&self.var, out))
    }

    pub fn scale(&self, a: &BigRat) -> Self {
        TruncSeries::new(&self.var, self.coeffs.iter().map(|c| c.scale(a)).collect())
    }

    pub fn scale_ring(&self, a: &C) -> Self {
        TruncSeries::new(&self.var, self.coeffs.iter().map(|c| c.mul(a)).collect())
    }

    /// `theta = t d/dt`.
    pub fn theta(&self) -> Self {
        TruncSeries::new(
            &self.var,
            self.coeffs.iter().enumerate().map(|(k, c)| c.scale(&BigRat::from_integer(BigInt::from(k)))).collect(),
        )
    }

    /// Multiplication by `t^j`; the known range grows by `j`.
    pub fn shift(&self, j: usize) -> Self {
        let mut c = vec![C::zero(); j];
        c.extend(self.coeffs.iter().cloned());
        TruncSeries::new(&self.var, c)
    }

    /// `P(theta)` for a polynomial in `theta`.
    pub fn theta_poly(&self, p: &Poly) -> Self {
        TruncSeries::new(
            &self.var,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&p.eval(&BigRat::from_integer(BigInt::from(k)))))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// First exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl TruncSeries<BigRat> {
    /// `exp(f)` for `f(0) = 0`.
    pub fn exp(&self) -> Result<Self> {
        if !Zero::is_zero(&self.coeffs[0]) {
            return Err(Error::Precondition("exp needs a series without constant term".into()));
        }
        let m = self.order();
        // E' = f' E, so k e_k = sum_{j=1..k} j f_j e_{k-j}
        let mut e = vec![<BigRat as Zero>::zero(); m + 1];
        e[0] = <BigRat as One>::one();
        for k in 1..=m {
            let mut acc = <BigRat as Zero>::zero();
            for j in 1..=k {
                acc += BigRat::from_integer(BigInt::from(j)) * &self.coeffs[j] * &e[k - j];
            }
            e[k] = acc / BigRat::from_integer(BigInt::from(k));
        }
        Ok(TruncSeries::new(&self.var, e))
    }

    /// `log(f)` for `f(0) = 1`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Precondition("log needs a series with constant term 1".into()));
        }
        let m = self.order();
        // f L' = f', so k l_k = k f_k - sum_{j=1..k-1} j l_j f_{k-j}
        let mut l = vec![<BigRat as Zero>::zero(); m + 1];
        for k in 1..=m {
            let mut acc = BigRat::from_integer(BigInt::from(k)) * &self.coeffs[k];
            for j in 1..k {
                acc -= BigRat::from_integer(BigInt::from(j)) * &l[j] * &self.coeffs[k - j];
            }
            l[k] = acc / BigRat::from_integer(BigInt::from(k));
        }
        Ok(TruncSeries::new(&self.var, l))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_to_string).collect()
    }
}

/// `sum_j f_j(t) (log t)^j`, stored as the blocks `f_j`.
#[derive(Clone, PartialEq, Debug)]
pub struct LogSeries<C: Ring = BigRat> {
    pub blocks: Vec<TruncSeries<C>>,
}

impl<C: Ring> LogSeries<C> {
    pub fn new(blocks: Vec<TruncSeries<C>>) -> Self {
        assert!(!blocks.is_empty(), "at least one block");
        LogSeries { blocks }
    }

    pub fn from_series(s: TruncSeries<C>) -> Self {
        LogSeries { blocks: vec![s] }
    }

    pub fn order(&self) -> usize {
        self.blocks.iter().map(|b| b.order()).min().unwrap()
    }

    pub fn var(&self) -> &str {
        &self.blocks[0].var
    }

    /// `theta(f log^j) = theta(f) log^j + j f log^{j-1}`.
    pub fn theta(&self) -> Self {
        let mut out: Vec<TruncSeries<C>> = self.blocks.iter().map(|b| b.theta()).collect();
        for j in 1..self.blocks.len() {
            let add = self.blocks[j].scale(&BigRat::from_integer(BigInt::from(j)));
            out[j - 1] = out[j - 1].add(&add).expect("blocks share the variable");
        }
        LogSeries { blocks: out }
    }

    pub fn theta_poly(&self, p: &Poly) -> Self {
        let mut acc = self.scale(&<BigRat as Zero>::zero());
        let mut pow = self.clone();
        for (i, c) in p.coeffs().iter().enumerate() {
            if i > 0 {
                pow = pow.theta();
            }
            if !Zero::is_zero(c) {
                acc = acc.add(&pow.scale(c)).expect("same variable");
            }
        }
        acc
    }

    pub fn shift(&self, j: usize) -> Self {
        LogSeries { blocks: self.blocks.iter().map(|b| b.shift(j)).collect() }
    }

    pub fn scale(&self, a: &BigRat) -> Self {
        LogSeries { blocks: self.blocks.iter().map(|b| b.scale(a)).collect() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let n = self.blocks.len().max(o.blocks.len());
        let var = self.var().to_string();
        let ord = self.order().min(o.order());
        let mut blocks = Vec::with_capacity(n);
        for j in 0..n {
            let a = self.blocks.get(j).cloned().unwrap_or_else(|| TruncSeries::zero(&var, ord));
            let b = o.blocks.get(j).cloned().unwrap_or_else(|| TruncSeries::zero(&o.blocks[0].var, ord));
            blocks.push(a.add(&b)?);
        }
        Ok(LogSeries { blocks })
    }

    pub fn truncate(&self, order: usize) -> Self {
        LogSeries { blocks: self.blocks.iter().map(|b| b.truncate(order)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }
}

/// Operator `sum_j t^j P_j(theta)`, with `theta = t d/dt`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ThetaOperator {
    pub var: String,
    /// `(j, P_j)` with `P_j` as coefficient strings, lowest power of theta first.
    #[serde(with = "theta_terms")]
    pub terms: Vec<(usize, Poly)>,
}

mod theta_terms {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        power: usize,
        theta_poly: Vec<String>,
    }

    pub fn serialize<S: Serializer>(x: &[(usize, Poly)], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(|(j, p)| Term { power: *j, theta_poly: p.coeffs().iter().map(rat_to_string).collect() }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(usize, Poly)>, D::Error> {
        let v = Vec::<Term>::deserialize(d)?;
        v.into_iter()
            .map(|t| {
                let c: std::result::Result<Vec<BigRat>, _> =
                    t.theta_poly.iter().map(|s| crate::numeric::rat_from_str(s)).collect();
                c.map(|c| (t.power, Poly::from_coeffs(c))).map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

impl ThetaOperator {
    pub fn new(var: &str, mut terms: Vec<(usize, Poly)>) -> Self {
        terms.retain(|(_, p)| !p.is_zero());
        terms.sort_by_key(|(j, _)| *j);
        ThetaOperator { var: var.into(), terms }
    }

    /// Largest power of `theta` that occurs.
    pub fn order(&self) -> usize {
        self.terms.iter().filter_map(|(_, p)| p.degree()).max().unwrap_or(0)
    }

    /// The `theta` polynomial at `t = 0`; its roots are the local exponents.
    pub fn indicial(&self) -> Poly {
        self.terms.iter().find(|(j, _)| *j == 0).map(|(_, p)| p.clone()).unwrap_or_default()
    }

    pub fn apply<C: Ring>(&self, s: &LogSeries<C>) -> Result<LogSeries<C>> {
        if s.var() != self.var {
            return Err(Error::VariableMismatch(self.var.clone(), s.var().to_string()));
        }
        let ord = s.order();
        let mut acc: Option<LogSeries<C>> = None;
        for (j, p) in &self.terms {
            let t = s.theta_poly(p).shift(*j).truncate(ord);
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        Ok(acc.unwrap_or_else(|| s.scale(&<BigRat as Zero>::zero())))
    }

    pub fn apply_series<C: Ring>(&self, s: &TruncSeries<C>) -> Result<TruncSeries<C>> {
        Ok(self.apply(&LogSeries::from_series(s.clone()))?.blocks.remove(0))
    }

    /// Canonical text such as `t^4 - 5*l*(5t+1)*(5t+2)*(5t+3)*(5t+4)`: each
    /// `theta` polynomial is split into rational linear factors where possible.
    pub fn canonical_text(&self, var_symbol: &str) -> String {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (j, p) in &self.terms {
            let (neg, body) = factor_theta_poly(p);
            let var = match j {
                0 => String::new(),
                1 => var_symbol.to_string(),
                _ => format!("{var_symbol}^{j}"),
            };
            let mut pieces = Vec::new();
            if !body.0.is_empty() {
                pieces.push(body.0);
            }
            if !var.is_empty() {
                pieces.push(var);
            }
            pieces.extend(body.1);
            if pieces.is_empty() {
                pieces.push("1".into());
            }
            parts.push((neg, pieces.join("*")));
        }
        let mut out = String::new();
        for (i, (neg, s)) in parts.iter().enumerate() {
            if i == 0 {
                if *neg {
                    out.push('-');
                }
            } else {
                out.push_str(if *neg { " - " } else { " + " });
            }
            out.push_str(s);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}

/// Splits `c * prod (a t + b)` into sign, constant text and factor texts, with
/// integral primitive linear factors. Falls back to the expanded polynomial.
fn factor_theta_poly(p: &Poly) -> (bool, (String, Vec<String>)) {
    use num_traits::Signed;
    let (mut roots, rest) = p.rational_roots();
    roots.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
    let mut c = rest.lead();
    let mut factors = Vec::new();
    let mut powers: Vec<(BigRat, usize)> = Vec::new();
    for r in roots {
        match powers.last_mut() {
            Some((x, k)) if *x == r => *k += 1,
            _ => powers.push((r, 1)),
        }
    }
    for (r, k) in &powers {
        // t - r = (den t - num) / den
        let (num, den) = (r.numer().clone(), r.denom().clone());
        c /= BigRat::from_integer(den.pow(*k as u32));
        let f = if num.is_zero() {
            if den.is_one() {
                "t".to_string()
            } else {
                format!("{den}t")
            }
        } else {
            let lin = if den.is_one() { "t".to_string() } else { format!("{den}t") };
            let sign = if num.is_positive() { "-" } else { "+" };
            format!("({lin}{sign}{})", num.abs())
        };
        factors.push(if *k > 1 { format!("{f}^{k}") } else { f });
    }
    if !rest.is_constant() {
        factors.push(format!("({})", rest.monic().fmt_var("t")));
    }
    let neg = c.is_negative();
    let a = c.abs();
    let ctext = if a.is_one() && !factors.is_empty() { String::new() } else { rat_to_string(&a) };
    (neg, (ctext, factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{factorial_ratio, rat};

    fn quintic_period(m: usize) -> TruncSeries {
        TruncSeries::new("l", (0..=m as u64).map(|k| factorial_ratio(5 * k, k, 5)).collect())
    }

    fn quintic_operator() -> ThetaOperator {
        let t4 = Poly::from_ints(&[0, 0, 0, 0, 1]);
        let prod = (1..=4).fold(Poly::one(), |acc, i| &acc * &Poly::from_ints(&[i, 5]));
        ThetaOperator::new("l", vec![(0, t4), (1, prod.scale(&rat(-5, 1)))])
    }

    #[test]
    fn series_examples() {
        let a = TruncSeries::new("l", vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
        let b = TruncSeries::new("l", vec![rat(1, 1), rat(-1, 1), rat(0, 1)]);
        assert_eq!(a.mul(&b).unwrap().coeffs(), &[rat(1, 1), rat(0, 1), rat(-1, 1)]);
        let w = quintic_period(5);
        assert!(w.scale(&rat(0, 1)).is_zero());
        assert_eq!(w.mul(&w).unwrap().coeff(1), &rat(240, 1));
        let z = TruncSeries::new("z", vec![rat(1, 1)]);
        assert!(matches!(a.add(&z), Err(Error::VariableMismatch(_, _))));
    }

    #[test]
    fn theta_examples() {
        let s = TruncSeries::new("l", vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(s.theta().coeff(3), &rat(3, 1));
        // log t as a block
        let log: LogSeries = LogSeries::new(vec![TruncSeries::zero("l", 3), TruncSeries::one("l", 3)]);
        let t = log.theta();
        assert_eq!(t.blocks[0], TruncSeries::one("l", 3));
        assert!(t.blocks[1].is_zero());
    }

    #[test]
    fn quintic_operator_kills_period() {
        let r = quintic_operator().apply_series(&quintic_period(30)).unwrap();
        assert!(r.is_zero());
        assert_eq!(quintic_operator().canonical_text("l"), "t^4 - 5*l*(5t+1)*(5t+2)*(5t+3)*(5t+4)");
        assert_eq!(quintic_operator().order(), 4);
    }

    #[test]
    fn exp_log_round_trip() {
        let f = TruncSeries::new("T", vec![rat(0, 1), rat(2, 1), rat(1, 3), rat(-5, 7)]);
        assert_eq!(f.exp().unwrap().log().unwrap(), f);
    }

    #[test]
    fn zeta_symbols() {
        let z2 = ZetaPoly::symbol(2);
        let x = z2.add(&ZetaPoly::from_rat(&rat(1, 2)));
        assert!(x.is_linear());
        assert!(!x.mul(&z2).is_linear());
        assert_eq!(x.mul(&z2).weight(), 4);
        assert_eq!(x.sub(&z2).constant_term(), rat(1, 2));
    }
}
