//! Teichmüller characters, Jacobi sums in `Z/p^N`, Gauss-sum ratios, and a
//! complex-embedding path used only to validate Gauss-sum identities.
//!
//! Gauss sums themselves live in a ramified extension, so every p-adic quantity
//! here is assembled from Jacobi sums through `G_a G_b = J(a,b) G_{a+b}`,
//! `G_0 = -1` and `G_a G_{-a} = (-1)^a p`.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{make_ext_field, ExtField, FieldElem};
use crate::numeric::{is_prime, valuation_int, ModRing};

/// Default p-adic precision.
pub const DEFAULT_PRECISION: u32 = 5;

/// Character index reduced into `[0, q-2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharIndex {
    pub m: u64,
}

impl CharIndex {
    pub fn new(m: i64, q: u64) -> Self {
        CharIndex { m: m.rem_euclid(q as i64 - 1) as u64 }
    }
}

/// Teichmüller lift of a nonzero element of `F_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TeichValue {
    pub base: FieldElem,
    /// Coefficients in the lifted basis `1, t, ..., t^{r-1}` of the unramified ring.
    pub lift: Vec<ModRing>,
    pub precision: u32,
}

impl TeichValue {
    /// The lift as a residue mod `p^N` (prime-field case).
    pub fn scalar(&self) -> &ModRing {
        &self.lift[0]
    }
}

/// Arithmetic in `(Z/p^N)[t]/(f)` where `f` is the integer lift of the field modulus.
#[derive(Clone, Debug)]
pub struct UnramifiedRing {
    pub p: u64,
    pub n: u32,
    modulus: Vec<BigInt>,
    pn: BigUint,
}

impl UnramifiedRing {
    pub fn new(field: &ExtField, n: u32) -> Self {
        let pn = BigUint::from(field.p).pow(n);
        let modulus = field.modulus.iter().map(|&c| BigInt::from(c)).collect();
        UnramifiedRing { p: field.p, n, modulus, pn }
    }

    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn lift(&self, x: &FieldElem) -> Vec<ModRing> {
        x.coeffs.iter().map(|&c| ModRing::new(c, self.pn.clone())).collect()
    }

    pub fn one(&self) -> Vec<ModRing> {
        let mut v = vec![ModRing::zero(&self.pn); self.degree()];
        v[0] = ModRing::one(&self.pn);
        v
    }

    pub fn mul(&self, a: &[ModRing], b: &[ModRing]) -> Vec<ModRing> {
        let r = self.degree();
        let mut prod = vec![ModRing::zero(&self.pn); 2 * r - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = &prod[i + j] + &(x * y);
            }
        }
        // The modulus is monic, so t^r = -(lower terms).
        for d in (r..prod.len()).rev() {
            let c = prod[d].clone();
            if c.is_zero() {
                continue;
            }
            for (i, m) in self.modulus[..r].iter().enumerate() {
                let t = &c * &ModRing::new(m.clone(), self.pn.clone());
                prod[d - r + i] = &prod[d - r + i] - &t;
            }
            prod[d] = ModRing::zero(&self.pn);
        }
        prod.truncate(r);
        prod
    }

    pub fn pow(&self, a: &[ModRing], mut e: u128) -> Vec<ModRing> {
        let mut result = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }
}

/// Teichmüller lift `T(x) = lim x^{q^k}` to precision `N`.
pub fn teichmuller(x: &FieldElem, field: &ExtField, n: u32) -> Result<TeichValue> {
    if field.is_zero(x) {
        return Err(Error::Precondition("Teichmüller lift of 0 is undefined".into()));
    }
    let ring = UnramifiedRing::new(field, n);
    let q = field.q() as u128;
    let mut y = ring.lift(x);
    for _ in 0..n {
        y = ring.pow(&y, q);
    }
    Ok(TeichValue { base: x.clone(), lift: y, precision: n })
}

/// Teichmüller lift of an integer residue in `F_p`.
pub fn teichmuller_int(x: u64, p: u64, n: u32) -> Result<ModRing> {
    if x.is_multiple_of(p) {
        return Err(Error::Precondition("Teichmüller lift of 0 is undefined".into()));
    }
    let mut y = ModRing::padic(x, p, n);
    let pe = BigUint::from(p);
    for _ in 0..n {
        y = y.pow(&pe);
    }
    Ok(y)
}

/// Powers of the Teichmüller character on `F_p*`, tabulated through a generator.
#[derive(Clone, Debug)]
pub struct CharTable {
    pub p: u64,
    pub n: u32,
    /// `log[x]` is the discrete log of `x` to the field generator (unused at 0).
    log: Vec<u64>,
    /// `powers[k] = T(g)^k` for `k` in `0..p-1`.
    powers: Vec<ModRing>,
    modulus: BigUint,
}

impl CharTable {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let field = make_ext_field(p, 1)?;
        let g = field.generator[0];
        let mut log = vec![0u64; p as usize];
        let mut x = 1u64;
        for k in 0..p - 1 {
            log[x as usize] = k;
            x = x * g % p;
        }
        let tg = teichmuller_int(g, p, n)?;
        let modulus = tg.modulus().clone();
        let mut powers = Vec::with_capacity(p as usize - 1);
        let mut acc = ModRing::one(&modulus);
        for _ in 0..p - 1 {
            powers.push(acc.clone());
            acc = &acc * &tg;
        }
        Ok(CharTable { p, n, log, powers, modulus })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// `T^m(x)` for `x` in `F_p*`; `x` is taken mod `p`.
    pub fn char_value(&self, m: i64, x: u64) -> ModRing {
        let x = x % self.p;
        assert!(x != 0, "character evaluated at 0");
        let order = self.p as i64 - 1;
        let k = (m.rem_euclid(order) as u64 * self.log[x as usize]) % (order as u64);
        self.powers[k as usize].clone()
    }

    /// `J(a, b) = sum_{x != 0,1} T^a(x) T^b(1 - x)`.
    pub fn jacobi(&self, a: i64, b: i64) -> ModRing {
        let mut acc = ModRing::zero(&self.modulus);
        for x in 2..self.p {
            let t = &self.char_value(a, x) * &self.char_value(b, self.p + 1 - x);
            acc = &acc + &t;
        }
        acc
    }

    fn reduce(&self, m: i64) -> i64 {
        m.rem_euclid(self.p as i64 - 1)
    }

    fn sign(&self, a: i64) -> i64 {
        // T(-1) = -1 for odd p
        if self.p == 2 || self.reduce(a) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Collapses `prod G_{i}` into `v * p^e * G_s`.
    fn fold(&self, indices: &[i64]) -> (ModRing, u32, i64) {
        let mut v = ModRing::one(&self.modulus);
        let mut e = 0u32;
        let mut iter = indices.iter().map(|&i| self.reduce(i));
        let mut s = match iter.next() {
            Some(s) => s,
            None => return (-&v, 0, 0),
        };
        for a in iter {
            if s == 0 {
                v = -&v;
                s = a;
            } else if a == 0 {
                v = -&v;
            } else if self.reduce(s + a) == 0 {
                v = v.mul_int(-self.sign(s));
                e += 1;
                s = 0;
            } else {
                v = &v * &self.jacobi(s, a);
                s = self.reduce(s + a);
            }
        }
        (v, e, s)
    }
}

/// Exact ratio of Gauss-sum products as an element of `Z/p^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussRatio {
    pub indices: RatioIndices,
    pub p: u64,
    #[serde(rename = "N")]
    pub precision: u32,
    #[serde(with = "modring_string")]
    pub value: ModRing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioIndices {
    pub num: Vec<u64>,
    pub den: Vec<u64>,
    pub p_power: u32,
}

mod modring_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &ModRing, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.value().to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(_d: D) -> std::result::Result<ModRing, D::Error> {
        Err(serde::de::Error::custom("GaussRatio values are output only"))
    }
}

/// `prod G_num / prod G_den` in `Z/p^N`.
pub fn gauss_ratio(num: &[i64], den: &[i64], p: u64, n: u32) -> Result<GaussRatio> {
    gauss_ratio_scaled(num, den, 0, p, n)
}

/// `p^k * prod G_num / prod G_den` in `Z/p^N`; fails when the result is not
/// p-integral or when the two products do not telescope to the same index.
pub fn gauss_ratio_scaled(num: &[i64], den: &[i64], p_power: u32, p: u64, n: u32) -> Result<GaussRatio> {
    let slack = (num.len() + den.len()) as u32 + 1;
    let table = CharTable::new(p, n + slack)?;
    let value = ratio_with_table(&table, num, den, p_power, n)?;
    let q = p as i64;
    Ok(GaussRatio {
        indices: RatioIndices {
            num: num.iter().map(|&i| CharIndex::new(i, q as u64).m).collect(),
            den: den.iter().map(|&i| CharIndex::new(i, q as u64).m).collect(),
            p_power,
        },
        p,
        precision: n,
        value,
    })
}

/// Same as `gauss_ratio_scaled` but reusing a table whose precision exceeds `n`.
pub fn ratio_with_table(table: &CharTable, num: &[i64], den: &[i64], p_power: u32, n: u32) -> Result<ModRing> {
    let p = table.p;
    let (vn, en, sn) = table.fold(num);
    let (vd, ed, sd) = table.fold(den);
    if sn != sd {
        return Err(Error::DegenerateRatio(format!(
            "numerator telescopes to G_{sn}, denominator to G_{sd}; no Jacobi factorization"
        )));
    }
    let work = table.n;
    let exp = en as i64 + p_power as i64 - ed as i64;
    let vd_int = BigInt::from(vd.value().clone());
    let k = valuation_int(&vd_int, p)
        .ok_or_else(|| Error::DegenerateRatio(format!("denominator vanishes mod {p}^{work}")))? as i64;
    let total = exp - k;
    let vn_int = BigInt::from(vn.value().clone());
    let pe = |e: u32| BigInt::from(p).pow(e);
    // value = p^total * vn / (vd / p^k)
    let unit = ModRing::new(&vd_int / pe(k as u32), BigUint::from(p).pow(work - k as u32));
    let unit_inv = unit.inverse().expect("unit part is invertible");
    let (numer, prec) = if total >= 0 {
        let prec = (work as i64 - k + total).min(work as i64);
        (ModRing::new(vn_int * pe(total as u32), BigUint::from(p).pow(work)), prec)
    } else {
        let j = (-total) as u32;
        if !vn.is_zero() && valuation_int(&vn_int, p).unwrap() < j {
            return Err(Error::DegenerateRatio(format!("ratio is not p-integral (valuation deficit {j})")));
        }
        let prec = (work as i64 - j as i64).min(work as i64 - k);
        (ModRing::new(vn_int / pe(j), BigUint::from(p).pow(work)), prec)
    };
    if prec < n as i64 {
        return Err(Error::DegenerateRatio(format!("only {prec} p-adic digits available, {n} requested")));
    }
    let target = BigUint::from(p).pow(n);
    Ok(&numer.reduce_to(&target) * &unit_inv.reduce_to(&target))
}

/// `J(a, b)` mod `p^N`.
pub fn jacobi_sum(a: i64, b: i64, p: u64, n: u32) -> Result<ModRing> {
    Ok(CharTable::new(p, n)?.jacobi(a, b))
}

/// Complex Gauss sum, for validation only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexGauss {
    pub m: u64,
    pub p: u64,
    pub re: f64,
    pub im: f64,
}

impl ComplexGauss {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Complex embedding of the character: `chi(g^k) = exp(2 pi i k / (p-1))`.
fn complex_char(m: i64, x: u64, p: u64, log: &[u64]) -> Complex64 {
    let order = (p - 1) as i64;
    let k = (m.rem_euclid(order) as u64 * log[x as usize]) % order as u64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / order as f64)
}

fn discrete_logs(p: u64) -> Result<Vec<u64>> {
    let field = make_ext_field(p, 1)?;
    let g = field.generator[0];
    let mut log = vec![0u64; p as usize];
    let mut x = 1u64;
    for k in 0..p - 1 {
        log[x as usize] = k;
        x = x * g % p;
    }
    Ok(log)
}

/// `G_m = sum_{x != 0} zeta_p^x chi^m(x)` over the complex numbers.
pub fn complex_gauss_sum(m: i64, p: u64) -> Result<ComplexGauss> {
    let log = discrete_logs(p)?;
    let mut acc = Complex64::zero();
    for x in 1..p {
        let add = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x as f64 / p as f64);
        acc += add * complex_char(m, x, p, &log);
    }
    Ok(ComplexGauss { m: CharIndex::new(m, p).m, p, re: acc.re, im: acc.im })
}

/// Complex Jacobi sum with the same character embedding.
pub fn complex_jacobi_sum(a: i64, b: i64, p: u64) -> Result<Complex64> {
    let log = discrete_logs(p)?;
    let mut acc = Complex64::zero();
    for x in 2..p {
        acc += complex_char(a, x, p, &log) * complex_char(b, p + 1 - x, p, &log);
    }
    Ok(acc)
}

/// Sum of `T^i` over `F_p*` (orthogonality check helper).
pub fn character_sum(i: i64, p: u64, n: u32) -> Result<ModRing> {
    let t = CharTable::new(p, n)?;
    let mut acc = ModRing::zero(t.modulus());
    for x in 1..p {
        acc = &acc + &t.char_value(i, x);
    }
    Ok(acc)
}

/// `p^n` as a big integer.
pub fn p_pow(p: u64, n: u32) -> BigUint {
    BigUint::from(p).pow(n)
}

pub fn is_one(x: &ModRing) -> bool {
    x.value().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_examples() {
        let t = teichmuller_int(2, 7, 2).unwrap();
        assert_eq!(t.value(), &BigUint::from(30u32));
        assert!(is_one(&teichmuller_int(1, 7, 4).unwrap()));
        assert!(teichmuller_int(0, 7, 2).is_err());
        for x in 1..13u64 {
            let t = teichmuller_int(x, 13, 4).unwrap();
            assert!(is_one(&t.pow_u64(12)));
            assert_eq!(t.value() % 13u32, BigUint::from(x));
        }
    }

    #[test]
    fn extension_teichmuller_is_a_root_of_unity() {
        let f = make_ext_field(3, 2).unwrap();
        let ring = UnramifiedRing::new(&f, 3);
        for x in f.enumerate().skip(1) {
            let t = teichmuller(&x, &f, 3).unwrap();
            assert_eq!(ring.pow(&t.lift, 8), ring.one());
            let reduced: Vec<u64> = t.lift.iter().map(|c| (c.value() % 3u32).try_into().unwrap()).collect();
            assert_eq!(reduced, x.coeffs);
            assert_eq!(ring.pow(&t.lift, 9), t.lift);
        }
        let p7 = make_ext_field(7, 1).unwrap();
        let t = teichmuller(&p7.from_int(2), &p7, 2).unwrap();
        assert_eq!(t.scalar().value(), &BigUint::from(30u32));
    }

    #[test]
    fn jacobi_examples() {
        let j = jacobi_sum(0, 0, 7, 3).unwrap();
        assert_eq!(j.value(), &BigUint::from(5u32));
        assert!(jacobi_sum(1, 1, 7, 1).unwrap().is_zero());
    }

    #[test]
    fn trivial_ratio_is_one() {
        for m in 0..6 {
            let r = gauss_ratio(&[m], &[m], 7, 3).unwrap();
            assert!(is_one(&r.value));
        }
    }

    #[test]
    fn fifth_power_ratio_is_product_of_jacobi_sums() {
        let r = gauss_ratio(&[1, 1, 1, 1, 1], &[5], 7, 3).unwrap();
        let t = CharTable::new(7, 3).unwrap();
        let direct = &(&t.jacobi(1, 1) * &t.jacobi(1, 2)) * &(&t.jacobi(1, 3) * &t.jacobi(1, 4));
        assert_eq!(r.value, direct);
    }

    #[test]
    fn mismatched_telescoping_is_reported() {
        assert!(matches!(gauss_ratio(&[1], &[2], 7, 3), Err(Error::DegenerateRatio(_))));
    }

    #[test]
    fn complex_gauss_examples() {
        let g0 = complex_gauss_sum(0, 7).unwrap();
        assert!((g0.value() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let g1 = complex_gauss_sum(1, 3).unwrap();
        let gm1 = complex_gauss_sum(-1, 3).unwrap();
        assert!((g1.value() * gm1.value() - Complex64::new(-3.0, 0.0)).norm() < 1e-9);
        let z = |k: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / 3.0);
        assert!((g1.value() - (z(1.0) - z(2.0))).norm() < 1e-12);
    }

    #[test]
    fn gauss_ratio_json_shape() {
        let r = gauss_ratio(&[1, 1], &[2], 7, 2).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["p"], 7);
        assert_eq!(v["N"], 2);
        assert!(v["value"].is_string());
        assert_eq!(v["indices"]["num"], serde_json::json!([1, 1]));
    }
}
