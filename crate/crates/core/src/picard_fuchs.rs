//! Picard-Fuchs operators by Griffiths-Dwork reduction.
//!
//! A form `x^v Omega / F^k` is stored by its label `(v, k)`, with
//! `sum w_i (v_i + 1) = k d`. Internally labels are shifted to `m = v + 1`,
//! and the relation coming from the exact form `d(x^{m - 1 + e_i} ... / F^k)` reads
//!
//! `sum_j c_j B_ji P(m + B_j, k + 1) + c a_i psi P(m + a, k + 1) = (m_i / k) P(m, k)`
//!
//! for `F = sum_j c_j x^{B_j} + c psi x^a`. The relations only connect labels
//! whose difference lies in the lattice spanned by the `B_j` and `a`, so each
//! reduction works inside one coset (a sector) and is exact linear algebra
//! over `Q(psi)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FermatDeformation;
use crate::numeric::{rat_string, BigRat};
use crate::ratfun::{solve_dependency, Dependence, Poly, RatFun, ThetaOperator};

fn int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Exponent vector `v` of `x^v Omega / F^k` and the pole order `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomialLabel {
    pub exponents: Vec<u32>,
    pub pole: u32,
}

impl MonomialLabel {
    /// Label for `x^v`, with the pole order forced by homogeneity.
    pub fn new(exponents: Vec<u32>, family: &FermatDeformation) -> Result<Self> {
        if exponents.len() != family.nvars() {
            return Err(Error::Precondition(format!(
                "label has {} exponents, family has {} variables",
                exponents.len(),
                family.nvars()
            )));
        }
        let deg: u64 = exponents.iter().zip(&family.weights).map(|(&v, &w)| (v as u64 + 1) * w).sum();
        if !deg.is_multiple_of(family.degree) {
            return Err(Error::Precondition(format!(
                "weighted degree {deg} of x^v * (x_1 ... x_n) is not a multiple of {}",
                family.degree
            )));
        }
        Ok(MonomialLabel { exponents, pole: (deg / family.degree) as u32 })
    }

    fn key(&self) -> Key {
        (self.pole, self.exponents.iter().map(|&v| v as i64 + 1).collect())
    }

    fn from_key(k: &Key) -> Self {
        MonomialLabel { exponents: k.1.iter().map(|&m| (m - 1) as u32).collect(), pole: k.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonomialTerm {
    pub label: MonomialLabel,
    pub coeff: RatFun,
}

/// `(pole, v + 1)`; the ordering puts higher poles last.
type Key = (u32, Vec<i64>);
type Row = BTreeMap<Key, RatFun>;

fn add_to(row: &mut Row, key: Key, c: RatFun) {
    if c.is_zero() {
        return;
    }
    let e = row.entry(key.clone()).or_insert_with(RatFun::zero);
    *e = &*e + &c;
    if e.is_zero() {
        row.remove(&key);
    }
}

fn sub_scaled(row: &mut Row, pivot: &Row, c: &RatFun) {
    for (k, v) in pivot {
        let t = -&(c * v);
        let e = row.entry(k.clone()).or_insert_with(RatFun::zero);
        *e = &*e + &t;
        if e.is_zero() {
            row.remove(k);
        }
    }
}

/// Integer lattice in echelon form, for coset membership.
#[derive(Clone, Debug)]
struct Lattice {
    rows: Vec<(usize, Vec<i64>)>,
}

impl Lattice {
    fn new(gens: &[Vec<i64>]) -> Self {
        let dim = gens.first().map_or(0, |g| g.len());
        let mut work: Vec<Vec<i64>> = gens.to_vec();
        let mut rows = Vec::new();
        for c in 0..dim {
            loop {
                work.retain(|r| r.iter().any(|&x| x != 0));
                let nz: Vec<usize> = (0..work.len()).filter(|&i| work[i][c] != 0).collect();
                if nz.len() <= 1 {
                    if let Some(&i) = nz.first() {
                        let mut r = work.remove(i);
                        if r[c] < 0 {
                            r.iter_mut().for_each(|x| *x = -*x);
                        }
                        rows.push((c, r));
                    }
                    break;
                }
                let p = *nz.iter().min_by_key(|&&i| work[i][c].abs()).unwrap();
                let pr = work[p].clone();
                for &i in &nz {
                    if i != p {
                        let q = Integer::div_floor(&work[i][c], &pr[c]);
                        for j in 0..dim {
                            work[i][j] -= q * pr[j];
                        }
                    }
                }
            }
        }
        Lattice { rows }
    }

    fn contains(&self, v: &[i64]) -> bool {
        let mut v = v.to_vec();
        for (c, r) in &self.rows {
            if v[*c] % r[*c] != 0 {
                return false;
            }
            let q = v[*c] / r[*c];
            for j in 0..v.len() {
                v[j] -= q * r[j];
            }
        }
        v.iter().all(|&x| x == 0)
    }
}

/// Relations of one sector, in echelon form with distinct leading labels.
struct Reducer<'a> {
    fd: &'a FermatDeformation,
    lattice: Lattice,
    origin: Vec<i64>,
    pivots: HashMap<Key, Row>,
    max_pole: u32,
}

impl<'a> Reducer<'a> {
    fn new(fd: &'a FermatDeformation, origin: Vec<i64>) -> Self {
        let mut gens: Vec<Vec<i64>> = fd.base.iter().map(|(_, e)| e.iter().map(|&x| x as i64).collect()).collect();
        gens.push(fd.deformation.iter().map(|&x| x as i64).collect());
        Reducer { fd, lattice: Lattice::new(&gens), origin, pivots: HashMap::new(), max_pole: 1 }
    }

    fn in_sector(&self, m: &[i64]) -> bool {
        let d: Vec<i64> = m.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.lattice.contains(&d)
    }

    /// Points `m >= 0` of weighted degree `pole * d` in the sector.
    fn points(&self, pole: u32) -> Vec<Vec<i64>> {
        fn rec(w: &[u64], rest: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            let i = cur.len();
            if i == w.len() - 1 {
                if rest % w[i] as i64 == 0 {
                    cur.push(rest / w[i] as i64);
                    out.push(cur.clone());
                    cur.pop();
                }
                return;
            }
            let mut x = 0;
            while x * (w[i] as i64) <= rest {
                cur.push(x);
                rec(w, rest - x * w[i] as i64, cur, out);
                cur.pop();
                x += 1;
            }
        }
        let mut out = Vec::new();
        rec(&self.fd.weights, pole as i64 * self.fd.degree as i64, &mut Vec::new(), &mut out);
        out.retain(|m| self.in_sector(m));
        out
    }

    fn relation(&self, m: &[i64], k: u32, i: usize) -> Row {
        let mut row = Row::new();
        for (c, b) in &self.fd.base {
            if b[i] > 0 {
                let t: Vec<i64> = m.iter().zip(b).map(|(x, &y)| x + y as i64).collect();
                add_to(&mut row, (k + 1, t), RatFun::from_int(c * b[i] as i64));
            }
        }
        let a = &self.fd.deformation;
        if a[i] > 0 {
            let t: Vec<i64> = m.iter().zip(a).map(|(x, &y)| x + y as i64).collect();
            let c = RatFun::x().scale(&int(self.fd.deformation_coeff * a[i] as i64));
            add_to(&mut row, (k + 1, t), c);
        }
        if m[i] > 0 {
            add_to(&mut row, (k, m.to_vec()), RatFun::constant(-BigRat::new(BigInt::from(m[i]), BigInt::from(k))));
        }
        row
    }

    fn insert(&mut self, mut row: Row) {
        loop {
            let Some((lead, c)) = row.last_key_value() else { return };
            let (lead, c) = (lead.clone(), c.clone());
            match self.pivots.get(&lead) {
                Some(p) => sub_scaled(&mut row, p, &c),
                None => {
                    let inv = c.inv();
                    let row = row.into_iter().map(|(k, v)| (k, &v * &inv)).collect();
                    self.pivots.insert(lead, row);
                    return;
                }
            }
        }
    }

    /// Adds every relation whose labels have pole order at most `pole`.
    fn extend_to(&mut self, pole: u32) {
        while self.max_pole < pole {
            let k = self.max_pole;
            for m in self.points(k) {
                for i in 0..m.len() {
                    if m.iter().enumerate().all(|(l, &x)| l == i || x >= 1) {
                        let r = self.relation(&m, k, i);
                        self.insert(r);
                    }
                }
            }
            self.max_pole += 1;
        }
    }

    fn reduce(&self, mut row: Row) -> Row {
        let mut bound: Option<Key> = None;
        loop {
            let next = match &bound {
                None => row.keys().rev().find(|k| self.pivots.contains_key(*k)).cloned(),
                Some(b) => row.range(..b.clone()).rev().map(|(k, _)| k).find(|k| self.pivots.contains_key(*k)).cloned(),
            };
            let Some(k) = next else { return row };
            let c = row[&k].clone();
            sub_scaled(&mut row, &self.pivots[&k], &c);
            bound = Some(k);
        }
    }
}

fn row_to_terms(row: &Row) -> Vec<MonomialTerm> {
    row.iter().map(|(k, c)| MonomialTerm { label: MonomialLabel::from_key(k), coeff: c.clone() }).collect()
}

/// `d/dpsi (x^v Omega / F^k) = -k c x^{v + a} Omega / F^{k+1}` for the
/// deformation term `c psi x^a`.
pub fn psi_derivative(term: &MonomialTerm, family: &FermatDeformation) -> MonomialTerm {
    let k = term.label.pole as i64;
    let exps = term.label.exponents.iter().zip(&family.deformation).map(|(v, a)| v + a).collect();
    MonomialTerm {
        label: MonomialLabel { exponents: exps, pole: term.label.pole + 1 },
        coeff: term.coeff.scale(&int(-k * family.deformation_coeff)),
    }
}

/// One diagonal move: for a Fermat monomial `x_i^{d_i}` of the base and a label
/// with `v_i >= d_i`,
/// `x^{v + d_i e_i} / F^{k+1} = (v_i + 1)/(k d_i) x^v / F^k - (c a_i psi / d_i) x^{v + a} / F^{k+1}`.
pub fn diagonal_move(term: &MonomialTerm, i: usize, family: &FermatDeformation) -> Result<Vec<MonomialTerm>> {
    let touching: Vec<&(i64, Vec<u32>)> = family.base.iter().filter(|(_, e)| e[i] > 0).collect();
    let [(cb, e)] = touching.as_slice() else {
        return Err(Error::Reduction(format!("variable {} occurs in more than one base monomial", i + 1)));
    };
    if e.iter().enumerate().any(|(l, &x)| l != i && x != 0) {
        return Err(Error::Reduction(format!("base monomial for variable {} is not a pure power", i + 1)));
    }
    let di = e[i];
    let v = &term.label.exponents;
    if v[i] < di || term.label.pole < 2 {
        return Err(Error::Reduction(format!("x_{} exponent {} is below {di}", i + 1, v[i])));
    }
    let k = term.label.pole - 1;
    let mut low = v.clone();
    low[i] -= di;
    let lead = BigRat::from_integer(BigInt::from(*cb * di as i64));
    let first = MonomialTerm {
        label: MonomialLabel { exponents: low.clone(), pole: k },
        coeff: term.coeff.scale(&(int(low[i] as i64 + 1) / (int(k as i64) * &lead))),
    };
    let a = &family.deformation;
    let mut out = vec![first];
    if a[i] > 0 {
        let exps = low.iter().zip(a).map(|(x, y)| x + y).collect();
        let c = &term.coeff * &RatFun::x().scale(&(-int(family.deformation_coeff * a[i] as i64) / &lead));
        out.push(MonomialTerm { label: MonomialLabel { exponents: exps, pole: k + 1 }, coeff: c });
    }
    Ok(out)
}

/// Rewrites a combination of forms in the reduced basis of its sector, using
/// all relations up to the highest pole present. Labels that are already
/// basis elements come back unchanged.
pub fn griffiths_reduce(terms: &[MonomialTerm], family: &FermatDeformation) -> Result<Vec<MonomialTerm>> {
    let Some(first) = terms.first() else { return Ok(Vec::new()) };
    let mut red = Reducer::new(family, first.label.key().1);
    let mut row = Row::new();
    let mut top = 1;
    for t in terms {
        let key = t.label.key();
        if !red.in_sector(&key.1) {
            return Err(Error::Reduction("terms lie in different sectors".into()));
        }
        top = top.max(key.0);
        add_to(&mut row, key, t.coeff.clone());
    }
    red.extend_to(top);
    Ok(row_to_terms(&red.reduce(row)))
}

/// Reduces a single form and insists that the pole order drops.
pub fn reduce_pole(term: &MonomialTerm, family: &FermatDeformation) -> Result<Vec<MonomialTerm>> {
    let out = griffiths_reduce(std::slice::from_ref(term), family)?;
    if out.len() == 1 && out[0] == *term {
        return Ok(out);
    }
    if out.iter().any(|t| t.label.pole >= term.label.pole) {
        return Err(Error::Reduction(format!("x^{:?} is not in the Jacobian ideal", term.label.exponents)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum Variable {
    Psi,
    /// `u = scale * psi^(-power)`.
    Inverse {
        symbol: String,
        power: u32,
        #[serde(with = "rat_string")]
        scale: BigRat,
    },
}

impl Variable {
    /// `w = psi^(-n)`.
    pub fn w(n: u32) -> Self {
        Variable::Inverse { symbol: "w".into(), power: n, scale: int(1) }
    }

    /// `lambda = 1/(n psi)^n`.
    pub fn lambda(n: u32) -> Self {
        Variable::Inverse { symbol: "l".into(), power: n, scale: BigRat::one() / int(n as i64).pow(n as i32) }
    }

    /// `u = s psi^(-power)` under a chosen symbol.
    pub fn inverse(symbol: &str, power: u32, scale: BigRat) -> Self {
        Variable::Inverse { symbol: symbol.into(), power, scale }
    }

    pub fn symbol(&self) -> &str {
        match self {
            Variable::Psi => "psi",
            Variable::Inverse { symbol, .. } => symbol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    /// `sum c_r (d/dx)^r`
    D,
    /// `sum c_r (x d/dx)^r`
    Theta,
}

/// `sum_r c_r(x) X^r` with `X` either `d/dx` or `x d/dx`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferentialOperator {
    pub variable: Variable,
    pub style: Style,
    pub coeffs: Vec<RatFun>,
}

/// Coefficients of `t (t-1) ... (t-r+1)`.
fn falling(r: usize) -> Poly {
    (0..r as i64).fold(Poly::one(), |acc, j| &acc * &Poly::from_ints(&[-j, 1]))
}

impl DifferentialOperator {
    pub fn new(variable: Variable, style: Style, mut coeffs: Vec<RatFun>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Precondition("zero operator".into()));
        }
        Ok(DifferentialOperator { variable, style, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_theta(&self) -> Self {
        if self.style == Style::Theta {
            return self.clone();
        }
        // d^r = x^{-r} theta (theta - 1) ... (theta - r + 1)
        let mut out = vec![RatFun::zero(); self.coeffs.len()];
        for (r, c) in self.coeffs.iter().enumerate() {
            let scaled = c * &RatFun::x_pow(-(r as i64));
            for (j, f) in falling(r).coeffs().iter().enumerate() {
                out[j] = &out[j] + &scaled.scale(f);
            }
        }
        DifferentialOperator { variable: self.variable.clone(), style: Style::Theta, coeffs: out }
    }

    pub fn to_d(&self) -> Self {
        if self.style == Style::D {
            return self.clone();
        }
        // theta^j = sum_r S(j, r) x^r d^r
        let n = self.coeffs.len();
        let mut stirling = vec![vec![BigRat::zero(); n]; n];
        stirling[0][0] = BigRat::one();
        for j in 1..n {
            for r in 1..=j {
                stirling[j][r] = int(r as i64) * &stirling[j - 1][r] + &stirling[j - 1][r - 1];
            }
        }
        let mut out = vec![RatFun::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            for r in 0..=j {
                if !stirling[j][r].is_zero() {
                    out[r] = &out[r] + &(c * &RatFun::x_pow(r as i64)).scale(&stirling[j][r]);
                }
            }
        }
        DifferentialOperator { variable: self.variable.clone(), style: Style::D, coeffs: out }
    }

    /// Operator annihilating `x^e f` when `self` annihilates `f`.
    pub fn gauge(&self, e: i64) -> Self {
        let t = self.to_theta();
        let shift = Poly::from_ints(&[-e, 1]);
        let mut out = vec![RatFun::zero(); t.coeffs.len()];
        let mut pw = Poly::one();
        for c in &t.coeffs {
            for (j, f) in pw.coeffs().iter().enumerate() {
                out[j] = &out[j] + &c.scale(f);
            }
            pw = &pw * &shift;
        }
        DifferentialOperator { variable: t.variable, style: Style::Theta, coeffs: out }
    }

    /// Rewrites an operator in `psi` in terms of `u = s psi^(-p)`, using
    /// `psi d/dpsi = -p u d/du`. The coefficients must depend on `psi^p` only.
    pub fn change_variable(&self, target: &Variable) -> Result<Self> {
        if self.variable != Variable::Psi {
            return Err(Error::Unsupported(format!("conversion starts from psi, not {}", self.variable.symbol())));
        }
        let Variable::Inverse { power, scale, .. } = target else { return Ok(self.clone()) };
        let t = self.to_theta();
        let top = t.coeffs.last().unwrap().clone();
        let p = *power as usize;
        let sub = |poly: &Poly| -> Result<RatFun> {
            let mut acc = RatFun::zero();
            for (e, c) in poly.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if e % p != 0 {
                    return Err(Error::Unsupported(format!("coefficient is not a function of psi^{p}")));
                }
                let k = (e / p) as i64;
                acc = &acc + &RatFun::x_pow(-k).scale(&(c * scale.pow(k as i32)));
            }
            Ok(acc)
        };
        let mut out = Vec::with_capacity(t.coeffs.len());
        let mut factor = BigRat::one();
        for c in &t.coeffs {
            let r = c / &top;
            let conv = &sub(r.num())? / &sub(r.den())?;
            out.push(conv.scale(&factor));
            factor *= int(-(p as i64));
        }
        DifferentialOperator::new(target.clone(), Style::Theta, out)
    }

    /// Polynomial coefficients with no common factor, integral and primitive.
    /// The sign makes the top coefficient positive at infinity for `psi` and
    /// at the origin for the inverse variables.
    pub fn normalize(&self) -> Self {
        let l = self.coeffs.iter().fold(Poly::one(), |acc, c| {
            let g = acc.gcd(c.den());
            &acc * &c.den().exact_div(&g)
        });
        let polys: Vec<Poly> = self.coeffs.iter().map(|c| c.num() * &l.exact_div(c.den())).collect();
        let g = polys.iter().filter(|p| !p.is_zero()).fold(Poly::zero(), |acc, p| if acc.is_zero() { p.monic() } else { acc.gcd(p) });
        let polys: Vec<Poly> = polys.iter().map(|p| p.exact_div(&g)).collect();
        let den = polys.iter().fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator_lcm()));
        let polys: Vec<Poly> = polys.iter().map(|p| p.scale(&BigRat::from_integer(den.clone()))).collect();
        let content = polys.iter().fold(BigInt::zero(), |acc, p| acc.gcd(&p.content_gcd()));
        let mut s = BigRat::new(BigInt::one(), content);
        let top = polys.last().unwrap();
        let sign_term = match self.variable {
            Variable::Psi => top.lead(),
            Variable::Inverse { .. } => top.coeffs().iter().find(|c| !c.is_zero()).cloned().unwrap(),
        };
        if sign_term.is_negative() {
            s = -s;
        }
        DifferentialOperator {
            variable: self.variable.clone(),
            style: self.style,
            coeffs: polys.iter().map(|p| RatFun::from_poly(p.scale(&s))).collect(),
        }
    }

    /// `sum_j u^j P_j(theta)` form of a normalized theta operator.
    pub fn to_theta_operator(&self) -> Result<ThetaOperator> {
        let n = self.to_theta().normalize();
        let maxdeg = n.coeffs.iter().filter_map(|c| c.num().degree()).max().unwrap_or(0);
        let terms = (0..=maxdeg)
            .map(|j| (j, Poly::from_coeffs(n.coeffs.iter().map(|c| c.num().coeff(j)).collect())))
            .collect();
        Ok(ThetaOperator::new(self.variable.symbol(), terms))
    }

    pub fn text(&self) -> String {
        let x = self.variable.symbol();
        let op = match self.style {
            Style::D => "D",
            Style::Theta => "T",
        };
        let mut parts = Vec::new();
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.fmt_var(x);
            let cs = if c.is_poly() && c.num().coeffs().iter().filter(|a| !a.is_zero()).count() > 1 {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match r {
                0 => cs,
                1 => format!("{cs}*{op}"),
                _ => format!("{cs}*{op}^{r}"),
            });
        }
        parts.join(" + ")
    }
}

/// Result of a Griffiths-Dwork derivation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardFuchs {
    /// Monic operator in `d/dpsi` annihilating the period of the starting form.
    pub operator: DifferentialOperator,
    pub start: MonomialLabel,
    /// Reduced labels that span the derivatives.
    pub basis: Vec<MonomialLabel>,
    pub max_pole: u32,
}

/// Largest operator order searched before giving up.
pub const MAX_ORDER: usize = 12;

/// Differentiates `x^v Omega / F^k` in `psi`, reduces every derivative to the
/// sector basis, and returns the first monic linear dependence.
pub fn derive_picard_fuchs(family: &FermatDeformation, start: &[u32]) -> Result<PicardFuchs> {
    let label = MonomialLabel::new(start.to_vec(), family)?;
    let (k0, m0) = label.key();
    let mut red = Reducer::new(family, m0.clone());
    let a: Vec<i64> = family.deformation.iter().map(|&x| x as i64).collect();
    let mut raw: Vec<Row> = Vec::new();
    let mut coeff = RatFun::one();
    for s in 0..=MAX_ORDER {
        let m: Vec<i64> = m0.iter().zip(&a).map(|(x, y)| x + s as i64 * y).collect();
        let k = k0 + s as u32;
        let mut row = Row::new();
        row.insert((k, m), coeff.clone());
        raw.push(row);
        coeff = coeff.scale(&int(-(k as i64) * family.deformation_coeff));
        red.extend_to(k);
        let reduced: Vec<Row> = raw.iter().map(|r| red.reduce(r.clone())).collect();
        let mut keys: Vec<Key> = reduced.iter().flat_map(|r| r.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        let vectors: Vec<Vec<RatFun>> = reduced
            .iter()
            .map(|r| keys.iter().map(|k| r.get(k).cloned().unwrap_or_else(RatFun::zero)).collect())
            .collect();
        if let Dependence::Found(c) = solve_dependency(&vectors) {
            let operator = DifferentialOperator::new(Variable::Psi, Style::D, c)?;
            return Ok(PicardFuchs {
                operator,
                start: label,
                basis: keys.iter().map(MonomialLabel::from_key).collect(),
                max_pole: k,
            });
        }
    }
    Err(Error::NoDependence(format!("no relation among the first {} derivatives", MAX_ORDER + 1)))
}

/// Operator for the series computed by `frobenius::deformation_period`:
/// gauge by `psi` and pass to `z = (-c psi)^(-m0)`.
pub fn period_operator(family: &FermatDeformation, step: u32, symbol: &str) -> Result<ThetaOperator> {
    let ones = vec![0; family.nvars()];
    let pf = derive_picard_fuchs(family, &ones)?;
    let scale = (BigRat::one() / int(-family.deformation_coeff)).pow(step as i32);
    let var = Variable::inverse(symbol, step, scale);
    pf.operator.gauge(1).change_variable(&var)?.to_theta_operator()
}

/// `theta_w` acting on `omega_l = (-1)^(l-1) (l-1)! psi^l (x_1 ... x_n)^(l-1) Omega / F^l`
/// for the Dwork family, `theta_w = -(1/n) psi d/dpsi`. Row `j` expresses
/// `theta_w^j omega_1` in `omega_1 .. omega_{n-1}`.
pub fn invariant_basis_relations(n: usize) -> Result<Vec<Vec<BigRat>>> {
    let fd = crate::families::DworkFamily::new(n)?.as_deformation();
    let dim = n - 1;
    let omega = |l: u32| -> (RatFun, MonomialLabel) {
        let sign = if l % 2 == 1 { 1 } else { -1 };
        let f = crate::numeric::factorial(l as u64 - 1);
        let c = RatFun::x_pow(l as i64).scale(&(BigRat::from_integer(f) * int(sign)));
        (c, MonomialLabel { exponents: vec![l - 1; n], pole: l })
    };
    // theta_w omega_l as a vector over omega_1 .. omega_n
    let image = |l: u32| -> Result<Vec<BigRat>> {
        let (c, label) = omega(l);
        let scale = int(-1) / int(n as i64);
        let psi = RatFun::x();
        let mut out = vec![BigRat::zero(); n + 1];
        // product rule: (psi c') omega-form + c psi d/dpsi form
        let own = (&(&psi * &c.derivative()) / &c).scale(&scale);
        out[l as usize] += own.as_constant().ok_or_else(|| Error::Reduction("non-constant coefficient".into()))?;
        let d = psi_derivative(&MonomialTerm { label, coeff: &psi * &c }, &fd);
        let (cn, ln) = omega(l + 1);
        if d.label != ln {
            return Err(Error::Reduction("derivative left the invariant basis".into()));
        }
        let r = (&d.coeff / &cn).scale(&scale);
        out[l as usize + 1] += r.as_constant().ok_or_else(|| Error::Reduction("non-constant coefficient".into()))?;
        Ok(out)
    };
    let maps: Vec<Vec<BigRat>> = (1..=dim as u32).map(image).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(dim);
    let mut cur = vec![BigRat::zero(); n + 1];
    cur[1] = BigRat::one();
    for _ in 0..dim {
        rows.push(cur[1..=dim].to_vec());
        let mut next = vec![BigRat::zero(); n + 1];
        for l in 1..=dim {
            if cur[l].is_zero() {
                continue;
            }
            for (j, x) in maps[l - 1].iter().enumerate() {
                next[j] += &cur[l] * x;
            }
        }
        cur = next;
    }
    Ok(rows)
}

/// The K3 operator as printed, `psi^12 T^3 (T+3)(T+6)(T+9) - 2^8 3^9 (T-1)(T-2)(T-5)(T-7)(T-10)(T-11)`
/// with `T = psi d/dpsi`.
pub fn printed_k3_operator() -> DifferentialOperator {
    let lin = |a: i64| Poly::from_ints(&[a, 1]);
    let left = [0, 0, 0, 3, 6, 9].iter().fold(Poly::one(), |acc, &a| &acc * &lin(a));
    let right = [-1, -2, -5, -7, -10, -11].iter().fold(Poly::one(), |acc, &a| &acc * &lin(a));
    let c = int(2).pow(8) * int(3).pow(9);
    let coeffs = (0..=6)
        .map(|r| {
            let l = RatFun::x_pow(12).scale(&left.coeff(r));
            &l - &RatFun::constant(&c * right.coeff(r))
        })
        .collect();
    DifferentialOperator::new(Variable::Psi, Style::Theta, coeffs).expect("nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::DworkFamily;
    use crate::frobenius::{deformation_period, dwork_operator};
    use crate::numeric::rat;

    fn dwork(n: usize) -> FermatDeformation {
        DworkFamily::new(n).unwrap().as_deformation()
    }

    #[test]
    fn derivative_of_holomorphic_form() {
        let fd = dwork(5);
        let t = MonomialTerm { label: MonomialLabel::new(vec![0; 5], &fd).unwrap(), coeff: RatFun::one() };
        assert_eq!(t.label.pole, 1);
        let d = psi_derivative(&t, &fd);
        assert_eq!(d.label, MonomialLabel { exponents: vec![1; 5], pole: 2 });
        assert_eq!(d.coeff, RatFun::from_int(5));
        let dd = psi_derivative(&d, &fd);
        assert_eq!(dd.label.pole, 3);
        // cubic: d/dpsi I_n = 3 n I_{n+1}
        let c = dwork(3);
        let i2 = MonomialTerm { label: MonomialLabel { exponents: vec![1; 3], pole: 2 }, coeff: RatFun::one() };
        assert_eq!(psi_derivative(&i2, &c).coeff, RatFun::from_int(6));
    }

    #[test]
    fn quintic_diagonal_move() {
        let fd = dwork(5);
        // x^{v + 5 e_1} / F^3 with v = (1,1,1,1,1), k = 2
        let t = MonomialTerm { label: MonomialLabel::new(vec![6, 1, 1, 1, 1], &fd).unwrap(), coeff: RatFun::one() };
        assert_eq!(t.label.pole, 3);
        let out = diagonal_move(&t, 0, &fd).unwrap();
        assert_eq!(out[0].label, MonomialLabel { exponents: vec![1; 5], pole: 2 });
        assert_eq!(out[0].coeff, RatFun::constant(rat(1, 5)));
        assert_eq!(out[1].label, MonomialLabel { exponents: vec![2; 5], pole: 3 });
        assert_eq!(out[1].coeff, RatFun::x());
        let low = MonomialTerm { label: MonomialLabel::new(vec![0; 5], &fd).unwrap(), coeff: RatFun::one() };
        assert!(diagonal_move(&low, 0, &fd).is_err());
    }

    #[test]
    fn holomorphic_form_is_already_reduced() {
        let fd = dwork(5);
        let t = MonomialTerm { label: MonomialLabel::new(vec![0; 5], &fd).unwrap(), coeff: RatFun::one() };
        assert_eq!(reduce_pole(&t, &fd).unwrap(), vec![t]);
    }

    #[test]
    fn reduction_agrees_with_diagonal_move() {
        let fd = dwork(3);
        let t = MonomialTerm { label: MonomialLabel::new(vec![3, 0, 0], &fd).unwrap(), coeff: RatFun::one() };
        let direct = griffiths_reduce(std::slice::from_ref(&t), &fd).unwrap();
        let moved = diagonal_move(&t, 0, &fd).unwrap();
        assert_eq!(griffiths_reduce(&moved, &fd).unwrap(), direct);
    }

    #[test]
    fn quintic_operator_in_lambda() {
        let pf = derive_picard_fuchs(&dwork(5), &[0; 5]).unwrap();
        assert_eq!(pf.operator.order(), 4);
        let op = pf.operator.gauge(1).change_variable(&Variable::lambda(5)).unwrap().to_theta_operator().unwrap();
        assert_eq!(op, dwork_operator(5));
        assert_eq!(op.canonical_text("l"), "t^4 - 5*l*(5t+1)*(5t+2)*(5t+3)*(5t+4)");
    }

    #[test]
    fn cubic_operator() {
        let pf = derive_picard_fuchs(&dwork(3), &[0; 3]).unwrap();
        assert_eq!(pf.operator.order(), 2);
        let n = pf.operator.normalize();
        let expect = vec![RatFun::x(), RatFun::x_pow(2).scale(&rat(3, 1)), &RatFun::x_pow(3) - &RatFun::one()];
        assert_eq!(n.coeffs, expect);
        let z = pf.operator.gauge(1).change_variable(&Variable::w(3)).unwrap().to_theta_operator().unwrap();
        let lin = |a: BigRat| Poly::from_coeffs(vec![a, rat(1, 1)]);
        let expect = ThetaOperator::new(
            "w",
            vec![(0, Poly::monomial(rat(9, 1), 2)), (1, (&lin(rat(1, 3)) * &lin(rat(2, 3))).scale(&rat(-9, 1)))],
        );
        assert_eq!(z, expect);
    }

    #[test]
    fn conversions_round_trip() {
        let pf = derive_picard_fuchs(&dwork(3), &[0; 3]).unwrap();
        assert_eq!(pf.operator.to_theta().to_d(), pf.operator);
        assert_eq!(pf.operator.gauge(2).gauge(-2).to_d().normalize(), pf.operator.normalize());
    }

    #[test]
    fn period_operators_annihilate_series() {
        for fd in [dwork(3), dwork(4), dwork(5)] {
            let (series, step) = deformation_period(&fd, 20).unwrap();
            let op = period_operator(&fd, step as u32, "z").unwrap();
            assert!(op.apply_series(&series).unwrap().is_zero());
        }
    }

    #[test]
    fn quintic_invariant_basis() {
        let m = invariant_basis_relations(5).unwrap();
        assert_eq!(m[0], vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(m[1], vec![rat(-1, 5), rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(m[2], vec![rat(1, 25), rat(-3, 5), rat(1, 1), rat(0, 1)]);
        assert_eq!(m[3], vec![rat(-1, 125), rat(7, 25), rat(-6, 5), rat(1, 1)]);
    }

    #[test]
    fn k3_operator() {
        let fd = FermatDeformation::k3_3678();
        let (series, step) = deformation_period(&fd, 30).unwrap();
        assert_eq!(step, 12);
        let op = period_operator(&fd, 12, "z").unwrap();
        assert_eq!(op.order(), 6);
        assert!(op.apply_series(&series).unwrap().is_zero());
        let printed = printed_k3_operator().change_variable(&Variable::w(12)).unwrap().to_theta_operator().unwrap();
        assert_eq!(op.canonical_text("z"), printed.canonical_text("z"));
    }

    #[test]
    fn lattice_membership() {
        let l = Lattice::new(&[vec![3, 0], vec![0, 3], vec![1, 1]]);
        assert!(l.contains(&[2, 2]));
        assert!(l.contains(&[4, 1]));
        assert!(!l.contains(&[1, 0]));
    }
}
