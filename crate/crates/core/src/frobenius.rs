//! Frobenius-method solutions at the point of maximal unipotent monodromy,
//! hypergeometric parameter recovery, and the zeta-value change of basis to
//! the unnormalized solutions.
//!
//! Blocks are normalized so that every coefficient is rational: with
//! `a_k(s) = Gamma(n(k+s)+1)/Gamma(k+s+1)^n` we use `a_k(s)/a_0(s)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FermatDeformation;
use crate::numeric::{binomial, factorial, harmonic, rat_vec_string, BigRat};
use crate::ratfun::{LogSeries, Poly, Ring, ThetaOperator, TruncSeries, ZetaPoly};

pub const DEFAULT_TRUNCATION: usize = 30;

fn int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// `(nk)!/(k!)^n`, `k = 0..=m`, in the variable `l = 1/(n psi)^n`.
pub fn dwork_period(n: u64, m: usize) -> TruncSeries {
    TruncSeries::new(
        "l",
        (0..=m as u64).map(|k| BigRat::from_integer(factorial(n * k) / factorial(k).pow(n as u32))).collect(),
    )
}

/// Holomorphic period of `G + c psi x^a` at large `psi`, normalized by the
/// factor `c psi`, as a series in `z = (-c psi)^{-m0}`. The coefficient of
/// `z^k` is the multinomial `m!/prod n_j!` with `m = k m0` and `n` the unique
/// solution of `sum n_j B_j = m a`, `sum n_j = m`.
pub fn deformation_period(fd: &FermatDeformation, order: usize) -> Result<(TruncSeries, u64)> {
    let nb = fd.base.len();
    let nv = fd.nvars();
    if nb != nv {
        return Err(Error::Unsupported("period series needs as many base monomials as variables".into()));
    }
    // columns B_j, solve B n = a with rationals (for m = 1), sum n_j = 1 follows from homogeneity
    let rows: Vec<Vec<BigRat>> =
        (0..nv).map(|i| fd.base.iter().map(|(_, e)| int(e[i] as i64)).collect()).collect();
    let rhs: Vec<BigRat> = fd.deformation.iter().map(|&x| int(x as i64)).collect();
    let n = solve_rational(rows, rhs).ok_or_else(|| Error::Unsupported("base exponent matrix is singular".into()))?;
    if n.iter().any(|x| x.is_negative()) {
        return Err(Error::Unsupported("deformation monomial is outside the base cone".into()));
    }
    if n.iter().sum::<BigRat>() != <BigRat as One>::one() {
        return Err(Error::Unsupported("deformation is not homogeneous for the base".into()));
    }
    if fd.base.iter().any(|(c, _)| *c != 1) {
        return Err(Error::Unsupported("base coefficients other than 1".into()));
    }
    let m0 = n.iter().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let m0: u64 = m0.try_into().map_err(|_| Error::Unsupported("period step too large".into()))?;
    let coeffs = (0..=order as u64)
        .map(|k| {
            let m = k * m0;
            let mut c = factorial(m);
            for x in &n {
                let nj = (x * int(m as i64)).to_integer();
                c /= factorial(nj.try_into().unwrap());
            }
            BigRat::from_integer(c)
        })
        .collect();
    Ok((TruncSeries::new("z", coeffs), m0))
}

fn solve_rational(mut a: Vec<Vec<BigRat>>, mut b: Vec<BigRat>) -> Option<Vec<BigRat>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !Zero::is_zero(&a[i][c]))?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = <BigRat as One>::one() / &a[c][c];
        for i in 0..n {
            if i == c || Zero::is_zero(&a[i][c]) {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
            let t = &f * &b[c];
            b[i] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Local exponents: roots with multiplicity of the indicial polynomial.
pub fn indicial_roots(op: &ThetaOperator) -> Result<Vec<BigRat>> {
    let ind = op.indicial();
    if ind.is_zero() {
        return Err(Error::Precondition("operator has no theta part at the origin".into()));
    }
    let (roots, rest) = ind.rational_roots();
    if !rest.is_constant() {
        return Err(Error::Fit(format!("indicial polynomial has irrational factor {}", rest.fmt_var("t"))));
    }
    Ok(roots)
}

/// `g_j[k] = j! [s^j] a_k(s)/a_0(s)` for the Dwork family of degree `n`,
/// `j < count`, `k < terms`.
pub fn normalized_log_coefficients(n: u64, terms: usize, count: usize) -> Vec<Vec<BigRat>> {
    let mut g = vec![vec![<BigRat as Zero>::zero(); terms]; count];
    let nn = int(n as i64);
    for k in 0..terms as u64 {
        let a0 = BigRat::from_integer(factorial(n * k) / factorial(k).pow(n as u32));
        let mut log = vec![<BigRat as Zero>::zero(); count.max(1)];
        for (r, slot) in log.iter_mut().enumerate().skip(1) {
            let sign = if r % 2 == 1 { int(1) } else { int(-1) };
            let h = nn.pow(r as i32) * harmonic(n * k, r as u32) - &nn * harmonic(k, r as u32);
            *slot = sign * h / int(r as i64);
        }
        let e = TruncSeries::new("s", log).exp().expect("no constant term");
        let mut f = <BigRat as One>::one();
        for (j, row) in g.iter_mut().enumerate() {
            if j > 0 {
                f *= int(j as i64);
            }
            row[k as usize] = &a0 * e.coeff(j) * &f;
        }
    }
    g
}

/// One Frobenius solution `sum_j C(i, j) g_j (log l)^{i-j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSolution {
    pub index: usize,
    pub blocks: Vec<TruncSeries>,
}

impl LogSolution {
    /// Solution as a series in blocks of `log l`.
    pub fn assemble(&self) -> LogSeries {
        let i = self.index;
        let blocks = (0..=i)
            .map(|p| {
                // log power p comes from j = i - p
                let j = i - p;
                self.blocks[j].scale(&BigRat::from_integer(binomial(i as u64, j as u64)))
            })
            .collect();
        LogSeries::new(blocks)
    }
}

impl Serialize for LogSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            index: usize,
            rule: String,
            blocks: Vec<Vec<String>>,
        }
        Out {
            index: self.index,
            rule: format!("w_{0} = sum_j C({0},j) g_j log(l)^({0}-j)", self.index),
            blocks: self.blocks.iter().map(|b| b.to_strings()).collect(),
        }
        .serialize(s)
    }
}

/// Solutions `w_0..w_{i_max}` of the Dwork-`n` operator with `M + 1` terms.
pub fn log_solutions(n: u64, i_max: usize, m: usize) -> Result<Vec<LogSolution>> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if i_max + 1 > n as usize - 1 {
        return Err(Error::Precondition(format!(
            "the degree-{n} operator has order {}, so only w_0..w_{} are solutions",
            n - 1,
            n - 2
        )));
    }
    let g = normalized_log_coefficients(n, m + 1, i_max + 1);
    let series: Vec<TruncSeries> = g.into_iter().map(|c| TruncSeries::new("l", c)).collect();
    Ok((0..=i_max).map(|i| LogSolution { index: i, blocks: series[..=i].to_vec() }).collect())
}

/// `theta^{n-1} - n l prod_{i=1}^{n-1} (n theta + i)`, the operator of the Dwork family in `l`.
pub fn dwork_operator(n: u64) -> ThetaOperator {
    let top = Poly::monomial(<BigRat as One>::one(), n as usize - 1);
    let prod = (1..n as i64).fold(Poly::one(), |acc, i| &acc * &Poly::from_ints(&[i, n as i64]));
    ThetaOperator::new("l", vec![(0, top), (1, prod.scale(&int(-(n as i64))))])
}

/// `m! [s^m] a_0(s)` for `m = 0..=order`, where
/// `log a_0(s) = sum_{r>=2} (-1)^r (n^r - n) zeta(r) s^r / r`.
pub fn gamma_ratio_expansion(n: u64, order: usize) -> Vec<ZetaPoly> {
    assert!(order <= 4, "zeta symbols only go up to Z4");
    let mut out = vec![ZetaPoly::zero(); order + 1];
    let nn = int(n as i64);
    for (r, slot) in out.iter_mut().enumerate().skip(2) {
        let sign = if r % 2 == 0 { int(1) } else { int(-1) };
        let c = sign * (nn.pow(r as i32) - &nn) / int(r as i64);
        *slot = ZetaPoly::symbol(r).scale(&c);
    }
    let mut f = <BigRat as One>::one();
    exp_ring(&out)
        .into_iter()
        .enumerate()
        .map(|(m, e)| {
            if m > 0 {
                f *= int(m as i64);
            }
            e.scale(&f)
        })
        .collect()
}

fn exp_ring(log: &[ZetaPoly]) -> Vec<ZetaPoly> {
    let m = log.len() - 1;
    let mut e = vec![ZetaPoly::zero(); m + 1];
    e[0] = ZetaPoly::one();
    for k in 1..=m {
        let mut acc = ZetaPoly::zero();
        for j in 1..=k {
            acc = acc.add(&log[j].scale(&int(j as i64)).mul(&e[k - j]));
        }
        e[k] = acc.scale(&(<BigRat as One>::one() / int(k as i64)));
    }
    e
}

/// Unnormalized blocks `j! [s^j] a_k(s)` computed directly from the expansion
/// `log Gamma(m+1+s) = log m! + s(-gamma + H_m) + sum_{r>=2} (-1)^r (zeta(r) - H_m^(r)) s^r / r`.
/// Valid for `j <= 4`.
pub fn unnormalized_log_coefficients(n: u64, terms: usize, count: usize) -> Vec<Vec<ZetaPoly>> {
    assert!(count <= 5, "zeta symbols only go up to Z4");
    let nn = int(n as i64);
    let mut g = vec![vec![ZetaPoly::zero(); terms]; count];
    for k in 0..terms as u64 {
        let a0 = BigRat::from_integer(factorial(n * k) / factorial(k).pow(n as u32));
        let mut log = vec![ZetaPoly::zero(); count.max(1)];
        for (r, slot) in log.iter_mut().enumerate().skip(1) {
            // numerator Gamma(nk + 1 + ns) contributes with s -> n s
            let nr = nn.pow(r as i32);
            let x = if r == 1 {
                ZetaPoly::from_rat(&(&nr * harmonic(n * k, 1) - &nn * harmonic(k, 1)))
            } else {
                let sign = if r % 2 == 0 { int(1) } else { int(-1) };
                let z = ZetaPoly::symbol(r);
                let top = z.sub(&ZetaPoly::from_rat(&harmonic(n * k, r as u32))).scale(&nr);
                let bot = z.sub(&ZetaPoly::from_rat(&harmonic(k, r as u32))).scale(&nn);
                top.sub(&bot).scale(&(sign / int(r as i64)))
            };
            *slot = x;
        }
        let e = exp_ring(&log);
        let mut f = <BigRat as One>::one();
        for (j, row) in g.iter_mut().enumerate() {
            if j > 0 {
                f *= int(j as i64);
            }
            row[k as usize] = e[j].scale(&(&a0 * &f));
        }
    }
    g
}

/// Unnormalized solution `i` assembled in zeta-symbol coefficients.
pub fn unnormalized_solution(n: u64, i: usize, m: usize) -> LogSeries<ZetaPoly> {
    let g = unnormalized_log_coefficients(n, m + 1, i + 1);
    LogSeries::new(
        (0..=i)
            .map(|p| {
                let j = i - p;
                TruncSeries::new("l", g[j].clone()).scale(&BigRat::from_integer(binomial(i as u64, j as u64)))
            })
            .collect(),
    )
}

/// Writes each unnormalized solution in the normalized basis. Row `i` holds
/// the coefficients of `w_0..w_i`; the peeling is exact and the residual is
/// checked to vanish.
pub fn unnormalized_change_of_basis(n: u64, i_max: usize, m: usize) -> Result<Vec<Vec<ZetaPoly>>> {
    let norm = normalized_log_coefficients(n, m + 1, i_max + 1);
    let lift = |i: usize| -> LogSeries<ZetaPoly> {
        LogSeries::new(
            (0..=i)
                .map(|p| {
                    let j = i - p;
                    let b = BigRat::from_integer(binomial(i as u64, j as u64));
                    TruncSeries::new("l", norm[j].iter().map(|c| ZetaPoly::from_rat(&(c * &b))).collect())
                })
                .collect(),
        )
    };
    let mut rows = Vec::new();
    for i in 0..=i_max {
        let mut residual = unnormalized_solution(n, i, m);
        let mut row = vec![ZetaPoly::zero(); i + 1];
        for j in (0..=i).rev() {
            let c = residual.blocks.get(j).map(|b| b.coeff(0).clone()).unwrap_or_else(ZetaPoly::zero);
            if !c.is_zero() {
                let w = lift(j);
                let scaled = LogSeries::new(w.blocks.iter().map(|b| b.scale_ring(&c)).collect());
                residual = residual.add(&scaled.scale(&int(-1)))?;
            }
            row[j] = c;
        }
        if !residual.is_zero() {
            return Err(Error::Fit(format!("unnormalized solution {i} is not in the span of the normalized ones")));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `sum_k C(k) z^k` with `C(k+1)/C(k) = c prod (k + a_i) / (prod (k + b_j) (k + 1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergeometricData {
    #[serde(with = "rat_vec_string")]
    pub upper: Vec<BigRat>,
    #[serde(with = "rat_vec_string")]
    pub lower: Vec<BigRat>,
    #[serde(with = "crate::numeric::rat_string")]
    pub scale: BigRat,
    pub variable: String,
}

impl HypergeometricData {
    pub fn series(&self, m: usize) -> TruncSeries {
        let mut c = vec![<BigRat as One>::one()];
        for k in 0..m {
            let kk = int(k as i64);
            let num = self.upper.iter().fold(self.scale.clone(), |acc, a| acc * (&kk + a));
            let den = self.lower.iter().fold(&kk + int(1), |acc, b| acc * (&kk + b));
            let next = &c[k] * num / den;
            c.push(next);
        }
        TruncSeries::new(&self.variable, c)
    }

    /// `theta prod (theta + b_j - 1) - c z prod (theta + a_i)`.
    pub fn operator(&self) -> ThetaOperator {
        let lin = |x: &BigRat| Poly::from_coeffs(vec![x.clone(), <BigRat as One>::one()]);
        let left = self.lower.iter().fold(Poly::x(), |acc, b| &acc * &lin(&(b - int(1))));
        let right = self.upper.iter().fold(Poly::constant(-self.scale.clone()), |acc, a| &acc * &lin(a));
        ThetaOperator::new(&self.variable, vec![(0, left), (1, right)])
    }
}

/// Recovers hypergeometric data from series coefficients by fitting
/// `C(k+1) D(k) = C(k) P(k)` with `deg P = deg D = d` and `D` monic, for the
/// smallest `d` consistent with every available coefficient.
pub fn extract_hypergeometric(series: &TruncSeries) -> Result<HypergeometricData> {
    let c = series.coeffs();
    let nonzero = c.iter().take_while(|x| !Zero::is_zero(*x)).count();
    if nonzero < 12 {
        return Err(Error::Fit(format!("need 12 nonzero leading coefficients, have {nonzero}")));
    }
    if !c[0].is_one() {
        return Err(Error::Fit("series must start with 1".into()));
    }
    let ratios: Vec<(BigRat, BigRat)> = (0..nonzero - 1).map(|k| (c[k].clone(), c[k + 1].clone())).collect();
    for d in 0..=((ratios.len() - 1) / 2).min(8) {
        // unknowns: p_0..p_d, then d_0..d_{d-1}; D = k^d + sum d_i k^i
        let neq = 2 * d + 1;
        let rows: Vec<Vec<BigRat>> = (0..neq)
            .map(|k| {
                let kk = int(k as i64);
                let (ck, ck1) = &ratios[k];
                let mut row: Vec<BigRat> = (0..=d).map(|i| -(ck * kk.pow(i as i32))).collect();
                row.extend((0..d).map(|i| ck1 * kk.pow(i as i32)));
                row
            })
            .collect();
        let rhs: Vec<BigRat> = (0..neq).map(|k| -(&ratios[k].1 * int(k as i64).pow(d as i32))).collect();
        let Some(sol) = solve_rational(rows, rhs) else { continue };
        let p = Poly::from_coeffs(sol[..=d].to_vec());
        let mut dc = sol[d + 1..].to_vec();
        dc.push(<BigRat as One>::one());
        let dpoly = Poly::from_coeffs(dc);
        let fits = ratios.iter().enumerate().all(|(k, (ck, ck1))| {
            let kk = int(k as i64);
            ck1 * dpoly.eval(&kk) == ck * p.eval(&kk)
        });
        if !fits || p.is_zero() {
            continue;
        }
        let (mut up, rest_p) = p.rational_roots();
        let (mut down, rest_d) = dpoly.rational_roots();
        if !rest_p.is_constant() || !rest_d.is_constant() {
            return Err(Error::Fit("ratio has irrational parameters".into()));
        }
        let scale = rest_p.lead();
        // the factor (k + 1) of the lower side is the k! of the series
        match down.iter().position(|r| *r == int(-1)) {
            Some(pos) => {
                down.remove(pos);
            }
            None => up.push(int(-1)),
        }
        let mut upper: Vec<BigRat> = up.iter().map(|r| -r).collect();
        let mut lower: Vec<BigRat> = down.iter().map(|r| -r).collect();
        upper.sort();
        lower.sort();
        return Ok(HypergeometricData { upper, lower, scale, variable: series.var.clone() });
    }
    Err(Error::Fit("no rational ratio of degree at most 8 fits".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn period_coefficients() {
        let q = dwork_period(5, 2);
        assert_eq!(q.coeffs(), &[rat(1, 1), rat(120, 1), rat(113400, 1)]);
        assert_eq!(dwork_period(3, 1).coeff(1), &rat(6, 1));
    }

    #[test]
    fn deformation_period_matches_dwork() {
        let fd = crate::families::DworkFamily::new(5).unwrap().as_deformation();
        let (s, m0) = deformation_period(&fd, 6).unwrap();
        assert_eq!(m0, 5);
        assert_eq!(s.coeffs(), dwork_period(5, 6).coeffs());
        let (k3, m0) = deformation_period(&FermatDeformation::k3_3678(), 2).unwrap();
        assert_eq!(m0, 12);
        // 12!/(1! 3! 4! 4!)
        assert_eq!(k3.coeff(1), &rat(138600, 1));
    }

    #[test]
    fn indicial_examples() {
        assert_eq!(indicial_roots(&dwork_operator(5)).unwrap(), vec![rat(0, 1); 4]);
        assert_eq!(indicial_roots(&dwork_operator(3)).unwrap(), vec![rat(0, 1); 2]);
        let op = ThetaOperator::new("z", vec![(0, Poly::from_ints(&[-1, 1]))]);
        assert_eq!(indicial_roots(&op).unwrap(), vec![rat(1, 1)]);
        assert!(indicial_roots(&ThetaOperator::new("z", vec![])).is_err());
    }

    #[test]
    fn first_log_block() {
        let sols = log_solutions(5, 3, 4).unwrap();
        assert_eq!(sols[1].blocks[1].coeff(1), &rat(770, 1));
        assert_eq!(sols[0].blocks[0], dwork_period(5, 4));
        assert!(log_solutions(5, 4, 4).is_err());
    }

    #[test]
    fn log_solutions_are_annihilated() {
        for n in [3u64, 5] {
            let op = dwork_operator(n);
            for s in log_solutions(n, n as usize - 2, 20).unwrap() {
                assert!(op.apply(&s.assemble()).unwrap().is_zero(), "n = {n}, i = {}", s.index);
            }
        }
    }

    #[test]
    fn hypergeometric_fits() {
        let h = extract_hypergeometric(&dwork_period(5, 20)).unwrap();
        assert_eq!(h.upper, vec![rat(1, 5), rat(2, 5), rat(3, 5), rat(4, 5)]);
        assert_eq!(h.lower, vec![rat(1, 1); 3]);
        assert_eq!(h.scale, rat(3125, 1));
        let h = extract_hypergeometric(&dwork_period(3, 20)).unwrap();
        assert_eq!((h.upper.clone(), h.lower.clone(), h.scale.clone()), (vec![rat(1, 3), rat(2, 3)], vec![rat(1, 1)], rat(27, 1)));
        let g = TruncSeries::new("z", vec![rat(1, 1); 15]);
        let h = extract_hypergeometric(&g).unwrap();
        assert_eq!((h.upper, h.lower, h.scale), (vec![rat(1, 1)], vec![], rat(1, 1)));
        let short = TruncSeries::new("z", vec![rat(1, 1); 5]);
        assert!(extract_hypergeometric(&short).is_err());
    }

    #[test]
    fn unnormalized_basis_is_triangular() {
        let rows = unnormalized_change_of_basis(5, 3, 6).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[i], ZetaPoly::one());
            assert!(row.iter().all(|x| x.is_linear()));
        }
        assert!(rows[1][0].is_zero());
        // w_2 picks up 2 * (25 - 5)/2 Z2 = 20 Z2 times w_0
        assert_eq!(rows[2][0], ZetaPoly::symbol(2).scale(&rat(20, 1)));
        let a = gamma_ratio_expansion(5, 3);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let m = i - j;
                assert_eq!(*x, a[m].scale(&BigRat::from_integer(binomial(i as u64, m as u64))));
            }
        }
        // the s^4 entry is quadratic in Z2
        assert!(!gamma_ratio_expansion(5, 4)[4].is_linear());
    }
}
