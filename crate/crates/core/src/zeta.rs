//! Zeta functions from point counts: the exponential series, the Weil form
//! for curves, Newton slopes, and the mirror congruence of counts.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::{count_affine_curve, count_projective, count_torus, embed_parameter, CountResult, CountVariant, MirrorModel};
use crate::error::{Error, Result};
use crate::families::{is_singular_dwork, CurveKind, DworkFamily, FamilyDescriptor, PsiValue, SingularMirror, SuperellipticCurve};
use crate::finite_field::{make_ext_field, ExtField, FieldElem, FieldSpec};
use crate::numeric::{valuation_int, BigRat};
use crate::ratfun::TruncSeries;

fn int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Coefficients of `exp(sum_{r <= R} N_r T^r / r)` through `T^R`; they must be integers.
pub fn zeta_series(counts: &[u64]) -> Result<TruncSeries> {
    let mut log = vec![BigRat::zero(); counts.len() + 1];
    for (i, &n) in counts.iter().enumerate() {
        log[i + 1] = BigRat::new(BigInt::from(n), BigInt::from(i as u64 + 1));
    }
    let s = TruncSeries::new("T", log).exp()?;
    if let Some((k, c)) = s.coeffs().iter().enumerate().find(|(_, c)| !c.is_integer()) {
        return Err(Error::NonIntegral(k, c.to_string()));
    }
    Ok(s)
}

fn power_sums_to_poly(s: &[BigRat], degree: usize) -> Result<Vec<BigRat>> {
    // prod (1 - alpha T) = exp(-sum s_r T^r / r)
    let mut log = vec![BigRat::zero(); degree + 1];
    for r in 1..=degree.min(s.len()) {
        log[r] = -&s[r - 1] / int(r as i64);
    }
    Ok(TruncSeries::new("T", log).exp()?.coeffs().to_vec())
}

/// `N_r` predicted by `P_1(T) / ((1 - T)(1 - qT))`.
pub fn predict_curve_counts(p1: &[BigInt], q: u64, r_max: usize) -> Vec<BigInt> {
    // -log P_1 = sum s_r T^r / r
    let c: Vec<BigRat> = (0..=r_max).map(|i| p1.get(i).map_or_else(BigRat::zero, |x| BigRat::from_integer(x.clone()))).collect();
    let log = TruncSeries::new("T", c).log().expect("P_1(0) = 1");
    (1..=r_max)
        .map(|r| {
            let s = -(log.coeff(r) * int(r as i64));
            BigInt::from(q).pow(r as u32) + 1 - s.to_integer()
        })
        .collect()
}

/// Numerator `P_1(T)` of a curve of genus `g` over `F_q` from `N_1..N_g`,
/// using `a_{2g-j} = q^{g-j} a_j`; any further counts are checked.
pub fn fit_weil_curve(counts: &[u64], q: u64, genus: usize) -> Result<Vec<BigInt>> {
    if counts.len() < genus {
        return Err(Error::Fit(format!("genus {genus} needs {genus} counts, got {}", counts.len())));
    }
    let s: Vec<BigRat> = counts[..genus]
        .iter()
        .enumerate()
        .map(|(i, &n)| int(q as i64).pow(i as i32 + 1) + int(1) - int(n as i64))
        .collect();
    let low = power_sums_to_poly(&s, genus)?;
    if let Some(c) = low.iter().find(|c| !c.is_integer()) {
        return Err(Error::Fit(format!("non-integral numerator coefficient {c}")));
    }
    let mut p: Vec<BigInt> = low.iter().map(|c| c.to_integer()).collect();
    for j in (0..genus).rev() {
        p.push(&p[j] * BigInt::from(q).pow((genus - j) as u32));
    }
    if genus > 0 {
        // |a_1| <= 2 g sqrt(q)
        let a1 = &p[1];
        if a1 * a1 > BigInt::from(4 * genus as u64 * genus as u64) * BigInt::from(q) {
            return Err(Error::Fit(format!("a_1 = {} violates the Weil bound", -a1)));
        }
    }
    let predicted = predict_curve_counts(&p, q, counts.len());
    for (r, (pr, &n)) in predicted.iter().zip(counts).enumerate() {
        if *pr != BigInt::from(n) {
            return Err(Error::Fit(format!("count N_{} = {n} but the fit predicts {pr}", r + 1)));
        }
    }
    if genus > 0 {
        let roots = reciprocal_roots(&p)?;
        let target = (q as f64).sqrt();
        if roots.iter().any(|a| (a.norm() - target).abs() > 1e-6 * target.max(1.0)) {
            return Err(Error::Fit("reciprocal roots are off the circle |alpha| = sqrt(q)".into()));
        }
    }
    Ok(p)
}

/// Complex `alpha` with `P(T) = prod (1 - alpha T)`, by Durand-Kerner on the
/// reversed polynomial followed by Newton polishing.
pub fn reciprocal_roots(p: &[BigInt]) -> Result<Vec<Complex64>> {
    let deg = p.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    if !p[0].is_one() {
        return Err(Error::Precondition("P(0) must be 1".into()));
    }
    // x^deg P(1/x) = sum p_i x^{deg - i} is monic since P(0) = 1
    let monic: Vec<Complex64> = (0..=deg)
        .map(|j| p[deg - j].to_f64().map(|x| Complex64::new(x, 0.0)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("coefficient too large".into()))?;
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a);
    let deriv = |x: Complex64| {
        monic.iter().enumerate().skip(1).rev().fold(Complex64::new(0.0, 0.0), |acc, (i, a)| acc * x + a * i as f64)
    };
    let radius = monic.iter().take(deg).map(|a| a.norm()).fold(1.0, f64::max) + 1.0;
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32) * radius * 0.5).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    for x in z.iter_mut() {
        for _ in 0..5 {
            let d = deriv(*x);
            if d.norm() == 0.0 {
                break;
            }
            *x -= eval(*x) / d;
        }
    }
    Ok(z)
}

/// Slopes of the reciprocal roots with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeProfile {
    #[serde(with = "slope_list")]
    pub slopes: Vec<(BigRat, usize)>,
}

mod slope_list {
    use super::BigRat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        slope: String,
        multiplicity: usize,
    }

    pub fn serialize<S: Serializer>(x: &[(BigRat, usize)], s: S) -> Result<S::Ok, S::Error> {
        x.iter()
            .map(|(a, m)| Entry { slope: crate::numeric::rat_to_string(a), multiplicity: *m })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigRat, usize)>, D::Error> {
        Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| Ok((crate::numeric::rat_from_str(&e.slope).map_err(serde::de::Error::custom)?, e.multiplicity)))
            .collect()
    }
}

impl SlopeProfile {
    pub fn degree(&self) -> usize {
        self.slopes.iter().map(|(_, m)| m).sum()
    }

    /// Number of reciprocal roots with slope in `[lo, hi)`.
    pub fn count_in(&self, lo: &BigRat, hi: &BigRat) -> usize {
        self.slopes.iter().filter(|(s, _)| s >= lo && s < hi).map(|(_, m)| m).sum()
    }
}

/// Lower convex hull of `(i, v_p(a_i))`.
pub fn newton_slopes(poly: &[BigInt], p: u64) -> Result<SlopeProfile> {
    if poly.first().is_none_or(|c| !c.is_one()) {
        return Err(Error::Precondition("P(0) must be 1".into()));
    }
    let pts: Vec<(i64, i64)> = poly
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, valuation_int(c, p).expect("nonzero") as i64))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the segment a -> pt
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes: Vec<(BigRat, usize)> = Vec::new();
    for w in hull.windows(2) {
        let len = (w[1].0 - w[0].0) as usize;
        let s = BigRat::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(len as i64));
        match slopes.last_mut() {
            Some((t, m)) if *t == s => *m += len,
            _ => slopes.push((s, len)),
        }
    }
    Ok(SlopeProfile { slopes })
}

/// Counts, series, and the fitted curve numerator with its roots and slopes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaData {
    pub q: u64,
    pub counts: Vec<u64>,
    pub series: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator: Option<Vec<String>>,
    /// Denominator `(1 - T)(1 - qT)` of a curve.
    pub denominator: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slopes: Option<SlopeProfile>,
}

/// Zeta data of a curve of genus `g` from counts `N_1..N_R`.
pub fn curve_zeta(counts: &[u64], q: u64, genus: usize) -> Result<ZetaData> {
    let series = zeta_series(counts)?;
    let p1 = fit_weil_curve(counts, q, genus)?;
    let roots = reciprocal_roots(&p1)?;
    let p = crate::numeric::prime_factors(q).first().copied().ok_or_else(|| Error::Precondition("q = 1".into()))?;
    Ok(ZetaData {
        q,
        counts: counts.to_vec(),
        series: series.to_strings(),
        numerator: Some(p1.iter().map(|c| c.to_string()).collect()),
        denominator: vec!["1".into(), (-BigInt::from(q) - 1u32).to_string(), q.to_string()],
        roots: roots.iter().map(|z| (z.re, z.im)).collect(),
        slopes: Some(newton_slopes(&p1, p)?),
    })
}

/// One row of a mirror-congruence report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WanRow {
    pub r: u32,
    pub field: FieldSpec,
    pub count_x: u64,
    pub count_y: u64,
    pub difference: i64,
    /// `None` when the difference is zero.
    pub valuation: Option<u32>,
    pub required: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WanReport {
    pub n: usize,
    pub psi: String,
    pub base: FieldSpec,
    pub model: MirrorModel,
    pub rows: Vec<WanRow>,
}

impl WanReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Mirror model used by the congruence check. Calibrated on the acceptance
/// grid: the projective closure satisfies the congruence at every point, the
/// open torus fails already at `r = 1`.
pub const WAN_MODEL: MirrorModel = MirrorModel::Closure;

/// Compares `N_r` of the Dwork hypersurface with the singular mirror over
/// `F_{q^r}`, `q = |base|`, for `r = 1..=r_max`.
pub fn wan_congruence_check(
    n: usize,
    psi: &FieldElem,
    base: &ExtField,
    r_max: u32,
    model: MirrorModel,
    cap: u128,
) -> Result<WanReport> {
    if is_singular_dwork(n, psi, base) {
        return Err(Error::SingularFiber(format!("psi^{n} = 1 or p divides {n}")));
    }
    let dwork = DworkFamily::new(n)?.polynomial();
    let mirror = SingularMirror { n };
    let mut rows = Vec::new();
    for r in 1..=r_max {
        let ext = make_ext_field(base.p, base.r * r)?;
        let psi_r = embed_parameter(psi, base, &ext)?;
        let count_x = count_projective(&dwork.instantiate(&ext, &psi_r), &ext, cap)?;
        let count_y = match model {
            MirrorModel::Torus => count_torus(&mirror, &psi_r, &ext, cap)?,
            MirrorModel::Closure => count_projective(&mirror.closure().instantiate(&ext, &psi_r), &ext, cap)?,
        };
        let difference = count_x as i64 - count_y as i64;
        let valuation = valuation_int(&BigInt::from(difference), base.p);
        let required = r * base.r;
        rows.push(WanRow {
            r,
            field: FieldSpec { p: ext.p, r: ext.r },
            count_x,
            count_y,
            difference,
            valuation,
            required,
            pass: valuation.is_none_or(|v| v >= required),
        });
    }
    let code = base.code(psi);
    Ok(WanReport { n, psi: code.to_string(), base: FieldSpec { p: base.p, r: base.r }, model, rows })
}

/// Affine counts of curves A and B over `F_p`, and whether `psi = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePair {
    pub a: CountResult,
    pub b: CountResult,
    /// At `psi = 0` the factor `x - psi^5` collapses to `x`.
    pub degenerate: bool,
}

pub fn count_curves_ab(psi: u64, p: u64, cap: u128) -> Result<CurvePair> {
    let field = make_ext_field(p, 1)?;
    let x = field.from_int(psi as i64);
    let spec = FieldSpec { p, r: 1 };
    let one = |kind: CurveKind| -> Result<CountResult> {
        let count = count_affine_curve(&SuperellipticCurve::new(kind), &x, &field, cap)?;
        Ok(CountResult {
            family: Some(FamilyDescriptor::Curve { kind, psi: Some(PsiValue::Scalar(psi.to_string())), field: Some(spec) }),
            field: spec,
            count,
            variant: CountVariant::Affine,
            nonzero_only: false,
            orbits: None,
        })
    };
    Ok(CurvePair { a: one(CurveKind::A)?, b: one(CurveKind::B)?, degenerate: field.is_zero(&x) })
}

/// Integer `q^r + 1 - N_r`: the power sum of reciprocal roots of a curve.
pub fn trace_of_frobenius(count: u64, q: u64, r: u32) -> BigInt {
    BigInt::from(q).pow(r) + 1 - BigInt::from(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn projective_line_and_point() {
        let q = 7u64;
        let counts: Vec<u64> = (1..=5).map(|r| q.pow(r) + 1).collect();
        let s = zeta_series(&counts).unwrap();
        // 1/((1-T)(1-qT)) = sum (q^{k+1} - 1)/(q - 1) T^k
        for k in 0..=5u32 {
            assert_eq!(s.coeff(k as usize), &int(((q.pow(k + 1) - 1) / (q - 1)) as i64));
        }
        let pt = zeta_series(&[1, 1, 1]).unwrap();
        assert!(pt.coeffs().iter().all(|c| *c == int(1)));
        assert!(zeta_series(&[1, 2]).is_err());
    }

    #[test]
    fn weil_fits() {
        assert_eq!(fit_weil_curve(&[8, 50], 7, 0).unwrap(), ints(&[1]));
        // a = 2 over F_5: N_1 = 4, N_2 = 25 + 1 - (4 - 10) = 32
        assert_eq!(fit_weil_curve(&[4, 32], 5, 1).unwrap(), ints(&[1, -2, 5]));
        assert!(fit_weil_curve(&[4, 33], 5, 1).is_err());
        assert!(fit_weil_curve(&[11], 5, 1).is_err());
    }

    #[test]
    fn slopes() {
        let s = newton_slopes(&ints(&[1, -2, 5]), 5).unwrap();
        assert_eq!(s.slopes, vec![(rat(0, 1), 1), (rat(1, 1), 1)]);
        let s = newton_slopes(&ints(&[1, 0, 5]), 5).unwrap();
        assert_eq!(s.slopes, vec![(rat(1, 2), 2)]);
        assert_eq!(newton_slopes(&ints(&[1, -1]), 5).unwrap().slopes, vec![(rat(0, 1), 1)]);
        assert_eq!(s.count_in(&rat(0, 1), &rat(1, 1)), 2);
    }

    #[test]
    fn roots_on_circle() {
        for (a, q) in [(2i64, 5u64), (0, 7), (-3, 7), (4, 5)] {
            let r = reciprocal_roots(&ints(&[1, -a, q as i64])).unwrap();
            for z in r {
                assert!((z.norm() - (q as f64).sqrt()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn curves_ab() {
        let c = count_curves_ab(2, 7, 1 << 20).unwrap();
        assert_eq!((c.a.count, c.b.count), (7, 7));
        assert!(count_curves_ab(0, 7, 1 << 20).unwrap().degenerate);
    }
}
