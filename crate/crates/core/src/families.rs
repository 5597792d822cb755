//! Family descriptions as plain data: Dwork pencils, Fermat-type deformations
//! in weighted projective space, the torus model of the mirror, and the two
//! superelliptic curves. Algorithms elsewhere take these records as input.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{make_ext_field, ExtField, FieldElem, FieldSpec};

/// Monomial with integer coefficient times a power of the parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymTerm {
    pub coeff: i64,
    pub psi_power: u32,
    pub exps: Vec<i32>,
}

/// Laurent polynomial in `x_1..x_n` whose coefficients are integer multiples of
/// powers of the family parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymPoly {
    pub nvars: usize,
    pub terms: Vec<SymTerm>,
}

impl SymPoly {
    pub fn instantiate(&self, field: &ExtField, psi: &FieldElem) -> FieldPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c = field.mul(&field.from_int(t.coeff), &field.pow(psi, t.psi_power as u128));
                (t.exps.clone(), c)
            })
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        FieldPoly { nvars: self.nvars, terms }
    }

    /// Weighted degree of every term, if homogeneous.
    pub fn weighted_degree(&self, weights: &[u64]) -> Option<i64> {
        let degs: Vec<i64> =
            self.terms.iter().map(|t| t.exps.iter().zip(weights).map(|(&e, &w)| e as i64 * w as i64).sum()).collect();
        if degs.windows(2).all(|w| w[0] == w[1]) {
            degs.first().copied()
        } else {
            None
        }
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.terms {
            let mut body = Vec::new();
            if t.psi_power == 1 {
                body.push("psi".to_string());
            } else if t.psi_power > 1 {
                body.push(format!("psi^{}", t.psi_power));
            }
            for (i, &e) in t.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => body.push(format!("x{}", i + 1)),
                    _ => body.push(format!("x{}^{}", i + 1, e)),
                }
            }
            let mag = t.coeff.unsigned_abs();
            let mut s = body.join("*");
            if mag != 1 || s.is_empty() {
                s = if s.is_empty() { mag.to_string() } else { format!("{mag}*{s}") };
            }
            if first {
                write!(f, "{}{}", if t.coeff < 0 { "-" } else { "" }, s)?;
            } else {
                write!(f, " {} {}", if t.coeff < 0 { "-" } else { "+" }, s)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Polynomial with coefficients in a concrete finite field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPoly {
    pub nvars: usize,
    pub terms: Vec<(Vec<i32>, FieldElem)>,
}

impl FieldPoly {
    pub fn eval(&self, field: &ExtField, x: &[FieldElem]) -> FieldElem {
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &ei) in x.iter().zip(e) {
                let v = if ei >= 0 {
                    field.pow(xi, ei as u128)
                } else {
                    field.pow(&field.inv(xi).expect("negative power of zero"), (-ei) as u128)
                };
                t = field.mul(&t, &v);
            }
            acc = field.add(&acc, &t);
        }
        acc
    }

    pub fn partial(&self, field: &ExtField, i: usize) -> FieldPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] != 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, field.mul(c, &field.from_int(e[i] as i64)))
            })
            .filter(|(_, c)| !field.is_zero(c))
            .collect();
        FieldPoly { nvars: self.nvars, terms }
    }
}

/// `x_1^n + ... + x_n^n - n psi x_1...x_n` in `P^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DworkFamily {
    pub n: usize,
}

impl DworkFamily {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Precondition(format!("Dwork family needs n >= 3, got {n}")));
        }
        Ok(DworkFamily { n })
    }

    pub fn polynomial(&self) -> SymPoly {
        let n = self.n;
        let mut terms: Vec<SymTerm> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = n as i32;
                SymTerm { coeff: 1, psi_power: 0, exps: e }
            })
            .collect();
        terms.push(SymTerm { coeff: -(n as i64), psi_power: 1, exps: vec![1; n] });
        SymPoly { nvars: n, terms }
    }

    pub fn as_deformation(&self) -> FermatDeformation {
        FermatDeformation::fermat(&vec![self.n as u64; self.n], &vec![1; self.n], &vec![1; self.n], -(self.n as i64))
            .expect("Dwork data is homogeneous")
    }
}

/// Invertible base polynomial plus one deformation monomial `c psi x^a`,
/// homogeneous for the weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FermatDeformation {
    pub weights: Vec<u64>,
    pub degree: u64,
    /// Base monomials `(coeff, exponents)`; for a Fermat polynomial these are `x_i^{d_i}`.
    pub base: Vec<(i64, Vec<u32>)>,
    pub deformation: Vec<u32>,
    pub deformation_coeff: i64,
}

impl FermatDeformation {
    /// `sum x_i^{d_i} + c psi prod x_i^{a_i}` with `w_i d_i = d`.
    pub fn fermat(exponents: &[u64], weights: &[u64], a: &[u32], coeff: i64) -> Result<Self> {
        let n = exponents.len();
        if weights.len() != n || a.len() != n {
            return Err(Error::Precondition("exponent, weight and deformation lengths differ".into()));
        }
        let d = exponents[0] * weights[0];
        let base = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = exponents[i] as u32;
                (1, e)
            })
            .collect();
        FermatDeformation::new(weights.to_vec(), d, base, a.to_vec(), coeff)
    }

    pub fn new(weights: Vec<u64>, degree: u64, base: Vec<(i64, Vec<u32>)>, a: Vec<u32>, coeff: i64) -> Result<Self> {
        let fd = FermatDeformation { weights, degree, base, deformation: a, deformation_coeff: coeff };
        let wdeg = |e: &[u32]| e.iter().zip(&fd.weights).map(|(&x, &w)| x as u64 * w).sum::<u64>();
        for (_, e) in &fd.base {
            if wdeg(e) != fd.degree {
                return Err(Error::Precondition(format!("base monomial {e:?} has weighted degree {}", wdeg(e))));
            }
        }
        if wdeg(&fd.deformation) != fd.degree {
            return Err(Error::Precondition(format!(
                "deformation monomial {:?} has weighted degree {}, expected {}",
                fd.deformation,
                wdeg(&fd.deformation),
                fd.degree
            )));
        }
        Ok(fd)
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// Whether `sum w_i = d`.
    pub fn is_calabi_yau(&self) -> bool {
        self.weights.iter().sum::<u64>() == self.degree
    }

    /// Non-fatal diagnostics, currently only the Calabi-Yau condition.
    pub fn warnings(&self) -> Vec<String> {
        if self.is_calabi_yau() {
            Vec::new()
        } else {
            vec![format!(
                "weights sum to {} but the degree is {}; not Calabi-Yau",
                self.weights.iter().sum::<u64>(),
                self.degree
            )]
        }
    }

    pub fn polynomial(&self) -> SymPoly {
        let mut terms: Vec<SymTerm> = self
            .base
            .iter()
            .map(|(c, e)| SymTerm { coeff: *c, psi_power: 0, exps: e.iter().map(|&x| x as i32).collect() })
            .collect();
        terms.push(SymTerm {
            coeff: self.deformation_coeff,
            psi_power: 1,
            exps: self.deformation.iter().map(|&x| x as i32).collect(),
        });
        SymPoly { nvars: self.nvars(), terms }
    }

    /// The K3 family `x1^8 + x2^4 + x1 x3^3 + x4^3 + psi x1 x2 x3 x4` in `P(3,6,7,8)`.
    pub fn k3_3678() -> Self {
        FermatDeformation::new(
            vec![3, 6, 7, 8],
            24,
            vec![(1, vec![8, 0, 0, 0]), (1, vec![0, 4, 0, 0]), (1, vec![1, 0, 3, 0]), (1, vec![0, 0, 0, 3])],
            k3_deformation_monomial(),
            1,
        )
        .expect("K3 data is homogeneous")
    }
}

/// The printed K3 deformation exponents `(4,4,4,0)` have weighted degree 64, not 24.
pub const K3_PRINTED_DEFORMATION: [u32; 4] = [4, 4, 4, 0];

/// Smallest deformation monomial of weighted degree 24 that involves every
/// variable: found by search, it is `x1 x2 x3 x4`.
pub fn k3_deformation_monomial() -> Vec<u32> {
    let w = [3u32, 6, 7, 8];
    let mut best: Option<Vec<u32>> = None;
    for a in 1..=8u32 {
        for b in 1..=4u32 {
            for c in 1..=3u32 {
                for d in 1..=3u32 {
                    let e = vec![a, b, c, d];
                    if e.iter().zip(&w).map(|(x, y)| x * y).sum::<u32>() == 24
                        && best.as_ref().is_none_or(|bb| e.iter().sum::<u32>() < bb.iter().sum::<u32>())
                    {
                        best = Some(e);
                    }
                }
            }
        }
    }
    best.expect("x1 x2 x3 x4 has degree 24")
}

/// Torus model `x_1 + ... + x_{n-1} + 1/(x_1...x_{n-1}) - n psi` of the mirror.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularMirror {
    pub n: usize,
}

impl SingularMirror {
    pub fn laurent(&self) -> SymPoly {
        let m = self.n - 1;
        let mut terms: Vec<SymTerm> = (0..m)
            .map(|i| {
                let mut e = vec![0; m];
                e[i] = 1;
                SymTerm { coeff: 1, psi_power: 0, exps: e }
            })
            .collect();
        terms.push(SymTerm { coeff: 1, psi_power: 0, exps: vec![-1; m] });
        terms.push(SymTerm { coeff: -(self.n as i64), psi_power: 1, exps: vec![0; m] });
        SymPoly { nvars: m, terms }
    }

    /// Projective closure in `P^{n-1}` with coordinates `(y_0 : y_1 : ... : y_{n-1})`:
    /// `(y_1 + ... + y_{n-1} - n psi y_0) y_1...y_{n-1} + y_0^n`.
    pub fn closure(&self) -> SymPoly {
        let n = self.n;
        let mut terms = Vec::new();
        for i in 1..n {
            let mut e = vec![1; n];
            e[0] = 0;
            e[i] = 2;
            terms.push(SymTerm { coeff: 1, psi_power: 0, exps: e });
        }
        terms.push(SymTerm { coeff: -(n as i64), psi_power: 1, exps: vec![1; n] });
        let mut e = vec![0; n];
        e[0] = n as i32;
        terms.push(SymTerm { coeff: 1, psi_power: 0, exps: e });
        SymPoly { nvars: n, terms }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    A,
    B,
}

/// `y^5 = x^{e1} (1 - x)^{e2} (x - psi^5)^{e3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperellipticCurve {
    pub kind: CurveKind,
    pub exponents: (u32, u32, u32),
}

impl SuperellipticCurve {
    pub fn new(kind: CurveKind) -> Self {
        let exponents = match kind {
            CurveKind::A => (2, 3, 2),
            CurveKind::B => (2, 4, 1),
        };
        SuperellipticCurve { kind, exponents }
    }
}

/// Character class of monomials under the diagonal symmetry group of the quintic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialClass {
    pub representative: Vec<u32>,
    /// Distinct classes obtained by permuting coordinates, modulo shifts by `epsilon`.
    pub multiplicity: u32,
    /// Reduced monomials (exponents at most 3) in the class, counted once per class.
    pub period_count: u32,
}

/// Pole order `k(v)` with `k(v) * deg = sum v_i + n` for the standard form on `P^{n-1}`.
pub fn pole_order(v: &[u32], degree: u32) -> Option<u32> {
    let s: u32 = v.iter().sum::<u32>() + v.len() as u32;
    s.is_multiple_of(degree).then_some(s / degree)
}

/// The six quintic classes with multiplicities and period counts computed from
/// the Jacobian ring of the Fermat quintic.
pub fn quintic_monomial_classes() -> Vec<MonomialClass> {
    let reps: [[u32; 5]; 6] =
        [[0, 0, 0, 0, 0], [4, 1, 0, 0, 0], [3, 2, 0, 0, 0], [3, 1, 1, 0, 0], [2, 2, 1, 0, 0], [4, 3, 2, 1, 0]];
    reps.iter()
        .map(|r| MonomialClass {
            representative: r.to_vec(),
            multiplicity: class_orbit_size(r),
            period_count: (0..5u32)
                .filter(|&j| r.iter().all(|&x| (x + j) % 5 <= 3))
                .filter(|&j| r.iter().map(|&x| (x + j) % 5).sum::<u32>() % 5 == 0)
                .count() as u32,
        })
        .collect()
}

/// Number of distinct character vectors `sigma(v) + j*epsilon mod 5`, divided by the
/// five shifts.
fn class_orbit_size(v: &[u32; 5]) -> u32 {
    let mut seen = std::collections::BTreeSet::new();
    let perms = permutations(5);
    for perm in &perms {
        let w: Vec<u32> = perm.iter().map(|&i| v[i] % 5).collect();
        // canonical representative of the epsilon-shift orbit
        let canon = (0..5u32).map(|j| w.iter().map(|&x| (x + j) % 5).collect::<Vec<_>>()).min().unwrap();
        seen.insert(canon);
    }
    seen.len() as u32
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Parameter value in a descriptor: an integer residue or an extension-field
/// coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiValue {
    Scalar(String),
    Coeffs(Vec<u64>),
}

impl PsiValue {
    pub fn to_elem(&self, field: &ExtField) -> Result<FieldElem> {
        match self {
            PsiValue::Scalar(s) => {
                let v: i64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad psi {s:?}")))?;
                Ok(field.from_int(v))
            }
            PsiValue::Coeffs(c) => field.elem(c),
        }
    }
}

/// JSON family descriptor, the CLI input format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FamilyDescriptor {
    Dwork {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<PsiValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
    FermatDeformation {
        #[serde(flatten)]
        data: FermatDeformation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<PsiValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
    K3 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<PsiValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
    SingularMirror {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<PsiValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
    Curve {
        kind: CurveKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        psi: Option<PsiValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<FieldSpec>,
    },
}

impl FamilyDescriptor {
    pub fn psi(&self) -> Option<&PsiValue> {
        match self {
            FamilyDescriptor::Dwork { psi, .. }
            | FamilyDescriptor::FermatDeformation { psi, .. }
            | FamilyDescriptor::K3 { psi, .. }
            | FamilyDescriptor::SingularMirror { psi, .. }
            | FamilyDescriptor::Curve { psi, .. } => psi.as_ref(),
        }
    }

    pub fn field(&self) -> Option<FieldSpec> {
        match self {
            FamilyDescriptor::Dwork { field, .. }
            | FamilyDescriptor::FermatDeformation { field, .. }
            | FamilyDescriptor::K3 { field, .. }
            | FamilyDescriptor::SingularMirror { field, .. }
            | FamilyDescriptor::Curve { field, .. } => *field,
        }
    }

    /// Builds the base field and the parameter in it.
    pub fn instantiate(&self) -> Result<(ExtField, FieldElem)> {
        let spec = self.field().ok_or_else(|| Error::Precondition("family has no field".into()))?;
        let field = make_ext_field(spec.p, spec.r)?;
        let psi = match self.psi() {
            Some(v) => v.to_elem(&field)?,
            None => return Err(Error::Precondition("family has no psi value".into())),
        };
        Ok((field, psi))
    }

    /// Defining polynomial with symbolic parameter, for hypersurface families.
    pub fn defining_polynomial(&self) -> Result<SymPoly> {
        match self {
            FamilyDescriptor::Dwork { n, .. } => Ok(DworkFamily::new(*n)?.polynomial()),
            FamilyDescriptor::FermatDeformation { data, .. } => Ok(data.polynomial()),
            FamilyDescriptor::K3 { .. } => Ok(FermatDeformation::k3_3678().polynomial()),
            FamilyDescriptor::SingularMirror { n, .. } => Ok(SingularMirror { n: *n }.laurent()),
            FamilyDescriptor::Curve { .. } => Err(Error::Unsupported("curves are not hypersurfaces in P^n".into())),
        }
    }

    /// Weights of the ambient space, when it is (weighted) projective.
    pub fn weights(&self) -> Option<Vec<u64>> {
        match self {
            FamilyDescriptor::Dwork { n, .. } => Some(vec![1; *n]),
            FamilyDescriptor::FermatDeformation { data, .. } => Some(data.weights.clone()),
            FamilyDescriptor::K3 { .. } => Some(vec![3, 6, 7, 8]),
            _ => None,
        }
    }
}

/// Singularity test for a Dwork fiber over a finite field: `psi^n = 1`, or the
/// characteristic divides `n`.
pub fn is_singular_dwork(n: usize, psi: &FieldElem, field: &ExtField) -> bool {
    field.p.is_multiple_of(n as u64) || field.pow(psi, n as u128) == field.one()
}

/// Singularity test for a complex Dwork fiber.
pub fn is_singular_dwork_complex(n: usize, psi: Complex64, tol: f64) -> bool {
    (psi.powu(n as u32) - Complex64::new(1.0, 0.0)).norm() < tol
}

/// Jacobian criterion by exhaustive search: a nonzero affine point where every
/// partial derivative (and the polynomial) vanishes.
pub fn is_singular_by_jacobian(poly: &FieldPoly, field: &ExtField) -> bool {
    let n = poly.nvars;
    let partials: Vec<FieldPoly> = (0..n).map(|i| poly.partial(field, i)).collect();
    let q = field.q();
    let total = q.pow(n as u32);
    for code in 1..total {
        let mut c = code;
        let x: Vec<FieldElem> = (0..n)
            .map(|_| {
                let e = field.from_code(c % q);
                c /= q;
                e
            })
            .collect();
        if field.is_zero(&poly.eval(field, &x)) && partials.iter().all(|d| field.is_zero(&d.eval(field, &x))) {
            return true;
        }
    }
    false
}

/// Fiber singularity for any supported descriptor.
pub fn is_singular_fiber(family: &FamilyDescriptor) -> Result<bool> {
    let (field, psi) = family.instantiate()?;
    match family {
        FamilyDescriptor::Dwork { n, .. } => Ok(is_singular_dwork(*n, &psi, &field)),
        FamilyDescriptor::SingularMirror { n, .. } => Ok(is_singular_dwork(*n, &psi, &field)),
        FamilyDescriptor::FermatDeformation { .. } | FamilyDescriptor::K3 { .. } => {
            let poly = family.defining_polynomial()?.instantiate(&field, &psi);
            Ok(is_singular_by_jacobian(&poly, &field))
        }
        FamilyDescriptor::Curve { .. } => Err(Error::Unsupported("singularity test for curves".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dwork_polynomials() {
        assert_eq!(DworkFamily::new(3).unwrap().polynomial().to_string(), "x1^3 + x2^3 + x3^3 - 3*psi*x1*x2*x3");
        let f7 = make_ext_field(7, 1).unwrap();
        let poly = DworkFamily::new(5).unwrap().polynomial().instantiate(&f7, &f7.from_int(2));
        let (_, c) = poly.terms.iter().find(|(e, _)| e.iter().all(|&x| x == 1)).unwrap();
        assert_eq!(c.coeffs, vec![4]);
    }

    #[test]
    fn fermat_deformation_specializes_to_dwork() {
        let d = DworkFamily::new(5).unwrap();
        assert_eq!(d.as_deformation().polynomial(), d.polynomial());
        assert!(d.as_deformation().is_calabi_yau());
    }

    #[test]
    fn non_calabi_yau_only_warns() {
        let fd = FermatDeformation::fermat(&[4, 4, 4], &[1, 1, 1], &[2, 1, 1], 1).unwrap();
        assert!(!fd.is_calabi_yau());
        assert_eq!(fd.warnings().len(), 1);
    }

    #[test]
    fn inhomogeneous_deformation_rejected() {
        assert!(FermatDeformation::new(
            vec![3, 6, 7, 8],
            24,
            vec![(1, vec![8, 0, 0, 0])],
            K3_PRINTED_DEFORMATION.to_vec(),
            1
        )
        .is_err());
        assert_eq!(k3_deformation_monomial(), vec![1, 1, 1, 1]);
        assert!(FermatDeformation::k3_3678().is_calabi_yau());
    }

    #[test]
    fn singular_fibers() {
        let f7 = make_ext_field(7, 1).unwrap();
        assert!(is_singular_dwork(5, &f7.from_int(1), &f7));
        assert!(!is_singular_dwork(5, &f7.from_int(2), &f7));
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!(is_singular_dwork_complex(3, w, 1e-12));
        assert!(!is_singular_dwork_complex(3, Complex64::new(2.0, 0.0), 1e-12));
    }

    #[test]
    fn jacobian_criterion_agrees_with_dwork_rule() {
        let f7 = make_ext_field(7, 1).unwrap();
        let fam = DworkFamily::new(3).unwrap();
        for psi in 0..7 {
            let e = f7.from_int(psi);
            let poly = fam.polynomial().instantiate(&f7, &e);
            assert_eq!(is_singular_by_jacobian(&poly, &f7), is_singular_dwork(3, &e, &f7), "psi = {psi}");
        }
    }

    #[test]
    fn quintic_classes_total_204() {
        let classes = quintic_monomial_classes();
        let mult: Vec<u32> = classes.iter().map(|c| c.multiplicity).collect();
        assert_eq!(mult, vec![1, 20, 20, 30, 30, 24]);
        let counts: Vec<u32> = classes.iter().map(|c| c.period_count).collect();
        assert_eq!(counts, vec![4, 2, 2, 2, 2, 0]);
        assert_eq!(classes.iter().map(|c| c.multiplicity * c.period_count).sum::<u32>(), 204);
        assert_eq!(mult.iter().sum::<u32>(), 125);
        for c in &classes {
            assert!(pole_order(&c.representative, 5).is_some());
        }
    }

    #[test]
    fn descriptor_json() {
        let s = r#"{"type":"dwork","n":5,"psi":"2","field":{"p":7,"r":1}}"#;
        let d: FamilyDescriptor = serde_json::from_str(s).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), s);
        let (f, psi) = d.instantiate().unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(psi.coeffs, vec![2]);
        assert!(!is_singular_fiber(&d).unwrap());
    }
}
