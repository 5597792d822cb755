//! Linear algebra over `Q(x)`: fraction-free elimination over `Q[x]` and a
//! plain field elimination used as a cross-check.

use super::poly::{Poly, RatFun};

/// Linear system `A y = b` with rational-function entries.
#[derive(Clone, Debug, PartialEq)]
pub struct LinSystem {
    pub matrix: Vec<Vec<RatFun>>,
    pub rhs: Vec<RatFun>,
}

impl LinSystem {
    pub fn new(matrix: Vec<Vec<RatFun>>, rhs: Vec<RatFun>) -> Self {
        assert_eq!(matrix.len(), rhs.len(), "row count of matrix and right-hand side differ");
        let w = matrix.first().map_or(0, |r| r.len());
        assert!(matrix.iter().all(|r| r.len() == w), "ragged matrix");
        LinSystem { matrix, rhs }
    }

    /// Some solution, with free variables set to zero; `None` if inconsistent.
    pub fn solve(&self) -> Option<Vec<RatFun>> {
        let ncols = self.matrix.first().map_or(0, |r| r.len());
        let mut rows: Vec<Vec<RatFun>> = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| {
                let mut r = r.clone();
                r.push(b.clone());
                r
            })
            .collect();
        let pivots = field_echelon(&mut rows, ncols);
        if rows.iter().skip(pivots.len()).any(|r| !r[ncols].is_zero()) {
            return None;
        }
        let mut x = vec![RatFun::zero(); ncols];
        for (i, &c) in pivots.iter().enumerate().rev() {
            let mut acc = rows[i][ncols].clone();
            for j in c + 1..ncols {
                if !rows[i][j].is_zero() && !x[j].is_zero() {
                    acc = &acc - &(&rows[i][j] * &x[j]);
                }
            }
            x[c] = &acc / &rows[i][c];
        }
        Some(x)
    }
}

/// Row echelon form over the field `Q(x)`, restricted to the first `ncols`
/// columns for pivoting. Returns pivot columns.
fn field_echelon(rows: &mut [Vec<RatFun>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for j in c..rows[r].len() {
            rows[r][j] = &rows[r][j] * &inv;
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in c..rows[i].len() {
                if !rows[r][j].is_zero() {
                    rows[i][j] = &rows[i][j] - &(&f * &rows[r][j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Fraction-free (Bareiss) echelon form over `Q[x]`. Returns pivot columns.
pub fn bareiss_echelon(rows: &mut [Vec<Poly>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut prev = Poly::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        // smallest-degree pivot keeps intermediate degrees down
        let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| rows[i][c].degree().unwrap())
        else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            for j in c + 1..ncols {
                let t = &(&rows[r][c] * &rows[i][j]) - &(&rows[i][c] * &rows[r][j]);
                rows[i][j] = t.exact_div(&prev);
            }
            rows[i][c] = Poly::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn clear_denominators(v: &[RatFun]) -> (Vec<Poly>, Poly) {
    let l = v.iter().fold(Poly::one(), |acc, x| {
        let g = acc.gcd(x.den());
        &acc * &x.den().exact_div(&g)
    });
    let w = v.iter().map(|x| &x.num().clone() * &l.exact_div(x.den())).collect();
    (w, l)
}

/// Kernel vector with last entry 1 for the columns of `cols`, assuming the
/// other columns are independent. `None` when the last column is independent too.
fn last_column_dependence_bareiss(cols: &[Vec<RatFun>]) -> Option<Vec<RatFun>> {
    let s = cols.len() - 1;
    let dim = cols[0].len();
    let mut scale = Vec::with_capacity(cols.len());
    let mut wcols = Vec::with_capacity(cols.len());
    for c in cols {
        let (w, l) = clear_denominators(c);
        wcols.push(w);
        scale.push(l);
    }
    let mut rows: Vec<Vec<Poly>> = (0..dim).map(|i| wcols.iter().map(|c| c[i].clone()).collect()).collect();
    let pivots = bareiss_echelon(&mut rows);
    if pivots.contains(&s) {
        return None;
    }
    // back substitution over Q(x) for sum_j y_j w_j = -w_s
    let mut y = vec![RatFun::zero(); s];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let mut acc = RatFun::from_poly(-&rows[i][s]);
        for (j, yj) in y.iter().enumerate().skip(c + 1) {
            if !rows[i][j].is_zero() && !yj.is_zero() {
                acc = &acc - &(&RatFun::from_poly(rows[i][j].clone()) * yj);
            }
        }
        y[c] = &acc / &RatFun::from_poly(rows[i][c].clone());
    }
    // sum_j y_j L_j v_j + L_s v_s = 0
    let ls = RatFun::from_poly(scale[s].clone());
    let mut out: Vec<RatFun> =
        y.iter().zip(&scale).map(|(yj, lj)| &(yj * &RatFun::from_poly(lj.clone())) / &ls).collect();
    out.push(RatFun::one());
    Some(out)
}

fn last_column_dependence_field(cols: &[Vec<RatFun>]) -> Option<Vec<RatFun>> {
    let s = cols.len() - 1;
    let dim = cols[0].len();
    let sys = LinSystem::new(
        (0..dim).map(|i| (0..s).map(|j| cols[j][i].clone()).collect()).collect(),
        cols[s].iter().map(|x| -x).collect(),
    );
    let mut y = sys.solve()?;
    y.push(RatFun::one());
    Some(y)
}

/// Outcome of a dependence search.
#[derive(Clone, Debug, PartialEq)]
pub enum Dependence {
    /// `c_0 v_0 + ... + c_{s-1} v_{s-1} + v_s = 0` for the shortest such prefix.
    Found(Vec<RatFun>),
    Independent,
}

fn solve_with(vectors: &[Vec<RatFun>], f: fn(&[Vec<RatFun>]) -> Option<Vec<RatFun>>) -> Dependence {
    if vectors.is_empty() {
        return Dependence::Independent;
    }
    let dim = vectors[0].len();
    assert!(vectors.iter().all(|v| v.len() == dim), "vectors of different dimension");
    if vectors[0].iter().all(|x| x.is_zero()) {
        return Dependence::Found(vec![RatFun::one()]);
    }
    for s in 1..vectors.len() {
        if let Some(c) = f(&vectors[..=s]) {
            return Dependence::Found(c);
        }
    }
    Dependence::Independent
}

/// Shortest monic linear dependence among a prefix of `vectors`, found with
/// fraction-free elimination.
pub fn solve_dependency(vectors: &[Vec<RatFun>]) -> Dependence {
    solve_with(vectors, last_column_dependence_bareiss)
}

/// Same search using elimination directly over `Q(x)`.
pub fn solve_dependency_naive(vectors: &[Vec<RatFun>]) -> Dependence {
    solve_with(vectors, last_column_dependence_field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn rf(num: &[i64], den: &[i64]) -> RatFun {
        RatFun::new(Poly::from_ints(num), Poly::from_ints(den))
    }

    #[test]
    fn scalar_multiple() {
        let v = vec![rf(&[1, 1], &[1]), rf(&[0, 1], &[1, 0, 1])];
        let w: Vec<RatFun> = v.iter().map(|x| x.scale(&rat(2, 1))).collect();
        let d = solve_dependency(&[v.clone(), w.clone()]);
        assert_eq!(d, Dependence::Found(vec![RatFun::from_int(-2), RatFun::one()]));
        assert_eq!(solve_dependency_naive(&[v, w]), d);
    }

    #[test]
    fn independent_pair() {
        let v = vec![RatFun::one(), RatFun::zero()];
        let w = vec![RatFun::x(), RatFun::one()];
        assert_eq!(solve_dependency(&[v, w]), Dependence::Independent);
    }

    #[test]
    fn dependence_substitutes_to_zero() {
        let a = vec![rf(&[1], &[1, 1]), rf(&[0, 1], &[1]), rf(&[2], &[1])];
        let b = vec![rf(&[0, 0, 1], &[1]), rf(&[1], &[-1, 1]), rf(&[3, 1], &[1])];
        // c = x a + 1/(x-2) b
        let c: Vec<RatFun> =
            a.iter().zip(&b).map(|(p, q)| &(&RatFun::x() * p) + &(q / &rf(&[-2, 1], &[1]))).collect();
        let Dependence::Found(coef) = solve_dependency(&[a.clone(), b.clone(), c.clone()]) else { panic!() };
        for i in 0..3 {
            let s = &(&(&coef[0] * &a[i]) + &(&coef[1] * &b[i])) + &(&coef[2] * &c[i]);
            assert!(s.is_zero());
        }
        assert_eq!(solve_dependency_naive(&[a, b, c]), Dependence::Found(coef));
    }
}
