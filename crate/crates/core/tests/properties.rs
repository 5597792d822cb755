//! Randomized invariants across the library.

use mirror_arith::charcount::{quintic_count, quintic_count_form, QuinticForm};
use mirror_arith::counting::{count_projective, DEFAULT_COUNT_CAP};
use mirror_arith::families::DworkFamily;
use mirror_arith::finite_field::make_ext_field;
use mirror_arith::frobenius::{extract_hypergeometric, HypergeometricData};
use mirror_arith::numeric::{harmonic, modring_pow, rat, BigRat, ModRing};
use mirror_arith::padic_char::{character_sum, complex_gauss_sum, complex_jacobi_sum, p_pow, teichmuller_int};
use mirror_arith::ratfun::{solve_dependency, solve_dependency_naive, Dependence, Poly, RatFun, ThetaOperator, TruncSeries};
use mirror_arith::zeta::{fit_weil_curve, newton_slopes, predict_curve_counts, zeta_series};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = BigRat> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn harmonic_steps(k in 1u64..40, r in 1u32..5) {
        let step = harmonic(k, r) - harmonic(k - 1, r);
        prop_assert_eq!(step, BigRat::new(BigInt::one(), BigInt::from(k).pow(r)));
    }

    #[test]
    fn rationals_form_a_field(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        for x in [&a + &b, &a * &c, &a - &c] {
            prop_assert!(x.numer().gcd(x.denom()).is_one());
        }
    }

    #[test]
    fn modring_power_is_additive(x in 0i64..10_000, a in 0u64..200, b in 0u64..200, p in prop::sample::select(vec![3u64, 5, 7, 13]), n in 1u32..6) {
        let v = ModRing::padic(x, p, n);
        prop_assert_eq!(modring_pow(&v, a + b), &modring_pow(&v, a) * &modring_pow(&v, b));
    }

    #[test]
    fn frobenius_permutes_and_fixes_prime_field(spec in prop::sample::select(vec![(2u64, 3u32), (3, 2), (5, 2), (7, 2), (3, 3)])) {
        let f = make_ext_field(spec.0, spec.1).unwrap();
        let mut images: Vec<u64> = f.enumerate().map(|x| f.code(&f.frobenius(&x))).collect();
        let fixed = f.enumerate().filter(|x| f.frobenius(x) == *x).count();
        images.sort();
        images.dedup();
        prop_assert_eq!(images.len() as u64, f.q());
        prop_assert_eq!(fixed as u64, spec.0);
        let g = f.generator_elem();
        let mut powers: Vec<u64> = (1..f.q()).map(|k| f.code(&f.pow(&g, k as u128))).collect();
        powers.sort();
        powers.dedup();
        prop_assert_eq!(powers.len() as u64, f.q() - 1);
    }

    #[test]
    fn trace_is_linear(spec in prop::sample::select(vec![(3u64, 2u32), (5, 3), (7, 2)]), a in 0u64..1000, b in 0u64..1000, c in 0u64..7) {
        let f = make_ext_field(spec.0, spec.1).unwrap();
        let (x, y) = (f.from_code(a % f.q()), f.from_code(b % f.q()));
        let cx = f.mul(&f.from_int(c as i64), &x);
        let lhs = f.trace(&f.add(&cx, &y));
        prop_assert_eq!(lhs, (c * f.trace(&x) + f.trace(&y)) % spec.0);
    }

    #[test]
    fn teichmuller_is_multiplicative(p in prop::sample::select(vec![5u64, 7, 11, 13]), x in 1u64..1000, y in 1u64..1000, n in 1u32..6) {
        let (x, y) = (x % (p - 1) + 1, y % (p - 1) + 1);
        let lhs = &teichmuller_int(x, p, n).unwrap() * &teichmuller_int(y, p, n).unwrap();
        prop_assert_eq!(lhs, teichmuller_int(x * y % p, p, n).unwrap());
    }

    #[test]
    fn character_orthogonality(p in prop::sample::select(vec![5u64, 7, 11]), i in -30i64..30, n in 1u32..5) {
        let s = character_sum(i, p, n).unwrap();
        let expect = if i.rem_euclid(p as i64 - 1) == 0 { p - 1 } else { 0 };
        prop_assert_eq!(s, ModRing::new(expect, p_pow(p, n)));
    }

    #[test]
    fn jacobi_matches_gauss_quotient(p in prop::sample::select(vec![5u64, 7, 11, 13]), a in 1i64..12, b in 1i64..12) {
        let o = p as i64 - 1;
        prop_assume!(a % o != 0 && b % o != 0 && (a + b) % o != 0);
        let g = |m: i64| complex_gauss_sum(m, p).unwrap().value();
        let j = complex_jacobi_sum(a, b, p).unwrap();
        prop_assert!((g(a) * g(b) / g(a + b) - j).norm() < 1e-9);
    }

    #[test]
    fn quintic_precision_is_coherent(p in prop::sample::select(vec![7u64, 13, 17, 19, 23]), psi in 2u64..30, n in 2u32..7) {
        prop_assume!(psi % p > 1);
        let hi = quintic_count(psi, p, n).unwrap();
        let lo = quintic_count(psi, p, n - 1).unwrap();
        let m = BigInt::from(p).pow(n - 1);
        prop_assert_eq!(hi.value.mod_floor(&m), lo.value);
        let reflected = quintic_count_form(psi, p, n, QuinticForm::Reflected).unwrap();
        prop_assert_eq!(reflected.value, hi.value);
    }

    #[test]
    fn theta_is_a_derivation(a in prop::collection::vec(small_rat(), 8), b in prop::collection::vec(small_rat(), 8)) {
        let f = TruncSeries::new("z", a);
        let g = TruncSeries::new("z", b);
        let lhs = f.mul(&g).unwrap().theta();
        let rhs = f.theta().mul(&g).unwrap().add(&f.mul(&g.theta()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_application_is_linear(a in prop::collection::vec(small_rat(), 8), b in prop::collection::vec(small_rat(), 8), c in small_rat()) {
        let op = ThetaOperator::new("z", vec![(0, Poly::from_ints(&[0, 0, 1])), (1, Poly::from_ints(&[-2, 3, 1])), (2, Poly::from_ints(&[1]))]);
        let f = TruncSeries::new("z", a);
        let g = TruncSeries::new("z", b);
        let lhs = op.apply_series(&f.scale(&c).add(&g).unwrap()).unwrap();
        let rhs = op.apply_series(&f).unwrap().scale(&c).add(&op.apply_series(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn weil_fit_round_trip(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), a in -7i64..8) {
        prop_assume!(a * a <= 4 * p as i64);
        let poly = vec![BigInt::one(), BigInt::from(-a), BigInt::from(p)];
        let counts: Vec<u64> = predict_curve_counts(&poly, p, 4).iter().map(|x| u64::try_from(x).unwrap()).collect();
        prop_assert!(zeta_series(&counts).is_ok());
        prop_assert_eq!(fit_weil_curve(&counts, p, 1).unwrap(), poly.clone());
        let slopes = newton_slopes(&poly, p).unwrap();
        let mass = slopes.slopes.iter().fold(BigRat::zero(), |acc, (s, m)| acc + s * rat(*m as i64, 1));
        prop_assert_eq!(mass, rat(1, 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hypergeometric_round_trip(
        upper in prop::collection::vec((1i64..7, 2i64..8), 1..4),
        lower_ints in prop::collection::vec(1i64..4, 3),
        scale in prop::sample::select(vec![rat(1, 1), rat(2, 1), rat(27, 1), rat(1, 3)]),
    ) {
        let upper: Vec<BigRat> = upper.iter().map(|&(a, b)| rat(a % b, b)).filter(|x| !x.is_zero()).collect();
        prop_assume!(!upper.is_empty() && upper.iter().all(|x| !x.is_integer()));
        let mut lower: Vec<BigRat> = lower_ints[..upper.len() - 1].iter().map(|&b| rat(b, 1)).collect();
        let mut up = upper.clone();
        up.sort();
        lower.sort();
        let data = HypergeometricData { upper: up, lower, scale, variable: "z".into() };
        let fitted = extract_hypergeometric(&data.series(20)).unwrap();
        prop_assert_eq!(fitted, data);
    }

    #[test]
    fn dependence_solvers_agree(entries in prop::collection::vec((-3i64..4, -3i64..4, 1i64..3), 6), c in (-3i64..4, 1i64..4)) {
        let rf = |(a, b, d): (i64, i64, i64)| RatFun::new(Poly::from_ints(&[a, b]), Poly::from_ints(&[d, 1]));
        let v: Vec<RatFun> = entries[..3].iter().map(|&e| rf(e)).collect();
        let w: Vec<RatFun> = entries[3..].iter().map(|&e| rf(e)).collect();
        let coeff = RatFun::new(Poly::from_ints(&[c.0, 1]), Poly::from_ints(&[c.1]));
        let u: Vec<RatFun> = v.iter().zip(&w).map(|(x, y)| &(&coeff * x) + y).collect();
        let vectors = vec![v.clone(), w.clone(), u.clone()];
        let fast = solve_dependency(&vectors);
        prop_assert_eq!(&fast, &solve_dependency_naive(&vectors));
        if let Dependence::Found(k) = fast {
            for i in 0..3 {
                let s = k.iter().zip(&vectors).fold(RatFun::zero(), |acc, (ki, vec)| &acc + &(ki * &vec[i]));
                prop_assert!(s.is_zero());
            }
        } else {
            prop_assert!(false, "a combination was built in");
        }
    }
}

#[test]
fn counts_do_not_depend_on_thread_count() {
    let f = make_ext_field(7, 1).unwrap();
    let poly = DworkFamily::new(5).unwrap().polynomial().instantiate(&f, &f.from_int(3));
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| count_projective(&poly, &f, DEFAULT_COUNT_CAP).unwrap())
    };
    let one = run(1);
    assert_eq!(one, 405);
    assert_eq!(run(4), one);
    assert_eq!(run(3), one);
}
