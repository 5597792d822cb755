use mirror_arith::charcount::{cubic_count, cubic_count_with, quintic_count, semiperiod_count, CubicConstant};
use mirror_arith::counting::{count_projective, count_projective_nonzero, DEFAULT_COUNT_CAP};
use mirror_arith::families::DworkFamily;
use mirror_arith::finite_field::make_ext_field;

fn dwork_count(n: usize, psi: i64, p: u64, nonzero: bool) -> u64 {
    let field = make_ext_field(p, 1).unwrap();
    let poly = DworkFamily::new(n).unwrap().polynomial().instantiate(&field, &field.from_int(psi));
    if nonzero {
        count_projective_nonzero(&poly, &field, DEFAULT_COUNT_CAP).unwrap()
    } else {
        count_projective(&poly, &field, DEFAULT_COUNT_CAP).unwrap()
    }
}

#[test]
fn quintic_matches_brute_force() {
    for (p, psi) in [(7u64, 2u64), (7, 3), (13, 3), (17, 2)] {
        let bf = dwork_count(5, psi as i64, p, false);
        let r = quintic_count(psi, p, 5).unwrap();
        assert_eq!(r.projective_exact, Some(bf), "p = {p}, psi = {psi}");
        let r6 = quintic_count(psi, p, 6).unwrap();
        assert_eq!(r6.exact, Some(1 + (p - 1) * bf));
    }
}

#[test]
fn cubic_matches_brute_force() {
    for (p, psi) in [(5u64, 2u64), (5, 3), (11, 2), (11, 5), (17, 4)] {
        let bf = dwork_count(3, psi as i64, p, true);
        let r = cubic_count(psi, p, 4).unwrap();
        assert_eq!(r.exact, Some((p - 1) * bf), "p = {p}, psi = {psi}");
        assert_eq!(r.projective_exact, Some(bf));
    }
}

#[test]
fn literal_cubic_constant_fails_calibration() {
    let bf = dwork_count(3, 2, 5, true);
    let lit = cubic_count_with(2, 5, 4, CubicConstant::Literal).unwrap();
    assert_ne!(lit.exact, Some(4 * bf));
    assert!(!lit.matches_projective(bf));
}

#[test]
fn semiperiod_agrees_mod_p() {
    for (p, psi) in [(7u64, 2u64), (13, 3)] {
        let bf = dwork_count(5, psi as i64, p, false);
        let r = semiperiod_count(psi, p, 5, Some(bf)).unwrap();
        eprintln!("p={p} psi={psi} digits={:?} residual={:?}", r.agreement_digits, r.residual);
        assert!(r.agreement_digits.unwrap() >= 1);
    }
}
