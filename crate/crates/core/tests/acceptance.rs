//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! numbers behind it and asserts the criterion.

use mirror_arith::verify::run_criterion;

fn check(id: u32) {
    let c = run_criterion(id);
    println!("{} criterion {:>2} ({}): {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
    assert!(c.pass, "criterion {id} failed: {}", c.detail);
}

#[test]
fn criterion_01_quintic_formula_matches_brute_force() {
    check(1);
}

#[test]
fn criterion_02_quintic_mod_p_is_truncated_hypergeometric() {
    check(2);
}

#[test]
fn criterion_03_golden_operators() {
    check(3);
}

#[test]
fn criterion_04_k3_operator_annihilates_period() {
    check(4);
}

#[test]
fn criterion_05_frobenius_solutions() {
    check(5);
}

#[test]
fn criterion_06_semiperiod_congruence_mod_p() {
    check(6);
}

#[test]
fn criterion_07_cubic_formula_matches_brute_force() {
    check(7);
}

#[test]
fn criterion_08_gauss_sum_identities() {
    check(8);
}

#[test]
fn criterion_09_curve_zeta_functions() {
    check(9);
}

#[test]
fn criterion_10_mirror_congruence() {
    check(10);
}

#[test]
fn criterion_11_weighted_projective_ambient() {
    check(11);
}
