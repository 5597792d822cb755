use mirror_arith_web::{count_vs_formula, fit_hypergeometric, picard_fuchs};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn quintic_count_matches_formula() {
    let v = parse(count_vs_formula(5, 7, 3));
    assert_eq!(v["ok"], true);
    assert_eq!(v["brute_force"], 405);
    assert_eq!(v["match"], true);
}

#[test]
fn cubic_count_matches_formula() {
    let v = parse(count_vs_formula(3, 11, 2));
    assert_eq!(v["brute_force"], 15);
    assert_eq!(v["match"], true);
}

#[test]
fn bad_inputs_are_reported() {
    assert_eq!(parse(count_vs_formula(5, 29, 2))["ok"], false);
    assert_eq!(parse(count_vs_formula(5, 11, 2))["ok"], false);
    assert_eq!(parse(count_vs_formula(4, 7, 2))["ok"], false);
    assert_eq!(parse(picard_fuchs(5, "x"))["ok"], false);
    assert_eq!(parse(fit_hypergeometric("1, 2, oops"))["ok"], false);
}

#[test]
fn quintic_operator() {
    let v = parse(picard_fuchs(5, "lambda"));
    assert_eq!(v["text"], "t^4 - 5*l*(5t+1)*(5t+2)*(5t+3)*(5t+4)");
    assert_eq!(v["order"], 4);
}

#[test]
fn central_binomial_fit() {
    // C(2k, k): ratio 4 (k + 1/2) / (k + 1)
    let coeffs = "1,2,6,20,70,252,924,3432,12870,48620,184756,705432,2704156";
    let v = parse(fit_hypergeometric(coeffs));
    assert_eq!(v["upper"], serde_json::json!(["1/2"]));
    assert_eq!(v["lower"], serde_json::json!([]));
    assert_eq!(v["scale"], "4");
}

#[test]
fn page_default_input_is_the_quintic_period() {
    let html = include_str!("../www/index.html");
    let start = html.find("value=\"1,120").unwrap() + 7;
    let end = start + html[start..].find('"').unwrap();
    let v = parse(fit_hypergeometric(&html[start..end]));
    assert_eq!(v["upper"], serde_json::json!(["1/5", "2/5", "3/5", "4/5"]));
    assert_eq!(v["lower"], serde_json::json!(["1", "1", "1"]));
    assert_eq!(v["scale"], "3125");
}
