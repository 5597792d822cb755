//! Three in-page operations for the static demo. Every export returns a JSON
//! string with either `"ok": true` and the payload or `"ok": false` and an
//! error message, so the same functions run natively in tests.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use mirror_arith::charcount::{cubic_count, quintic_count};
use mirror_arith::counting::{count_projective, count_projective_nonzero, DEFAULT_COUNT_CAP};
use mirror_arith::families::DworkFamily;
use mirror_arith::finite_field::make_ext_field;
use mirror_arith::frobenius::extract_hypergeometric;
use mirror_arith::numeric::rat_from_str;
use mirror_arith::picard_fuchs::{derive_picard_fuchs, Variable};
use mirror_arith::ratfun::TruncSeries;

/// Largest prime the page will enumerate; keeps a quintic count under a second.
pub const MAX_PRIME: u32 = 23;

fn reply(r: Result<Value, String>) -> String {
    match r {
        Ok(mut v) => {
            v["ok"] = json!(true);
            v.to_string()
        }
        Err(e) => json!({ "ok": false, "error": e }).to_string(),
    }
}

/// Exhaustive count of the Dwork fiber (n = 3 or 5) against its Gauss-sum formula.
#[wasm_bindgen]
pub fn count_vs_formula(n: u32, p: u32, psi: u32) -> String {
    reply(count_vs_formula_inner(n, p, psi))
}

fn count_vs_formula_inner(n: u32, p: u32, psi: u32) -> Result<Value, String> {
    if p > MAX_PRIME {
        return Err(format!("p is limited to {MAX_PRIME} in the browser"));
    }
    let (p, psi) = (p as u64, psi as u64 % p as u64);
    let field = make_ext_field(p, 1).map_err(|e| e.to_string())?;
    let poly = DworkFamily::new(n as usize)
        .map_err(|e| e.to_string())?
        .polynomial()
        .instantiate(&field, &field.from_int(psi as i64));
    let (formula, brute, counted) = match n {
        5 => (
            quintic_count(psi, p, 5).map_err(|e| e.to_string())?,
            count_projective(&poly, &field, DEFAULT_COUNT_CAP).map_err(|e| e.to_string())?,
            "projective points",
        ),
        3 => (
            cubic_count(psi, p, 4).map_err(|e| e.to_string())?,
            count_projective_nonzero(&poly, &field, DEFAULT_COUNT_CAP).map_err(|e| e.to_string())?,
            "projective points with nonzero coordinates",
        ),
        _ => return Err("the character formulas cover n = 3 and n = 5".into()),
    };
    Ok(json!({
        "counted": counted,
        "brute_force": brute,
        "formula_value": formula.value.to_string(),
        "formula_count": formula.projective_exact,
        "match": formula.projective_exact == Some(brute),
    }))
}

/// Picard-Fuchs operator of the Dwork family in `psi`, `w = psi^-n` or `l = 1/(n psi)^n`.
#[wasm_bindgen]
pub fn picard_fuchs(n: u32, variable: &str) -> String {
    reply(picard_fuchs_inner(n, variable))
}

fn picard_fuchs_inner(n: u32, variable: &str) -> Result<Value, String> {
    if !(3..=6).contains(&n) {
        return Err("n between 3 and 6 keeps the derivation interactive".into());
    }
    let fd = DworkFamily::new(n as usize).map_err(|e| e.to_string())?.as_deformation();
    let pf = derive_picard_fuchs(&fd, &vec![0; n as usize]).map_err(|e| e.to_string())?;
    let op = match variable {
        "psi" => pf.operator.normalize(),
        "w" => pf.operator.gauge(1).change_variable(&Variable::w(n)).map_err(|e| e.to_string())?.normalize(),
        "lambda" => pf.operator.gauge(1).change_variable(&Variable::lambda(n)).map_err(|e| e.to_string())?.normalize(),
        other => return Err(format!("unknown variable {other:?}")),
    };
    let text = match variable {
        "psi" => op.text(),
        _ => op.to_theta_operator().map_err(|e| e.to_string())?.canonical_text(op.variable.symbol()),
    };
    Ok(json!({ "order": op.order(), "text": text, "reduced_basis_size": pf.basis.len() }))
}

/// Hypergeometric parameters of a series given by comma-separated coefficients.
#[wasm_bindgen]
pub fn fit_hypergeometric(coefficients: &str) -> String {
    reply(fit_inner(coefficients))
}

fn fit_inner(coefficients: &str) -> Result<Value, String> {
    let c = coefficients
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| rat_from_str(s).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let h = extract_hypergeometric(&TruncSeries::new("z", c)).map_err(|e| e.to_string())?;
    Ok(json!({
        "upper": h.upper.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "lower": h.lower.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "scale": h.scale.to_string(),
        "operator": h.operator().canonical_text("z"),
    }))
}
