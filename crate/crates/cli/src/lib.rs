//! Argument parsing and dispatch for the `mirror-arith` binary. `run` returns
//! the exit code, the JSON document and a human-readable summary so the whole
//! front end can be exercised in-process.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mirror_arith::charcount::{
    cubic_count, quintic_count, quintic_count_form, semiperiod_count, CharCountResult, QuinticForm,
};
use mirror_arith::counting::{
    count_family, count_projective, count_projective_nonzero, count_table, MirrorModel, DEFAULT_COUNT_CAP,
};
use mirror_arith::families::{CurveKind, DworkFamily, FamilyDescriptor, FermatDeformation, PsiValue};
use mirror_arith::finite_field::{make_ext_field, FieldSpec};
use mirror_arith::frobenius::{
    deformation_period, dwork_period, extract_hypergeometric, log_solutions, unnormalized_change_of_basis,
};
use mirror_arith::picard_fuchs::{derive_picard_fuchs, DifferentialOperator, Variable};
use mirror_arith::verify::{run_criterion, CRITERIA};
use mirror_arith::zeta::{curve_zeta, wan_congruence_check, zeta_series, WAN_MODEL};
use mirror_arith::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mirror-arith", version, about = "Point counts, Picard-Fuchs operators and zeta functions of the Dwork family")]
pub struct Cli {
    /// Write the JSON document to this file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print the JSON document on stdout instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for point counting (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Recorded in the output; no subcommand draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustive point count of one fiber, or a table over extensions.
    Count {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Model::Torus)]
        model: Model,
        /// Count over F_{q^r} for r = 1..=R.
        #[arg(long)]
        table: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_COUNT_CAP)]
        cap: u128,
    },
    /// Gauss-sum formula for the quintic (n = 5) or the cubic (n = 3).
    Charcount {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 5)]
        precision: u32,
        /// Compare with the exhaustive count.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Form::Jacobi)]
        form: Form,
        /// Evaluate the semi-period expression instead (quintic only).
        #[arg(long)]
        semiperiod: bool,
    },
    /// Picard-Fuchs operator by Griffiths-Dwork reduction.
    Pf {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = VariableArg::Psi)]
        variable: VariableArg,
        /// Exponent vector of the starting form x^v Omega / F^k, comma separated.
        #[arg(long, value_delimiter = ',')]
        start: Option<Vec<u32>>,
    },
    /// Frobenius solutions of the Dwork-n operator near the large-complex-structure point.
    Periods {
        #[arg(long, default_value_t = 5)]
        n: u64,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        /// Highest solution index (at most n - 2).
        #[arg(long)]
        i_max: Option<usize>,
        /// Also give the change of basis to the unnormalized solutions.
        #[arg(long)]
        unnormalized: bool,
    },
    /// Zeta data from point counts, and the mirror congruence.
    Zeta {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        /// Genus for the curve fit (the Fermat cubic defaults to 1).
        #[arg(long)]
        genus: Option<usize>,
        /// Check N_r(X) = N_r(Y) mod q^r against the mirror instead.
        #[arg(long)]
        wan: bool,
        #[arg(long, value_enum)]
        model: Option<Model>,
        #[arg(long, default_value_t = DEFAULT_COUNT_CAP)]
        cap: u128,
    },
    /// Run the acceptance grid and print a pass/fail table.
    Verify {
        /// Only these criteria (1..=11).
        #[arg(long, value_delimiter = ',')]
        criterion: Option<Vec<u32>>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Dwork)]
    pub family: FamilyKind,
    /// Family descriptor as JSON, or @path to a JSON file; overrides the other family flags.
    #[arg(long)]
    pub family_json: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// An integer, or comma-separated coefficients of an element of F_{p^r}.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Dwork,
    K3,
    Mirror,
    CurveA,
    CurveB,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Torus,
    Closure,
}

impl From<Model> for MirrorModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Torus => MirrorModel::Torus,
            Model::Closure => MirrorModel::Closure,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Jacobi,
    Reflected,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariableArg {
    /// `d/dpsi` acting on the period of `Omega / F`.
    Psi,
    /// `theta` in `w = psi^-m` acting on `psi` times the period.
    W,
    /// `theta` in `l = 1/(n psi)^n` (Dwork families only).
    Lambda,
    /// `theta` in the variable of the period series, `(-c psi)^-m`.
    Period,
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub document: Value,
    pub summary: String,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::NotPrime(_) | Error::Precondition(_) | Error::SingularFiber(_) | Error::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other),
        }
    }
}

type Step = std::result::Result<(Value, String, bool), Failure>;

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, document: Value::Null, summary: e.to_string() };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => return usage_outcome("threads", &e.to_string()),
    };
    let name = command_name(&cli.command);
    let result = pool.install(|| dispatch(&cli.command));
    let (code, result_doc, summary) = match result {
        Ok((doc, summary, ok)) => (if ok { 0 } else { 1 }, doc, summary),
        Err(Failure::Usage(msg)) => (2, json!({ "error": { "kind": "usage", "message": msg } }), format!("usage error: {msg}")),
        Err(Failure::Compute(e)) => {
            (1, json!({ "error": { "kind": "computation", "message": e.to_string() } }), format!("error: {e}"))
        }
    };
    let document = json!({
        "schema_version": SCHEMA_VERSION,
        "command": name,
        "seed": cli.seed,
        "result": result_doc,
    });
    if let Some(path) = &cli.output {
        let text = serde_json::to_string_pretty(&document).expect("serializable") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            return Outcome { code: 1, document, summary: format!("cannot write {}: {e}", path.display()) };
        }
    }
    let summary = if cli.json { serde_json::to_string_pretty(&document).expect("serializable") } else { summary };
    Outcome { code, document, summary }
}

fn usage_outcome(flag: &str, msg: &str) -> Outcome {
    Outcome {
        code: 2,
        document: json!({ "schema_version": SCHEMA_VERSION, "result": { "error": { "kind": "usage", "message": format!("--{flag}: {msg}") } } }),
        summary: format!("usage error: --{flag}: {msg}"),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Count { .. } => "count",
        Command::Charcount { .. } => "charcount",
        Command::Pf { .. } => "pf",
        Command::Periods { .. } => "periods",
        Command::Zeta { .. } => "zeta",
        Command::Verify { .. } => "verify",
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_psi(s: &str) -> PsiValue {
    if s.contains(',') {
        // validated when the field is built
        PsiValue::Coeffs(s.split(',').map(|c| c.trim().parse().unwrap_or(u64::MAX)).collect())
    } else {
        PsiValue::Scalar(s.trim().to_string())
    }
}

impl FamilyArgs {
    fn descriptor(&self) -> std::result::Result<FamilyDescriptor, Failure> {
        if let Some(text) = &self.family_json {
            let body = match text.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--family-json: {path}: {e}")))?,
                None => text.clone(),
            };
            return serde_json::from_str(&body).map_err(|e| Failure::Usage(format!("--family-json: {e}")));
        }
        let psi = self.psi.as_deref().map(parse_psi);
        let field = self.p.map(|p| FieldSpec { p, r: self.r });
        Ok(match self.family {
            FamilyKind::Dwork => FamilyDescriptor::Dwork { n: self.n, psi, field },
            FamilyKind::K3 => FamilyDescriptor::K3 { psi, field },
            FamilyKind::Mirror => FamilyDescriptor::SingularMirror { n: self.n, psi, field },
            FamilyKind::CurveA => FamilyDescriptor::Curve { kind: CurveKind::A, psi, field },
            FamilyKind::CurveB => FamilyDescriptor::Curve { kind: CurveKind::B, psi, field },
        })
    }

    fn prime_field_point(&self, what: &str) -> std::result::Result<(u64, u64), Failure> {
        let p = self.p.ok_or_else(|| Failure::Usage(format!("--p is required for {what}")))?;
        if self.r != 1 {
            return Err(Failure::Usage(format!("--r: {what} works over F_p only")));
        }
        let psi = self.psi.as_deref().ok_or_else(|| Failure::Usage(format!("--psi is required for {what}")))?;
        let v: i64 = psi.trim().parse().map_err(|_| Failure::Usage(format!("--psi: {psi:?} is not an integer")))?;
        Ok((p, v.rem_euclid(p as i64) as u64))
    }
}

fn dispatch(cmd: &Command) -> Step {
    match cmd {
        Command::Count { family, model, table, cap } => count(family, (*model).into(), *table, *cap),
        Command::Charcount { family, precision, verify, form, semiperiod } => {
            charcount(family, *precision, *verify, *form, *semiperiod)
        }
        Command::Pf { family, variable, start } => pf(family, *variable, start.as_deref()),
        Command::Periods { n, terms, i_max, unnormalized } => periods(*n, *terms, *i_max, *unnormalized),
        Command::Zeta { family, r_max, genus, wan, model, cap } => zeta(family, *r_max, *genus, *wan, *model, *cap),
        Command::Verify { criterion } => verify(criterion.as_deref()),
    }
}

fn count(args: &FamilyArgs, model: MirrorModel, table: Option<u32>, cap: u128) -> Step {
    let family = args.descriptor()?;
    if family.field().is_none() || family.psi().is_none() {
        return Err(Failure::Usage("count needs --p and --psi (or a descriptor with field and psi)".into()));
    }
    match table {
        Some(r_max) => {
            if r_max == 0 {
                return Err(Failure::Usage("--table must be at least 1".into()));
            }
            let t = count_table(&family, r_max, model, cap)?;
            let counts: Vec<String> = t.rows.iter().map(|c| c.count.to_string()).collect();
            let mut summary = format!("N_r for r = 1..{}: {}", t.rows.len(), counts.join(", "));
            if let Some(reason) = &t.truncation_reason {
                summary += &format!(" (stopped: {reason})");
            }
            Ok((to_value(&t), summary, true))
        }
        None => {
            let c = count_family(&family, model, cap)?;
            let mut summary = format!("N = {} over F_{}^{} ({:?})", c.count, c.field.p, c.field.r, c.variant);
            if let Some(o) = c.orbits {
                summary += &format!(", {o} orbits of the weighted action");
            }
            Ok((to_value(&c), summary, true))
        }
    }
}

fn charcount(args: &FamilyArgs, precision: u32, verify: bool, form: Form, semiperiod: bool) -> Step {
    if args.family != FamilyKind::Dwork || args.family_json.is_some() {
        return Err(Failure::Usage("--family: charcount supports the Dwork family only".into()));
    }
    let (p, psi) = args.prime_field_point("charcount")?;
    let brute = |nonzero: bool| -> std::result::Result<u64, Failure> {
        let field = make_ext_field(p, 1)?;
        let poly = DworkFamily::new(args.n)?.polynomial().instantiate(&field, &field.from_int(psi as i64));
        Ok(if nonzero {
            count_projective_nonzero(&poly, &field, DEFAULT_COUNT_CAP)?
        } else {
            count_projective(&poly, &field, DEFAULT_COUNT_CAP)?
        })
    };
    if semiperiod {
        if args.n != 5 {
            return Err(Failure::Usage("--semiperiod needs --n 5".into()));
        }
        let reference = if verify { Some(brute(false)?) } else { None };
        let r = semiperiod_count(psi, p, precision, reference)?;
        let mut summary = format!("semi-period value {} mod {p}^{precision}", r.count.value);
        if let (Some(d), Some(res)) = (r.agreement_digits, &r.residual) {
            summary += &format!("; agrees with 1 + (p-1) N mod {p}^{d}, residual {res}");
        }
        let mut doc = to_value(&r);
        if let Some(n) = reference {
            doc["brute_force"] = json!(n);
            doc["match"] = json!(r.agreement_digits.is_some_and(|d| d >= 1));
        }
        return Ok((doc, summary, true));
    }
    let mut r: CharCountResult = match args.n {
        5 => match form {
            Form::Jacobi => quintic_count(psi, p, precision)?,
            Form::Reflected => quintic_count_form(psi, p, precision, QuinticForm::Reflected)?,
        },
        3 => cubic_count(psi, p, precision)?,
        n => return Err(Failure::Usage(format!("--n: character formulas exist for n = 3 and n = 5, not {n}"))),
    };
    let projective = r.projective_exact.map_or_else(|| format!("{} mod {p}^{precision}", r.projective), |x| x.to_string());
    let mut summary = format!("formula value {} ({:?}), projective count {projective}", r.value, r.counts);
    let mut matched = None;
    if verify {
        let bf = brute(args.n == 3)?;
        r.brute_force = Some(bf);
        let m = r.matches_projective(bf);
        matched = Some(m);
        summary += &format!("; brute force {bf}: {}", if m { "match" } else { "MISMATCH" });
    }
    let mut doc = to_value(&r);
    if let Some(m) = matched {
        doc["match"] = json!(m);
    }
    Ok((doc, summary, matched.unwrap_or(true)))
}

fn deformation_of(family: &FamilyDescriptor) -> std::result::Result<FermatDeformation, Failure> {
    match family {
        FamilyDescriptor::Dwork { n, .. } => Ok(DworkFamily::new(*n)?.as_deformation()),
        FamilyDescriptor::K3 { .. } => Ok(FermatDeformation::k3_3678()),
        FamilyDescriptor::FermatDeformation { data, .. } => Ok(data.clone()),
        _ => Err(Failure::Usage("--family: Picard-Fuchs operators need a Fermat-type deformation".into())),
    }
}

fn operator_doc(op: &DifferentialOperator) -> std::result::Result<Value, Failure> {
    let theta = op.to_theta_operator()?;
    Ok(json!({
        "operator": to_value(op),
        "text": op.text(),
        "theta_form": to_value(&theta),
        "canonical_text": theta.canonical_text(op.variable.symbol()),
    }))
}

fn pf(args: &FamilyArgs, variable: VariableArg, start: Option<&[u32]>) -> Step {
    let family = args.descriptor()?;
    let fd = deformation_of(&family)?;
    let start = start.map(|s| s.to_vec()).unwrap_or_else(|| vec![0; fd.nvars()]);
    if start.len() != fd.nvars() {
        return Err(Failure::Usage(format!("--start: {} exponents for {} variables", start.len(), fd.nvars())));
    }
    let pf = derive_picard_fuchs(&fd, &start)?;
    let (_, step) = deformation_period(&fd, 0)?;
    let op = match variable {
        VariableArg::Psi => pf.operator.normalize(),
        VariableArg::W => pf.operator.gauge(1).change_variable(&Variable::w(step as u32))?.normalize(),
        VariableArg::Lambda => match family {
            FamilyDescriptor::Dwork { n, .. } => pf.operator.gauge(1).change_variable(&Variable::lambda(n as u32))?.normalize(),
            _ => return Err(Failure::Usage("--variable lambda is defined for Dwork families only".into())),
        },
        VariableArg::Period => {
            let scale = mirror_arith::numeric::rat(1, -fd.deformation_coeff).pow(step as i32);
            pf.operator.gauge(1).change_variable(&Variable::inverse("z", step as u32, scale))?.normalize()
        }
    };
    let mut doc = operator_doc(&op)?;
    doc["order"] = json!(op.order());
    doc["start"] = to_value(&pf.start);
    doc["basis"] = to_value(&pf.basis);
    doc["max_pole"] = json!(pf.max_pole);
    doc["warnings"] = to_value(&fd.warnings());
    let text = match variable {
        VariableArg::Psi => op.text(),
        _ => doc["canonical_text"].as_str().unwrap_or_default().to_string(),
    };
    let summary = format!("order {} operator: {text}", op.order());
    Ok((doc, summary, true))
}

fn periods(n: u64, terms: usize, i_max: Option<usize>, unnormalized: bool) -> Step {
    if n < 3 {
        return Err(Failure::Usage("--n must be at least 3".into()));
    }
    let i_max = i_max.unwrap_or(n as usize - 2);
    let sols = log_solutions(n, i_max, terms)?;
    let fit = extract_hypergeometric(&dwork_period(n, terms.max(12)))?;
    let mut doc = json!({
        "n": n,
        "variable": "l",
        "lambda": format!("1/({n} psi)^{n}"),
        "terms": terms,
        "solutions": to_value(&sols),
        "hypergeometric": to_value(&fit),
    });
    if unnormalized {
        let rows = unnormalized_change_of_basis(n, i_max.min(4), terms)?;
        doc["unnormalized_change_of_basis"] =
            json!(rows.iter().map(|r| r.iter().map(|z| z.to_string_symbols()).collect::<Vec<_>>()).collect::<Vec<_>>());
    }
    let up: Vec<String> = fit.upper.iter().map(|x| x.to_string()).collect();
    let lo: Vec<String> = fit.lower.iter().map(|x| x.to_string()).collect();
    let summary = format!(
        "{} solutions w_0..w_{i_max} with {terms} terms; holomorphic period is F({}; {}; {} l)",
        sols.len(),
        up.join(","),
        lo.join(","),
        fit.scale
    );
    Ok((doc, summary, true))
}

fn zeta(args: &FamilyArgs, r_max: u32, genus: Option<usize>, wan: bool, model: Option<Model>, cap: u128) -> Step {
    let family = args.descriptor()?;
    if r_max == 0 {
        return Err(Failure::Usage("--r-max must be at least 1".into()));
    }
    if wan {
        let FamilyDescriptor::Dwork { n, .. } = family else {
            return Err(Failure::Usage("--wan compares a Dwork hypersurface with its mirror".into()));
        };
        let (base, psi) = family.instantiate()?;
        let model = model.map_or(WAN_MODEL, MirrorModel::from);
        let report = wan_congruence_check(n, &psi, &base, r_max, model, cap)?;
        let rows: Vec<String> = report
            .rows
            .iter()
            .map(|w| format!("r={}: {} vs {} ({})", w.r, w.count_x, w.count_y, if w.pass { "ok" } else { "FAIL" }))
            .collect();
        let summary = format!("{:?} mirror: {}", model, rows.join("; "));
        let ok = report.pass();
        return Ok((to_value(&report), summary, ok));
    }
    let m = model.map_or(MirrorModel::Torus, MirrorModel::from);
    let t = count_table(&family, r_max, m, cap)?;
    let counts: Vec<u64> = t.rows.iter().map(|c| c.count).collect();
    let q = family.field().map(|f| f.p.pow(f.r)).expect("instantiated above");
    let genus = genus.or(match family {
        FamilyDescriptor::Dwork { n: 3, .. } => Some(1),
        _ => None,
    });
    let doc = match genus {
        Some(g) => {
            let data = curve_zeta(&counts, q, g)?;
            json!({ "counts_table": to_value(&t), "zeta": to_value(&data) })
        }
        None => {
            let series = zeta_series(&counts)?;
            json!({ "counts_table": to_value(&t), "zeta": { "q": q, "counts": counts, "series": series.to_strings() } })
        }
    };
    let summary = match doc["zeta"].get("numerator") {
        Some(num) => format!("N_r = {counts:?}; P_1 = {num}"),
        None => format!("N_r = {counts:?}; Z(T) = {}", doc["zeta"]["series"]),
    };
    Ok((doc, summary, true))
}

fn verify(ids: Option<&[u32]>) -> Step {
    let ids: Vec<u32> = ids.map(|v| v.to_vec()).unwrap_or_else(|| (1..=CRITERIA).collect());
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA) {
        return Err(Failure::Usage(format!("--criterion: no criterion {bad}")));
    }
    let results: Vec<_> = ids.iter().map(|&i| run_criterion(i)).collect();
    let mut lines = vec![format!("{:>3}  {:<6}  {}", "id", "result", "criterion")];
    for c in &results {
        lines.push(format!("{:>3}  {:<6}  {}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.name));
    }
    for c in results.iter().filter(|c| !c.pass) {
        lines.push(format!("criterion {}: {}", c.id, c.detail));
    }
    let passed = results.iter().filter(|c| c.pass).count();
    lines.push(format!("{passed}/{} criteria pass", results.len()));
    let ok = passed == results.len();
    Ok((json!({ "criteria": to_value(&results), "passed": passed, "total": results.len() }), lines.join("\n"), ok))
}
