use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use zerofull::ballgeom::{classify, endpoint_case, BOTH_ENDPOINT_NOTE};
use zerofull::cantor::{distance, gamma_f64, CantorParams};
use zerofull::census::{
    count_surviving, growth_fit, output, CensusOptions, CensusRow, GrowthFit, Method, Radius,
};
use zerofull::laws::{
    heuristic_count_exponent, lambda_psi, predict_dimension, verdict, LambdaBasis, LambdaEstimate, PredictedValue,
    Prediction,
};
use zerofull::regime::{analyze, Regime};
use zerofull::Rational;

use crate::config::RunConfig;
use crate::specs;
use crate::CliError;

/// A rendered run before the output format is chosen.
pub struct Report {
    pub result: Value,
    pub human: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Census rows, for the row-oriented formats.
    pub census: Option<Vec<CensusRow>>,
    pub exit: i32,
}

impl Report {
    fn new(result: &impl Serialize, human: String) -> Self {
        Report {
            result: serde_json::to_value(result).expect("results serialize"),
            human,
            header: vec![],
            rows: vec![],
            census: None,
            exit: 0,
        }
    }

    fn table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.header = header.iter().map(|s| s.to_string()).collect();
        self.rows = rows;
        self
    }
}

fn need<'a>(field: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    field
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

fn cantor(cfg: &RunConfig) -> Result<CantorParams, CliError> {
    specs::params(need(&cfg.b, "-b")?, need(&cfg.digits, "-D")?)
}

/// `t`, defaulting to the Cantor base.
fn query_base(cfg: &RunConfig, params: &CantorParams) -> Result<u64, CliError> {
    match &cfg.t {
        Some(t) => specs::number("-t", t),
        None => Ok(params.base() as u64),
    }
}

/// An enum's serialized name, or compact JSON for anything richer.
fn tag(x: &impl Serialize) -> String {
    match serde_json::to_value(x).expect("serializes") {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

fn census_opts(cfg: &RunConfig) -> CensusOptions {
    CensusOptions {
        cap: cfg.cap,
        workers: cfg.workers,
        ..CensusOptions::default()
    }
}

pub fn regime(cfg: &RunConfig) -> Result<Report, CliError> {
    let b = specs::number("-b", need(&cfg.b, "-b")?)?;
    let t = specs::number("-t", need(&cfg.t, "-t")?)?;
    let rep = analyze(b, t)?;
    let mut h = String::new();
    writeln!(h, "regime        {}", rep.regime).unwrap();
    writeln!(h, "primes of b   {:?}", rep.primes_b).unwrap();
    writeln!(h, "primes of t   {:?}", rep.primes_t).unwrap();
    writeln!(h, "prime  v_b  v_t").unwrap();
    for v in &rep.valuations {
        writeln!(h, "{:>5} {:>4} {:>4}", v.prime, v.v_b, v.v_t).unwrap();
    }
    match (&rep.alpha1, &rep.alpha2) {
        (Some(a1), Some(a2)) if a1 == a2 => writeln!(h, "α             {a1}").unwrap(),
        (Some(a1), Some(a2)) => writeln!(h, "α₁ = {a1}, α₂ = {a2}").unwrap(),
        _ => {}
    }
    if let Some((k, l)) = rep.dependence {
        writeln!(h, "dependence    {b}^{k} = {t}^{l}").unwrap();
    }
    writeln!(h, "log t/log b   {:.15}", rep.log_ratio).unwrap();
    let rows = rep
        .valuations
        .iter()
        .map(|v| vec![v.prime.to_string(), v.v_b.to_string(), v.v_t.to_string()])
        .collect();
    Ok(Report::new(&rep, h).table(&["prime", "v_b", "v_t"], rows))
}

pub fn verdict_cmd(cfg: &RunConfig, verbose: bool) -> Result<Report, CliError> {
    let params = cantor(cfg)?;
    let t = query_base(cfg, &params)?;
    let psi = specs::psi(need(&cfg.psi, "--psi")?, cfg.sequence.as_deref())?;
    let f = specs::dimension_function(need(&cfg.f, "--f")?)?;
    let v = verdict(&params, t, &f, &psi)?;
    let mut h = String::new();
    writeln!(h, "outcome   {}", v.outcome).unwrap();
    writeln!(h, "law       {}", tag(&v.law)).unwrap();
    if let Some(large) = v.large_psi {
        writeln!(h, "ψ_A(i) >= t^-i/2 infinitely often: {large}").unwrap();
    }
    for s in &v.series {
        writeln!(h, "{}: {} ({}), qualifying {}", s.label, tag(&s.behavior), tag(&s.decision_basis), tag(&s.qualifying)).unwrap();
        writeln!(h, "  {}", s.reason).unwrap();
        if verbose {
            for p in &s.partial_sums {
                match p.log10_sum {
                    Some(l) => writeln!(h, "  partial sum of {} terms: 10^{l:.6}", p.terms).unwrap(),
                    None => writeln!(h, "  partial sum of {} terms: 0", p.terms).unwrap(),
                }
            }
        }
    }
    for n in &v.notes {
        writeln!(h, "note: {n}").unwrap();
    }
    let rows = v
        .series
        .iter()
        .map(|s| {
            vec![
                s.label.clone(),
                tag(&s.behavior),
                tag(&s.decision_basis),
                tag(&s.qualifying),
                v.outcome.to_string(),
                s.reason.clone(),
            ]
        })
        .collect();
    let mut report = Report::new(&v, h).table(&["series", "behavior", "basis", "qualifying", "outcome", "reason"], rows);
    report.exit = v.exit_code();
    Ok(report)
}

#[derive(Serialize)]
struct Classified {
    case: zerofull::ballgeom::EndpointCase,
    form: zerofull::ballgeom::IntersectionForm,
}

pub fn classify_cmd(cfg: &RunConfig, verbose: bool) -> Result<Report, CliError> {
    let params = cantor(cfg)?;
    let p: BigInt = specs::number("-p", need(&cfg.p, "-p")?)?;
    let n: u32 = specs::number("-n", need(&cfg.n, "-n")?)?;
    let radius = specs::rational("-r", need(&cfg.r, "-r")?)?;
    let form = classify(&params, &p, n, &radius)?;
    let case = endpoint_case(&params, &p, n)?;
    let mut h = String::new();
    writeln!(h, "endpoint case  {}", tag(&case)).unwrap();
    writeln!(h, "intersection   {}", form.label()).unwrap();
    for ball in form.balls() {
        writeln!(h, "  {ball} ∩ C").unwrap();
    }
    if verbose {
        writeln!(h, "note: {BOTH_ENDPOINT_NOTE}").unwrap();
    }
    let rows = if form.balls().is_empty() {
        vec![vec![form.label().into(), String::new(), String::new()]]
    } else {
        form.balls()
            .into_iter()
            .map(|b| vec![form.label().into(), b.center.to_string(), b.radius.to_string()])
            .collect()
    };
    Ok(Report::new(&Classified { case, form }, h).table(&["form", "center", "radius"], rows))
}

#[derive(Serialize)]
struct CensusResult {
    rows: Vec<CensusRow>,
    fit: Option<GrowthFit>,
    /// The value the fitted exponent is compared with, when there is one.
    reference: Option<Reference>,
}

#[derive(Serialize)]
struct Reference {
    name: String,
    value: f64,
}

fn method_list(cfg: &RunConfig) -> Result<Vec<Method>, CliError> {
    match cfg.method.as_deref().unwrap_or("exact") {
        "both" => Ok(vec![Method::Exact, Method::BruteForce]),
        m => Ok(vec![m.parse::<Method>()?]),
    }
}

pub fn census_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cantor(cfg)?;
    let t = query_base(cfg, &params)?;
    let levels = specs::levels(need(&cfg.n, "-n")?)?;
    let theta = cfg.theta.as_deref().map(|x| specs::rational("--theta", x)).transpose()?;
    let fixed = cfg.r.as_deref().map(|x| x.parse::<Radius>()).transpose()?;
    let radius_at = |n: u32| -> Result<Radius, CliError> {
        match (&fixed, &theta) {
            (Some(r), None) => Ok(r.clone()),
            (None, Some(th)) => Ok(Radius::power(Rational::one(), t, th * Rational::from(n))?),
            _ => Err(CliError::Usage("give exactly one of -r and --theta".into())),
        }
    };
    let opts = census_opts(cfg);
    let methods = method_list(cfg)?;
    let mut rows = Vec::new();
    for n in levels {
        let radius = radius_at(n)?;
        let got: Vec<CensusRow> = methods
            .iter()
            .map(|&m| count_surviving(&params, t, n, &radius, m, &opts))
            .collect::<Result<_, _>>()?;
        if got.windows(2).any(|w| w[0].count != w[1].count) {
            return Err(CliError::Failed(format!(
                "methods disagree at n = {n}: {:?}",
                got.iter().map(|r| (r.method, r.count)).collect::<Vec<_>>()
            )));
        }
        rows.extend(got);
    }
    let exact: Vec<CensusRow> = rows.iter().filter(|r| r.method == methods[0]).cloned().collect();
    let fit = theta.as_ref().and_then(|_| growth_fit(&exact, t).ok());
    let reference = match (&theta, &fit) {
        (Some(th), Some(_)) => {
            let rep = analyze(params.base() as u64, t)?;
            Some(if rep.regime == Regime::DifferentPrimes {
                Reference {
                    name: "1-θ(1-γ)".into(),
                    value: heuristic_count_exponent(&params, th),
                }
            } else {
                Reference {
                    name: "γ".into(),
                    value: gamma_f64(&params),
                }
            })
        }
        _ => None,
    };
    let mut h = String::new();
    writeln!(h, "{:>4} {:>20} {:>14} {:>12}", "n", "radius", "count", "method").unwrap();
    for r in &rows {
        writeln!(h, "{:>4} {:>20} {:>14} {:>12}", r.n, r.radius, r.count, r.method.to_string()).unwrap();
    }
    if let Some(fit) = &fit {
        writeln!(h, "growth exponent {:.6} (R² {:.6}, {} rows)", fit.exponent, fit.r_squared, fit.rows_used).unwrap();
        if let (Some(th), Some(rf)) = (&theta, &reference) {
            writeln!(h, "reference {} = {:.6}", rf.name, rf.value).unwrap();
            if rf.name == "γ" {
                writeln!(h, "cover exponent s* = {:.6}, γ/θ = {:.6}", fit.exponent / th.to_f64(), rf.value / th.to_f64()).unwrap();
            }
        }
    }
    let table = rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.t.to_string(), r.radius.clone(), r.count.to_string(), r.method.to_string()])
        .collect();
    let result = CensusResult { rows: rows.clone(), fit, reference };
    let mut report = Report::new(&result, h).table(&["n", "t", "radius", "count", "method"], table);
    report.census = Some(rows);
    Ok(report)
}

#[derive(Serialize)]
struct PredictResult {
    lambda: f64,
    /// Present when λ was derived from `--psi`.
    estimate: Option<LambdaEstimate>,
    prediction: Prediction,
}

pub fn predict_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = cantor(cfg)?;
    let t = query_base(cfg, &params)?;
    let (lambda, estimate) = match (&cfg.lambda, &cfg.psi) {
        (Some(l), None) => (specs::rational("--lambda", l)?.to_f64(), None),
        (None, Some(p)) => {
            let est = lambda_psi(&specs::psi(p, None)?, t)?;
            (est.value, Some(est))
        }
        _ => return Err(CliError::Usage("give exactly one of --lambda and --psi".into())),
    };
    let theta = cfg.theta.as_deref().map(|x| specs::rational("--theta", x)).transpose()?;
    let prediction = predict_dimension(&params, t, lambda, theta.as_ref())?;
    let mut h = String::new();
    writeln!(h, "regime  {}", prediction.regime).unwrap();
    writeln!(h, "γ       {:.15}", prediction.gamma).unwrap();
    let source = match estimate.as_ref().map(|e| &e.basis) {
        None => "given".to_string(),
        Some(LambdaBasis::ClosedForm) => "closed form".to_string(),
        Some(LambdaBasis::Window { start, end, oscillating }) => format!(
            "table window {start}..={end}{}",
            if *oscillating { ", oscillating" } else { "" }
        ),
    };
    writeln!(h, "λ       {lambda:.15} ({source})").unwrap();
    let mut rows = Vec::new();
    for e in &prediction.entries {
        let grade = tag(&e.grade);
        let (lo, hi) = match e.value {
            PredictedValue::Point { value } => (value, value),
            PredictedValue::Interval { lower, upper } => (lower, upper),
        };
        if lo == hi {
            writeln!(h, "{:.15} [{grade}]  {}", lo, e.quantity).unwrap();
        } else {
            writeln!(h, "[{lo:.15}, {hi:.15}] [{grade}]  {}", e.quantity).unwrap();
        }
        rows.push(vec![e.quantity.clone(), grade, lo.to_string(), hi.to_string()]);
    }
    for n in &prediction.notes {
        writeln!(h, "note: {n}").unwrap();
    }
    let result = PredictResult { lambda, estimate, prediction };
    Ok(Report::new(&result, h).table(&["quantity", "grade", "lower", "upper"], rows))
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    detail: String,
}

fn example31(cfg: &RunConfig) -> Result<Vec<CheckLine>, CliError> {
    let params = CantorParams::new(5, &[1, 2])?;
    let opts = census_opts(cfg);
    let mut lines = Vec::new();
    for n in 1..=7u32 {
        let radius = Rational::new(1, 4) * Rational::integer_pow(5, -(n as i64));
        let top = 5u64.pow(n);
        let mut nonempty = 0u64;
        for p in 0..=top {
            if !classify(&params, &BigInt::from(p), n, &radius)?.is_empty() {
                nonempty += 1;
            }
        }
        let count = count_surviving(&params, 5, n, &Radius::rational(radius)?, Method::Exact, &opts)?.count;
        lines.push(CheckLine {
            name: format!("n = {n}"),
            passed: nonempty == 0 && count == 0,
            detail: format!("{nonempty} of {} balls meet the set; census count {count}", top + 1),
        });
    }
    Ok(lines)
}

fn random_digits(rng: &mut ChaCha8Rng, b: u32) -> Vec<u32> {
    loop {
        let d: Vec<u32> = (0..b).filter(|_| rng.gen_bool(0.5)).collect();
        if d.len() >= 2 && d.len() < b as usize {
            return d;
        }
    }
}

/// Exact census against brute force, and the classifier against the
/// exact distance of the ball centre.
fn oracles(cfg: &RunConfig) -> Result<Vec<CheckLine>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = census_opts(cfg);
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for _ in 0..200 {
        let b = rng.gen_range(3..=6u32);
        let params = CantorParams::new(b, &random_digits(&mut rng, b))?;
        let t = rng.gen_range(2..=5u64);
        let n = rng.gen_range(1..=5u32);
        let k = rng.gen_range(1..=8i64);
        let radius = Rational::new(rng.gen_range(1..=3 * k), k * t.pow(n) as i64).min(Rational::new(9, 10));
        let radius = Radius::rational(radius)?;
        let exact = count_surviving(&params, t, n, &radius, Method::Exact, &opts)?.count;
        let brute = count_surviving(&params, t, n, &radius, Method::BruteForce, &opts)?.count;
        cases += 1;
        if exact != brute {
            mismatches.push(format!("{params} t={t} n={n} r={radius}: {exact} vs {brute}"));
        }
    }
    let mut lines = vec![CheckLine {
        name: "exact census vs brute force".into(),
        passed: mismatches.is_empty(),
        detail: summary(cases, &mismatches),
    }];
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for _ in 0..500 {
        let b = rng.gen_range(3..=6u32);
        let params = CantorParams::new(b, &random_digits(&mut rng, b))?;
        let n = rng.gen_range(1..=5u32);
        let top = (b as u64).pow(n);
        let p = rng.gen_range(0..=top);
        let radius = Rational::new(rng.gen_range(1..1000), 2000 * top as i64);
        let form = classify(&params, &BigInt::from(p), n, &radius)?;
        let meets = distance(&params, &Rational::new(p, top))? < radius;
        cases += 1;
        if form.is_empty() == meets {
            mismatches.push(format!("{params} n={n} p={p} r={radius}"));
        }
    }
    lines.push(CheckLine {
        name: "classifier vs exact distance".into(),
        passed: mismatches.is_empty(),
        detail: summary(cases, &mismatches),
    });
    Ok(lines)
}

fn summary(cases: usize, mismatches: &[String]) -> String {
    let mut out = format!("{cases} cases, {} mismatches", mismatches.len());
    if !mismatches.is_empty() {
        out.push_str(": ");
        out.push_str(&mismatches.join("; "));
    }
    out
}

pub fn check_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let lines = match need(&cfg.target, "check target")? {
        "example31" => example31(cfg)?,
        "oracles" => oracles(cfg)?,
        other => return Err(CliError::Usage(format!("unknown check `{other}` (example31 | oracles)"))),
    };
    let mut h = String::new();
    for l in &lines {
        writeln!(h, "{}  {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail).unwrap();
    }
    let rows = lines
        .iter()
        .map(|l| vec![l.name.clone(), l.passed.to_string(), l.detail.clone()])
        .collect();
    let failed = lines.iter().any(|l| !l.passed);
    let mut report = Report::new(&lines, h).table(&["check", "passed", "detail"], rows);
    report.exit = i32::from(failed);
    Ok(report)
}

/// Census rows in the requested row format.
pub fn census_rows(rows: &[CensusRow], format: &str, out: &mut Vec<u8>) -> Result<(), CliError> {
    match format {
        "jsonl" => output::write_jsonl(rows, out)?,
        "plot" => output::write_plot_data(rows, out)?,
        _ => output::write_csv(rows, out)?,
    }
    Ok(())
}
