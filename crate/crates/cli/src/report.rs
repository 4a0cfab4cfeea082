//! Runs a job and renders the text and JSON reports.

use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use ncgenus::exec::Exec;
use ncgenus::expansion::{self, AsymptoticExpansion, ExpansionReport, OrderDiff};
use ncgenus::genus;
use ncgenus::ncpoly::{parse_word, Flavor, NCPoly};
use ncgenus::rmt::{self, MCEstimate};
use ncgenus::scalars::{MomentPoly, ParamPair, ParamSymbol, Rational};
use ncgenus::selftest;
use ncgenus::{corpus, Error, Result};

use crate::job::{Command, JobSpec, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub pass: bool,
}

struct Entry {
    label: String,
    poly: NCPoly,
}

fn entries(job: &JobSpec) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for w in &job.words {
        out.push(Entry { label: w.trim().to_string(), poly: parse_word(w)? });
    }
    if let Some(r) = &job.random {
        for f in corpus::random_corpus(job.seed, r.count, r.degree) {
            out.push(Entry { label: f.to_string(), poly: f });
        }
    }
    Ok(out)
}

pub fn run(job: &JobSpec, exec: Exec) -> Result<Outcome> {
    match job.command {
        Command::Selftest => Ok(selftest(job.seed)),
        Command::Moments => moments(&entries(job)?, &job.dims, exec),
        Command::Verify => verify(&entries(job)?, job.order, exec),
        Command::Expand => expand(&entries(job)?, job.order.unwrap_or(1), exec),
        Command::Eta => eta(&entries(job)?, exec),
        Command::Mc => mc(job, &entries(job)?, exec),
    }
}

fn envelope(command: &str, pass: bool, results: Vec<Value>) -> Value {
    json!({ "command": command, "pass": pass, "results": results })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn complex(re: f64, im: f64) -> Value {
    json!({ "re": re, "im": im })
}

fn moments(entries: &[Entry], dims: &[usize], exec: Exec) -> Result<Outcome> {
    let exact: Vec<MomentPoly> = exec.map(entries, |e| genus::expected_trace_poly_with(&e.poly, Exec::Sequential)).into_iter().collect::<Result<_>>()?;
    let mut text = String::new();
    let mut results = Vec::new();
    for (e, m) in entries.iter().zip(&exact) {
        writeln!(text, "E tr({}) = {m}", e.label).unwrap();
        let mut values = Vec::new();
        for &n in dims {
            let v = m.eval_f64(1.0 / (n * n) as f64);
            match v {
                Some((re, 0.0)) => writeln!(text, "  at N = {n}: {re}").unwrap(),
                Some((re, im)) => writeln!(text, "  at N = {n}: {re} + {im}i").unwrap(),
                None => writeln!(text, "  at N = {n}: not numeric (formal letters)").unwrap(),
            }
            values.push(json!({ "dim": n, "value": v.map(|(re, im)| complex(re, im)) }));
        }
        results.push(json!({ "word": e.label, "moment": to_value(m), "display": m.to_string(), "values": values }));
    }
    Ok(Outcome { json: envelope("moments", true, results), text, pass: true })
}

fn mismatch_line(d: &OrderDiff) -> String {
    format!("first mismatch at ν^{}: lhs {}, rhs {}", d.order, d.lhs, d.rhs)
}

fn coeff_list(e: &AsymptoticExpansion) -> String {
    e.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn verify(entries: &[Entry], order: Option<u32>, exec: Exec) -> Result<Outcome> {
    let runs = exec.map(entries, |e| -> Result<(ExpansionReport, Option<AsymptoticExpansion>)> {
        let report = expansion::verify_first_order_with(&e.poly, Exec::Sequential)?;
        let exp = order.map(|m| expansion::expand_asymptotic_with(&e.poly, m, Exec::Sequential)).transpose()?;
        Ok((report, exp))
    });
    let mut text = String::new();
    let mut results = Vec::new();
    let mut passed = 0;
    for (e, run) in entries.iter().zip(runs) {
        let (report, exp) = run?;
        let exp_pass = exp.as_ref().map(|x| x.total() == report.lhs);
        let pass = report.pass && exp_pass != Some(false);
        passed += usize::from(pass);
        let mark = if pass { "PASS" } else { "FAIL" };
        match (&exp, report.first_mismatch()) {
            (_, Some(d)) => writeln!(text, "{mark} {}: {}", e.label, mismatch_line(d)).unwrap(),
            (Some(x), None) => writeln!(
                text,
                "{mark} {}: E tr = {}; coefficients {}; remainder {}",
                e.label,
                report.lhs,
                coeff_list(x),
                x.remainder
            )
            .unwrap(),
            (None, None) => writeln!(text, "{mark} {}: E tr = {} = tr + ν·E tr T", e.label, report.lhs).unwrap(),
        }
        if exp_pass == Some(false) {
            let x = exp.as_ref().expect("expansion present");
            writeln!(text, "  expansion total {} differs from E tr {}", x.total(), report.lhs).unwrap();
        }
        results.push(json!({
            "word": e.label,
            "pass": pass,
            "lhs": to_value(&report.lhs),
            "rhs": to_value(&report.rhs),
            "first_mismatch": report.first_mismatch().map(to_value),
            "expansion": exp.as_ref().map(|x| json!({
                "order": order,
                "coeffs": to_value(&x.coeffs),
                "remainder": to_value(&x.remainder),
                "matches": exp_pass,
            })),
        }));
    }
    writeln!(text, "verified {passed}/{} words", entries.len()).unwrap();
    let pass = passed == entries.len();
    Ok(Outcome { json: envelope("verify", pass, results), text, pass })
}

fn expand(entries: &[Entry], order: u32, exec: Exec) -> Result<Outcome> {
    let runs = exec.map(entries, |e| -> Result<(AsymptoticExpansion, MomentPoly)> {
        Ok((
            expansion::expand_asymptotic_with(&e.poly, order, Exec::Sequential)?,
            genus::expected_trace_poly_with(&e.poly, Exec::Sequential)?,
        ))
    });
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all = true;
    for (e, run) in entries.iter().zip(runs) {
        let (x, exact) = run?;
        let pass = x.total() == exact;
        all &= pass;
        writeln!(text, "{}", e.label).unwrap();
        for (k, c) in x.coeffs.iter().enumerate() {
            writeln!(text, "  c{k} = {c}").unwrap();
        }
        writeln!(text, "  remainder = {}", x.remainder).unwrap();
        if !pass {
            writeln!(text, "  MISMATCH: total {} differs from E tr {exact}", x.total()).unwrap();
        }
        results.push(json!({
            "word": e.label,
            "pass": pass,
            "order": order,
            "coeffs": to_value(&x.coeffs),
            "remainder": to_value(&x.remainder),
            "exact": to_value(&exact),
        }));
    }
    Ok(Outcome { json: envelope("expand", all, results), text, pass: all })
}

struct EtaRun {
    eta: MomentPoly,
    derivative: MomentPoly,
    checks: [(&'static str, bool); 4],
}

fn eta_run(f: &NCPoly) -> Result<EtaRun> {
    let eta = expansion::eta_poly(f)?;
    let derivative = expansion::eta_derivative(f)?;
    let at_one = eta.substitute(ParamSymbol::t(0), &Rational::from_integer(1.into()))?;
    let checks = [
        ("substitution", eta == expansion::eta_by_substitution(f)?),
        ("derivative", derivative == expansion::expand_in_t(&eta.derivative(ParamPair::T(0))?)?),
        ("crossings", derivative == expansion::eta_derivative_by_crossings(f)?),
        ("endpoint", at_one == genus::expected_trace_poly(f)?),
    ];
    Ok(EtaRun { eta, derivative, checks })
}

fn eta(entries: &[Entry], exec: Exec) -> Result<Outcome> {
    let runs = exec.map(entries, |e| eta_run(&e.poly));
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all = true;
    for (e, run) in entries.iter().zip(runs) {
        let r = run?;
        let pass = r.checks.iter().all(|c| c.1);
        all &= pass;
        writeln!(text, "{}", e.label).unwrap();
        writeln!(text, "  η(t)  = {}", r.eta).unwrap();
        writeln!(text, "  η′(t) = {}", r.derivative).unwrap();
        let marks: Vec<String> = r.checks.iter().map(|(n, ok)| format!("{n} {}", if *ok { "ok" } else { "FAILED" })).collect();
        writeln!(text, "  checks: {}", marks.join(", ")).unwrap();
        let checks: serde_json::Map<String, Value> = r.checks.iter().map(|(n, ok)| (n.to_string(), Value::Bool(*ok))).collect();
        results.push(json!({
            "word": e.label,
            "pass": pass,
            "eta": to_value(&r.eta),
            "eta_derivative": to_value(&r.derivative),
            "checks": checks,
        }));
    }
    Ok(Outcome { json: envelope("eta", all, results), text, pass: all })
}

fn exact_value(m: &MomentPoly, n: usize, label: &str) -> Result<f64> {
    m.eval_f64(1.0 / (n * n) as f64)
        .map(|v| v.0)
        .ok_or_else(|| Error::Numeric(format!("{label} has formal matrix letters and no numeric value")))
}

fn within(est: &MCEstimate, exact: f64, tol: f64) -> (f64, bool) {
    if est.stderr > 0.0 {
        let z = est.z_score(exact);
        (z, z.abs() < tol)
    } else {
        (0.0, (est.mean.re - exact).abs() <= 1e-9 * exact.abs().max(1.0))
    }
}

fn mc(job: &JobSpec, entries: &[Entry], exec: Exec) -> Result<Outcome> {
    let samples = job.samples.unwrap_or(DEFAULT_SAMPLES);
    let tol = job.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let polys: Vec<NCPoly> = entries.iter().map(|e| e.poly.clone()).collect();
    for (e, f) in entries.iter().zip(&polys) {
        if f.symbols().iter().any(|s| s.flavor() == Flavor::Semi) {
            return Err(Error::Numeric(format!(
                "{} contains a semicircular letter; mc samples GUE matrices only, and a free semicircular has no finite-dimensional matrix model",
                e.label
            )));
        }
    }
    let exact: Vec<MomentPoly> = polys.iter().map(genus::expected_trace_poly).collect::<Result<_>>()?;
    for (e, m) in entries.iter().zip(&exact) {
        exact_value(m, 1, &e.label)?;
    }
    let mut text = String::new();
    let mut results = Vec::new();
    let mut all = true;
    for &n in &job.dims {
        let est = rmt::mc_batch_with(&polys, n, samples, job.seed, exec)?;
        for ((e, m), est) in entries.iter().zip(&exact).zip(est) {
            let x = exact_value(m, n, &e.label)?;
            let (z, pass) = within(&est, x, tol);
            all &= pass;
            writeln!(
                text,
                "{} E tr({}) at N = {n}: {:.6} ± {:.6} over {samples} samples (seed {}); exact {m} = {x:.6}; z = {z:.2}",
                if pass { "PASS" } else { "FAIL" },
                e.label,
                est.mean.re,
                est.stderr,
                job.seed
            )
            .unwrap();
            results.push(json!({
                "word": e.label,
                "dim": n,
                "pass": pass,
                "estimate": to_value(&est),
                "exact": to_value(m),
                "exact_value": x,
                "z": z,
                "tolerance": tol,
            }));
        }
    }
    Ok(Outcome { json: envelope("mc", all, results), text, pass: all })
}

fn selftest(seed: u64) -> Outcome {
    let report = selftest::run_selftest(seed);
    let mut text = String::new();
    for s in &report.suites {
        writeln!(text, "{:<22} {:>6} checks {:>4} failures ({:.2} s)", s.name, s.checks, s.failures, s.seconds).unwrap();
        if let Some(m) = &s.first_failure {
            writeln!(text, "  first failure: {m}").unwrap();
        }
    }
    writeln!(text, "selftest {}", if report.pass { "passed" } else { "FAILED" }).unwrap();
    let mut json = to_value(&report);
    json["command"] = Value::String("selftest".into());
    Outcome { json, text, pass: report.pass }
}

