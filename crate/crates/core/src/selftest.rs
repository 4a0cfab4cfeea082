//! Desk-scale run of every invariant suite, used by `ncgenus selftest`.

use std::time::Instant;

use serde::Serialize;

use crate::corpus;
use crate::error::Result;
use crate::expansion::{self, CrossVariant};
use crate::genus::{self, expected_trace_genus, expected_trace_ibp};
use crate::lemmas;
use crate::ncpoly::{parse_word, NCPoly};
use crate::rmt;
use crate::scalars::{MomentPoly, ParamPair, ParamSymbol, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

struct Suite {
    result: SuiteResult,
    start: Instant,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite {
            result: SuiteResult { name: name.into(), checks: 0, failures: 0, first_failure: None, seconds: 0.0 },
            start: Instant::now(),
        }
    }

    fn check(&mut self, what: impl std::fmt::Display, outcome: Result<bool>) {
        self.result.checks += 1;
        let msg = match outcome {
            Ok(true) => return,
            Ok(false) => format!("{what}"),
            Err(e) => format!("{what}: {e}"),
        };
        self.result.failures += 1;
        self.result.first_failure.get_or_insert(msg);
    }

    fn finish(mut self) -> SuiteResult {
        self.result.seconds = self.start.elapsed().as_secs_f64();
        self.result
    }
}

fn power(k: usize) -> NCPoly {
    parse_word(&format!("g0^{k}")).expect("valid word")
}

fn catalan(k: u64) -> i64 {
    let mut c: i64 = 1;
    for j in 0..k as i64 {
        c = c * 2 * (2 * j + 1) / (j + 2);
    }
    c
}

fn moments(s: &mut Suite) {
    let ladder: [&[i64]; 5] = [&[1], &[2, 1], &[5, 10], &[14, 70, 21], &[42, 420, 483]];
    for (k, coeffs) in ladder.iter().enumerate() {
        let f = power(2 * k + 2);
        s.check(format!("E tr x^{}", 2 * k + 2), genus::expected_trace_poly(&f).map(|p| p == MomentPoly::from_ints(coeffs)));
    }
    for k in 1..=6 {
        let f = power(2 * k);
        s.check(format!("tr s^{}", 2 * k), genus::semicircular_trace(&f).map(|c| c == Scalar::from_int(catalan(k as u64))));
    }
}

fn oracles(s: &mut Suite, seed: u64) -> Result<()> {
    let mut rng = corpus::rng(seed);
    for n in 1..=5 {
        for sys in corpus::exhaustive_systems(n, &mut rng)? {
            let same = expected_trace_genus(&sys).and_then(|a| expected_trace_ibp(&sys).map(|b| a == b));
            s.check(format!("engines on {} with labels {:?}", sys.sigma, sys.labels.0.values().map(|l| l.to_string()).collect::<Vec<_>>()), same);
        }
    }
    for k in 0..120 {
        let sys = corpus::random_system(if k % 4 == 0 { 8 } else { 6 }, &mut rng)?;
        let same = expected_trace_genus(&sys).and_then(|a| expected_trace_ibp(&sys).map(|b| a == b));
        s.check(format!("engines on random system {}", sys.sigma), same);
    }
    Ok(())
}

fn first_order(s: &mut Suite, seed: u64) {
    for d in 1..=8 {
        s.check(format!("first-order formula on x^{d}"), expansion::verify_first_order(&power(d)).map(|r| r.pass));
    }
    for f in corpus::random_corpus(seed, 40, 8) {
        s.check(format!("first-order formula on {f}"), expansion::verify_first_order(&f).map(|r| r.pass));
    }
}

fn iterated(s: &mut Suite, seed: u64) {
    let e = expansion::expand_asymptotic(&power(8), 2);
    s.check(
        "iterated expansion of x^8",
        e.map(|e| e.coeffs == [14, 70, 21].map(Scalar::from_int) && e.remainder.is_zero()),
    );
    for f in corpus::random_corpus(seed ^ 0x51, 4, 8) {
        let total = expansion::expand_asymptotic(&f, 1).and_then(|e| genus::expected_trace_poly(&f).map(|p| p == e.total()));
        s.check(format!("iterated expansion of {f}"), total);
    }
}

fn interpolation(s: &mut Suite, seed: u64) {
    for f in corpus::random_corpus(seed ^ 0xe7a, 20, 8) {
        let ok = (|| {
            let eta = expansion::eta_poly(&f)?;
            let d = expansion::eta_derivative(&f)?;
            let one = eta.substitute(ParamSymbol::t(0), &Rational::from_integer(1.into()))?;
            Ok(eta == expansion::eta_by_substitution(&f)?
                && d == expansion::expand_in_t(&eta.derivative(ParamPair::T(0))?)?
                && d == expansion::eta_derivative_by_crossings(&f)?
                && one == genus::expected_trace_poly(&f)?)
        })();
        s.check(format!("interpolation identities on {f}"), ok);
        for v in [CrossVariant::VV, CrossVariant::VW] {
            let same = expansion::dcross(&f, v).and_then(|a| expansion::crossing_sum(&f, v).map(|b| a == b));
            s.check(format!("crossing-term grouping ({v:?}) on {f}"), same);
        }
    }
}

fn surgery(s: &mut Suite, seed: u64) -> Result<()> {
    let mut rng = corpus::rng(seed ^ 0x5a);
    let t = lemmas::random_lemma_suite(&mut rng, 2000, 10)?;
    s.result.checks += t.checks;
    s.result.failures += t.failures;
    if let Some(m) = t.first_failure {
        s.result.first_failure.get_or_insert(m);
    }
    Ok(())
}

fn monte_carlo(s: &mut Suite, seed: u64) {
    let (n, samples) = (8, 20_000);
    let words = [power(2), power(4), parse_word("g0 g1 g0 g1").expect("valid word")];
    match rmt::mc_batch(&words, n, samples, seed) {
        Ok(est) => {
            for (f, e) in words.iter().zip(est) {
                let z = genus::expected_trace_poly(f).map(|p| {
                    let exact = p.eval_f64(1.0 / (n * n) as f64).map_or(f64::NAN, |v| v.0);
                    e.z_score(exact).abs() < 4.0
                });
                s.check(format!("Monte Carlo of {f} at N = {n}"), z);
            }
        }
        Err(e) => s.check("Monte Carlo batch", Err(e)),
    }
}

/// Runs all suites; failures are collected, never panicked on.
pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut suites = Vec::new();
    let mut run = |name: &str, body: &dyn Fn(&mut Suite) -> Result<()>| {
        let mut s = Suite::new(name);
        if let Err(e) = body(&mut s) {
            s.check("suite setup", Err(e));
        }
        suites.push(s.finish());
    };
    run("moments", &|s| {
        moments(s);
        Ok(())
    });
    run("engine equivalence", &|s| oracles(s, seed));
    run("first-order formula", &|s| {
        first_order(s, seed);
        Ok(())
    });
    run("iterated expansion", &|s| {
        iterated(s, seed);
        Ok(())
    });
    run("interpolation lemmas", &|s| {
        interpolation(s, seed);
        Ok(())
    });
    run("surgery lemmas", &|s| surgery(s, seed));
    run("monte carlo", &|s| {
        monte_carlo(s, seed);
        Ok(())
    });
    let pass = suites.iter().all(|s| s.failures == 0);
    SelftestReport { seed, suites, pass }
}
