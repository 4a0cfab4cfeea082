//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Reference values come from brute-force oracles defined here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ncgenus::corpus;
use ncgenus::exec::Exec;
use ncgenus::expansion::{self, CrossVariant};
use ncgenus::genus::{expected_trace_genus, expected_trace_ibp, expected_trace_poly, semicircular_trace};
use ncgenus::lemmas::random_lemma_suite;
use ncgenus::ncpoly::{parse_word, NCPoly};
use ncgenus::rmt;
use ncgenus::scalars::{MomentPoly, ParamPair, Scalar};

const SEED: u64 = 20_241_017;
const Z_TOL: f64 = 4.0;
const MC_SAMPLES: usize = 100_000;

fn power(d: usize) -> NCPoly {
    parse_word(&format!("g0^{d}")).unwrap()
}

/// Genus distribution of all pairings of the `2k`-gon, from
/// `#Cyc(γπ) = k + 1 − 2g` with `γ = (0 1 … 2k−1)`.
fn ladder_oracle(k: usize) -> Vec<i64> {
    fn pairings(free: &mut [usize], pi: &mut [usize], out: &mut dyn FnMut(&[usize])) {
        let Some(&a) = free.first() else {
            out(pi);
            return;
        };
        for j in 1..free.len() {
            let b = free[j];
            let mut rest: Vec<usize> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            pi[a] = b;
            pi[b] = a;
            pairings(&mut rest, pi, out);
        }
    }
    let n = 2 * k;
    let mut counts = vec![0i64; k / 2 + 1];
    let mut pi = vec![0; n];
    pairings(&mut (0..n).collect::<Vec<_>>(), &mut pi, &mut |pi| {
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for s in 0..n {
            if !seen[s] {
                cycles += 1;
                let mut i = s;
                while !seen[i] {
                    seen[i] = true;
                    i = pi[(i + 1) % n];
                }
            }
        }
        counts[(k + 1 - cycles) / 2] += 1;
    });
    while counts.len() > 1 && counts.last() == Some(&0) {
        counts.pop();
    }
    counts
}

/// Pairings of the `2k`-gon with no crossing, counted by brute force.
fn noncrossing_count(k: usize) -> i64 {
    ladder_oracle(k)[0]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    println!(
        "[{}] criterion {id} {name}: {} ({:.2} s, limit {} s{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", over time" }
    );
    pass
}

fn moment_ladder() -> Outcome {
    let mut bad = Vec::new();
    for k in 1..=5 {
        let oracle = MomentPoly::from_ints(&ladder_oracle(k));
        let got = expected_trace_poly(&power(2 * k)).unwrap();
        if got != oracle {
            bad.push(format!("x^{}: {got} vs oracle {oracle}", 2 * k));
        }
    }
    let printed = [&[1][..], &[2, 1], &[5, 10], &[14, 70, 21], &[42, 420, 483]];
    for (k, want) in printed.iter().enumerate() {
        if ladder_oracle(k + 1) != *want {
            bad.push(format!("oracle for x^{} disagrees with {want:?}", 2 * k + 2));
        }
    }
    Outcome { pass: bad.is_empty(), detail: if bad.is_empty() { "x^2..x^10 match the pairing oracle".into() } else { bad.join("; ") } }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = corpus::rng(SEED);
    let (mut n_sys, mut bad) = (0usize, Vec::new());
    let mut run = |sys: &ncgenus::genus::TracedWordSystem| {
        n_sys += 1;
        let a = expected_trace_genus(sys);
        let b = expected_trace_ibp(sys);
        if a.is_err() || a != b {
            bad.push(format!("{}: {a:?} vs {b:?}", sys.sigma));
        }
    };
    for n in 1..=6 {
        for sys in corpus::exhaustive_systems(n, &mut rng).unwrap() {
            run(&sys);
        }
    }
    for _ in 0..200 {
        run(&corpus::random_system(8, &mut rng).unwrap());
    }
    Outcome {
        pass: bad.is_empty(),
        detail: match bad.first() {
            None => format!("{n_sys} systems agree"),
            Some(b) => format!("{} of {n_sys} disagree, first {b}", bad.len()),
        },
    }
}

fn first_order() -> Outcome {
    let mut words: Vec<NCPoly> = (1..=8).map(power).collect();
    words.extend(corpus::random_corpus(SEED, 50, 8));
    let mut bad = Vec::new();
    let mut nonzero = 0;
    for f in &words {
        match expansion::verify_first_order(f) {
            Ok(r) if r.pass => nonzero += usize::from(!r.lhs.is_zero()),
            Ok(r) => bad.push(format!("{f}: {:?}", r.first_mismatch())),
            Err(e) => bad.push(format!("{f}: {e}")),
        }
    }
    let anchor = expansion::verify_first_order(&power(4)).unwrap();
    let t = expansion::tcross_expected_trace(&power(4)).unwrap();
    let anchor_ok = anchor.lhs == MomentPoly::from_ints(&[2, 1]) && t == MomentPoly::from_ints(&[1]);
    if !anchor_ok {
        bad.push(format!("x^4 anchor: lhs {}, E tr T {t}", anchor.lhs));
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} words pass exactly ({nonzero} with nonzero moment), x^4 anchor 2 + ν", words.len())
        } else {
            bad.join("; ")
        },
    }
}

fn iterated() -> Outcome {
    let e = expansion::expand_asymptotic(&power(8), 2).unwrap();
    let want: Vec<Scalar> = ladder_oracle(4).into_iter().map(Scalar::from_int).collect();
    let pass = e.coeffs == want && e.remainder.is_zero();
    let shown: Vec<String> = e.coeffs.iter().map(|c| c.to_string()).collect();
    Outcome { pass, detail: format!("coefficients [{}], remainder {}", shown.join(", "), e.remainder) }
}

fn lemma_suite() -> Outcome {
    let mut words: Vec<NCPoly> = (2..=8).step_by(2).map(power).collect();
    words.extend(corpus::random_corpus(SEED ^ 5, 30, 8));
    let mut bad = Vec::new();
    for f in &words {
        let eta = expansion::eta_poly(f).unwrap();
        let d = expansion::eta_derivative(f).unwrap();
        if d != expansion::expand_in_t(&eta.derivative(ParamPair::T(0)).unwrap()).unwrap() {
            bad.push(format!("η′ on {f}"));
        }
        for v in [CrossVariant::VV, CrossVariant::VW] {
            if expansion::dcross(f, v).unwrap() != expansion::crossing_sum(f, v).unwrap() {
                bad.push(format!("grouping {v:?} on {f}"));
            }
        }
    }
    let mut rng = corpus::rng(SEED ^ 9);
    let instances = 10_000;
    let t = random_lemma_suite(&mut rng, instances, 12).unwrap();
    if let Some(m) = &t.first_failure {
        bad.push(m.clone());
    }
    Outcome {
        pass: bad.is_empty() && t.failures == 0,
        detail: format!(
            "η and grouping on {} words, {} surgery checks over {instances} instances, {} failures",
            words.len(),
            t.checks,
            bad.len() + t.failures
        ),
    }
}

fn monte_carlo() -> Outcome {
    let words = [power(2), power(4), power(6), parse_word("g0 g1 g0 g1").unwrap()];
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [16, 64] {
        let est = rmt::mc_batch(&words, n, MC_SAMPLES, SEED).unwrap();
        for (f, e) in words.iter().zip(&est) {
            let exact = expected_trace_poly(f).unwrap().eval_f64(1.0 / (n * n) as f64).unwrap().0;
            let z = e.z_score(exact);
            pass &= z.abs() < Z_TOL;
            lines.push(format!("N={n} {f} z={z:.2}"));
        }
    }
    let small = |exec| rmt::mc_batch_with(&words, 8, 500, SEED, exec).unwrap();
    let repeat = small(Exec::Parallel);
    let reproducible = repeat == small(Exec::Parallel) && repeat == small(Exec::Sequential);
    pass &= reproducible;
    Outcome { pass, detail: format!("|z| < {Z_TOL}: {}; reproducible: {reproducible}", lines.join(", ")) }
}

fn catalan() -> Outcome {
    let mut bad = Vec::new();
    let mut got = Vec::new();
    for k in 1..=6 {
        let f = parse_word(&format!("s0^{}", 2 * k)).unwrap();
        let c = semicircular_trace(&f).unwrap();
        let want = Scalar::from_int(noncrossing_count(k));
        let free = expected_trace_poly(&f).unwrap() == MomentPoly::constant(want.clone());
        if c != want || !free {
            bad.push(format!("s^{}: {c}", 2 * k));
        }
        got.push(c.to_string());
    }
    Outcome { pass: bad.is_empty(), detail: format!("[{}], ν-free", got.join(", ")) }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        check(1, "moment ladder", secs(1), moment_ladder),
        check(2, "engine equivalence", secs(30), oracle_equivalence),
        check(3, "first-order formula", secs(60), first_order),
        check(4, "iterated expansion", secs(10), iterated),
        check(5, "interpolation and surgery lemmas", secs(60), lemma_suite),
        check(6, "Monte Carlo consistency", secs(120), monte_carlo),
        check(7, "Catalan moments", secs(1), catalan),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
