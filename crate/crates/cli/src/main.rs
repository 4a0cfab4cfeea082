//! `ncgenus`: exact moments, expansion checks and Monte Carlo from the
//! command line.

mod job;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use job::{Command, JobSpec, RandomCorpus};

#[derive(Parser)]
#[command(name = "ncgenus", version, about = "Genus expansion of mixed GUE / semicircular trace moments")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Run every engine on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    /// Corrupt the genus count of the pairing engine (mutation testing).
    #[arg(long, global = true, hide = true)]
    inject_genus_fault: bool,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone, Default)]
struct Corpus {
    /// A word, e.g. "g1 [1,2;0,1] s1 g1 s1"; repeatable.
    #[arg(long = "word", short = 'w')]
    words: Vec<String>,

    /// Number of seeded random monomials to add.
    #[arg(long, value_name = "K")]
    random: Option<usize>,

    /// Maximal degree of the random monomials.
    #[arg(long, value_name = "D", default_value_t = 8)]
    degree: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact E tr as a polynomial in ν = 1/N².
    Moments {
        #[command(flatten)]
        corpus: Corpus,
        /// Also evaluate at this N; repeatable.
        #[arg(long = "dim", value_name = "N")]
        dims: Vec<usize>,
    },
    /// Check E tr f = tr f + ν E tr T^cross f, or the order-m expansion.
    Verify {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long, value_name = "M")]
        order: Option<u32>,
    },
    /// Coefficients of the expansion up to order m and the exact remainder.
    Expand {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long, value_name = "M", default_value_t = 1)]
        order: u32,
    },
    /// Interpolation polynomial η(t) and its derivative, with both checks.
    Eta {
        #[command(flatten)]
        corpus: Corpus,
    },
    /// GUE Monte Carlo estimate against the exact value.
    Mc {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long = "dim", value_name = "N", default_value = "32")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Largest accepted |z|.
        #[arg(long, default_value_t = 4.0)]
        tolerance: f64,
    },
    /// Run every invariant suite at desk scale.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a JSON job file (see docs/schema.md).
    Run { job: PathBuf },
}

fn corpus_parts(c: Corpus) -> (Vec<String>, Option<RandomCorpus>, u64) {
    let random = c.random.map(|count| RandomCorpus { count, degree: c.degree });
    (c.words, random, c.seed)
}

fn to_job(sub: Sub) -> Result<JobSpec, String> {
    let job = match sub {
        Sub::Moments { corpus, dims } => {
            let (words, random, seed) = corpus_parts(corpus);
            JobSpec { command: Command::Moments, words, random, seed, dims, ..JobSpec::default() }
        }
        Sub::Verify { corpus, order } => {
            let (words, random, seed) = corpus_parts(corpus);
            JobSpec { command: Command::Verify, words, random, seed, order, ..JobSpec::default() }
        }
        Sub::Expand { corpus, order } => {
            let (words, random, seed) = corpus_parts(corpus);
            JobSpec { command: Command::Expand, words, random, seed, order: Some(order), ..JobSpec::default() }
        }
        Sub::Eta { corpus } => {
            let (words, random, seed) = corpus_parts(corpus);
            JobSpec { command: Command::Eta, words, random, seed, ..JobSpec::default() }
        }
        Sub::Mc { corpus, dims, samples, tolerance } => {
            let (words, random, seed) = corpus_parts(corpus);
            JobSpec {
                command: Command::Mc,
                words,
                random,
                seed,
                dims,
                samples: Some(samples),
                tolerance: Some(tolerance),
                ..JobSpec::default()
            }
        }
        Sub::Selftest { seed } => JobSpec { command: Command::Selftest, seed, ..JobSpec::default() },
        Sub::Run { job } => {
            let text = std::fs::read_to_string(&job).map_err(|e| format!("cannot read {}: {e}", job.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid job file {}: {e}", job.display()))?
        }
    };
    job.validate()?;
    Ok(job)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.inject_genus_fault {
        ncgenus::genus::set_genus_fault(true);
    }
    let exec = if cli.sequential { ncgenus::exec::Exec::Sequential } else { ncgenus::exec::Exec::Parallel };
    let job = match to_job(cli.command) {
        Ok(j) => j,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match report::run(&job, exec) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("reports serialize"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
