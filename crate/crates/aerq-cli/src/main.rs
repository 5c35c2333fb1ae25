//! Command-line surface: fitting, rank scores, AERQ reports, identity
//! verification over generated corpora, and synthetic data generation.
//!
//! Exit codes: 0 success / all verdicts pass, 1 verification failure,
//! 2 input error, 3 internal numerical error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use aerq::averaged::verify_identities;
use aerq::data::QuantileFit;
use aerq::io::{load_csv, write_csv};
use aerq::rankscores::solve_rank_scores;
use aerq::rq::{fit_extreme_rq, fit_rq};
use aerq::sim::{corpus_spec, simulate, GeneratorSpec};
use aerq::{AerqReport, Error, Tolerances, Verdict};

#[derive(Parser)]
#[command(
    name = "aerq",
    version,
    about = "Regression quantiles, the extreme regression quantile, and the averaged extreme regression quantile"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a regression quantile; --alpha 1 fits the extreme quantile.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compute the AERQ by every route and report the cross-route verdict.
    Aerq {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Cross-route equality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Solve the rank-score program at a level in [0, 1].
    Rankscores {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify the identities on a file or a generated corpus (JSON lines).
    Verify {
        /// Verify a single CSV file instead of generating data.
        #[arg(long, conflicts_with = "generate")]
        input: Option<PathBuf>,
        /// Number of instances to generate and verify.
        #[arg(long)]
        generate: Option<usize>,
        /// Fixed sample size (default: cycle over 8..=60).
        #[arg(long)]
        n: Option<usize>,
        /// Fixed regressor dimension (default: cycle over 1..=5).
        #[arg(long)]
        p: Option<usize>,
        /// Error law: normal, t(DF), pareto(TAIL), or mixed (default).
        #[arg(long)]
        dist: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed heteroscedasticity multiplier (default: alternate 0 and 1).
        #[arg(long)]
        hetero: Option<f64>,
        /// Fixed true coefficients, comma-separated, intercept first.
        #[arg(long)]
        beta: Option<String>,
        /// Cross-route equality tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Generate a synthetic dataset and write it as CSV.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Error law: normal, t(DF), or pareto(TAIL).
        #[arg(long, default_value = "normal")]
        dist: String,
        /// True coefficients, comma-separated, intercept first (default zeros).
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        /// Heteroscedasticity multiplier (0 = identically distributed).
        #[arg(long, default_value_t = 0.0)]
        hetero: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli.command));
}

fn run(command: Command) -> i32 {
    match dispatch(command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DimensionMismatch(_)
        | Error::NonFinite(_)
        | Error::RankDeficient { .. }
        | Error::TooFewObservations { .. }
        | Error::InvalidAlpha { .. }
        | Error::NotAPermutation(_)
        | Error::Csv { .. }
        | Error::MissingColumn(_)
        | Error::Io(_)
        | Error::InvalidGenerator(_)
        | Error::InvalidProblem(_)
        | Error::InvalidInput(_) => 2,
        Error::SingularBase
        | Error::Degenerate(_)
        | Error::IterationLimit { .. }
        | Error::Internal(_) => 3,
    }
}

fn dispatch(command: Command) -> Result<i32, Error> {
    let tolerances = Tolerances::default();
    match command {
        Command::Fit {
            input,
            alpha,
            format,
        } => {
            let data = load_csv(&input)?;
            let fit = if alpha == 1.0 {
                fit_extreme_rq(&data, &tolerances)?.fit
            } else {
                fit_rq(&data, alpha, &tolerances)?
            };
            print_fit(&fit, format);
            Ok(0)
        }
        Command::Aerq { input, format, tol } => {
            let data = load_csv(&input)?;
            let tolerances = Tolerances {
                route_equality: tol,
                ..tolerances
            };
            let report = verify_identities(&data, &tolerances)?;
            print_report(&report, format);
            Ok(if report.verdict == Verdict::Fail { 1 } else { 0 })
        }
        Command::Rankscores {
            input,
            alpha,
            format,
        } => {
            let data = load_csv(&input)?;
            let sol = solve_rank_scores(&data, alpha, &tolerances)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "alpha": sol.alpha,
                        "scores": sol.scores,
                        "dual_objective": sol.dual_objective,
                    })
                ),
                Format::Csv => {
                    println!("i,score");
                    for (i, s) in sol.scores.iter().enumerate() {
                        println!("{},{}", i + 1, s);
                    }
                }
            }
            Ok(0)
        }
        Command::Verify {
            input,
            generate,
            n,
            p,
            dist,
            seed,
            hetero,
            beta,
            tol,
        } => {
            let tolerances = Tolerances {
                route_equality: tol,
                ..tolerances
            };
            if let Some(path) = input {
                let data = load_csv(&path)?;
                let report = verify_identities(&data, &tolerances)?;
                println!("{}", report.to_json());
                let (pass, fail, skipped) = tally(std::slice::from_ref(&report));
                print_summary(pass, fail, skipped, 0);
                return Ok(if fail > 0 { 1 } else { 0 });
            }
            let count = generate.ok_or_else(|| {
                Error::InvalidInput("verify needs --input FILE or --generate N".into())
            })?;
            let specs: Result<Vec<GeneratorSpec>, Error> = (0..count)
                .map(|i| instance_spec(i, n, p, dist.as_deref(), hetero, beta.as_deref()))
                .collect();
            let specs = specs?;

            // Instances are keyed by (seed, index), so parallel evaluation
            // reproduces the sequential corpus; order is restored on collect.
            let outcomes: Vec<Result<AerqReport, Error>> = specs
                .par_iter()
                .enumerate()
                .map(|(i, spec)| {
                    let inst = simulate(spec, seed, i as u64)?;
                    verify_identities(&inst.dataset, &tolerances)
                })
                .collect();

            let mut reports = Vec::with_capacity(count);
            let mut errors = 0usize;
            for (i, outcome) in outcomes.into_iter().enumerate() {
                match outcome {
                    Ok(report) => {
                        println!("{}", report.to_json());
                        reports.push(report);
                    }
                    Err(e) => {
                        println!(
                            "{}",
                            serde_json::json!({ "instance": i + 1, "error": e.to_string() })
                        );
                        errors += 1;
                    }
                }
            }
            let (pass, fail, skipped) = tally(&reports);
            print_summary(pass, fail, skipped, errors);
            Ok(if errors > 0 {
                3
            } else if fail > 0 {
                1
            } else {
                0
            })
        }
        Command::Simulate {
            n,
            p,
            dist,
            beta,
            seed,
            output,
            hetero,
        } => {
            let beta = match beta.as_deref() {
                Some(list) => parse_beta(list)?,
                None => vec![0.0; p + 1],
            };
            let spec = GeneratorSpec {
                n,
                p,
                law: dist.parse()?,
                hetero,
                beta,
            };
            let instance = simulate(&spec, seed, 0)?;
            write_csv(&output, &instance.dataset)?;
            Ok(0)
        }
    }
}

fn instance_spec(
    i: usize,
    n: Option<usize>,
    p: Option<usize>,
    dist: Option<&str>,
    hetero: Option<f64>,
    beta: Option<&str>,
) -> Result<GeneratorSpec, Error> {
    let mut spec = corpus_spec(i);
    if let Some(p) = p {
        if p != spec.p {
            spec.p = p;
            spec.beta = (0..=p)
                .map(|j| ((i + 3 * j) % 7) as f64 * 0.5 - 1.5)
                .collect();
        }
    }
    if let Some(n) = n {
        spec.n = n;
    }
    if let Some(dist) = dist {
        if !dist.eq_ignore_ascii_case("mixed") {
            spec.law = dist.parse()?;
        }
    }
    if let Some(h) = hetero {
        spec.hetero = h;
    }
    if let Some(list) = beta {
        spec.beta = parse_beta(list)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn parse_beta(list: &str) -> Result<Vec<f64>, Error> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGenerator(format!("cannot parse beta entry '{}'", s)))
        })
        .collect()
}

fn tally(reports: &[AerqReport]) -> (usize, usize, usize) {
    let mut pass = 0;
    let mut fail = 0;
    let mut skipped = 0;
    for r in reports {
        match r.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => fail += 1,
            Verdict::SkippedDegenerate => skipped += 1,
        }
    }
    (pass, fail, skipped)
}

fn print_summary(pass: usize, fail: usize, skipped: usize, errors: usize) {
    println!(
        "{}",
        serde_json::json!({
            "summary": {
                "pass": pass,
                "fail": fail,
                "skipped": skipped,
                "errors": errors,
                "total": pass + fail + skipped + errors,
            }
        })
    );
}

fn print_fit(fit: &QuantileFit, format: Format) {
    match format {
        Format::Json => {
            let active: Vec<usize> = fit.active_set.iter().map(|i| i + 1).collect();
            println!(
                "{}",
                serde_json::json!({
                    "alpha": fit.alpha,
                    "intercept": fit.intercept,
                    "slopes": fit.slopes,
                    "objective": fit.objective,
                    "active_set": active,
                    "degenerate": fit.degenerate,
                })
            );
        }
        Format::Csv => {
            let mut header = String::from("alpha,beta0");
            for j in 1..=fit.slopes.len() {
                header.push_str(&format!(",beta{}", j));
            }
            println!("{}", header);
            let mut line = format!("{},{}", fit.alpha, fit.intercept);
            for s in &fit.slopes {
                line.push_str(&format!(",{}", s));
            }
            println!("{}", line);
        }
    }
}

fn print_report(report: &AerqReport, format: Format) {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => {
            let join_f = |v: &Option<Vec<f64>>| {
                v.as_ref()
                    .map(|v| {
                        v.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default()
            };
            println!("key,value");
            println!("b_primal,{}", report.b_primal);
            println!(
                "b_weights,{}",
                report.b_weights.map(|v| v.to_string()).unwrap_or_default()
            );
            println!("b_restimator,{}", report.b_restimator);
            println!(
                "b_scores,{}",
                report.b_scores.map(|v| v.to_string()).unwrap_or_default()
            );
            println!("weights,{}", join_f(&report.weights));
            println!(
                "base_indices,{}",
                report
                    .base_indices
                    .as_ref()
                    .map(|v| {
                        v.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default()
            );
            println!("shortfall,{}", report.shortfall);
            println!("mean_y,{}", report.mean_y);
            println!("max_y,{}", report.max_y);
            println!("verdict,{}", verdict_name(report.verdict));
            println!("notes,{}", report.notes.join("; "));
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::SkippedDegenerate => "skipped-degenerate",
    }
}
