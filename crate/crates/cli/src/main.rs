//! `dcond`: decide and certify conditions on hypersurface germs.

mod commands;
mod corpus;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcond_core::verdict::Decision;
use dcond_core::weyl::Bounds;

use commands::Budget;
use input::{parse_germ, Germ};
use report::{InputEcho, LimitsEcho, Report};

#[derive(Parser)]
#[command(name = "dcond", version, about = "Exact checks of annihilator and Bernstein-Sato conditions for hypersurface germs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Clone, Debug)]
struct Engine {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Reduction step budget per check.
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    /// Soft time limit per check, in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

#[derive(Args, Clone, Debug)]
struct InputArgs {
    /// Comma separated variables; inferred from the input when omitted.
    #[arg(long)]
    vars: Option<String>,
    /// The germ h as one expression.
    #[arg(long)]
    poly: Option<String>,
    /// One factor of h; repeat to keep a factorization.
    #[arg(long = "factor")]
    factors: Vec<String>,
    /// Weights a1,a2,... making h weighted homogeneous.
    #[arg(long)]
    weights: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a list of conditions.
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Comma separated: H,B,W,L,FREE,KOSZUL,A_INV,A_H,G,M,A_LOG.
        #[arg(long, default_value = "H,B,A_INV")]
        conditions: String,
        #[command(flatten)]
        engine: Engine,
    },
    /// Search a functional equation b(s) h^s = P h^(s+1).
    Bfun {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 3)]
        max_order: u32,
        /// Degree bound for the polynomial coefficients of P.
        #[arg(long, default_value_t = 2)]
        max_coeff_deg: u32,
        /// Degree bound for b; defaults to the order bound.
        #[arg(long)]
        max_b_deg: Option<u32>,
        #[command(flatten)]
        engine: Engine,
    },
    /// Genericity, annihilating operators and A(1/h) for factored input.
    Arrangement {
        #[command(flatten)]
        input: InputArgs,
        /// 1-based index of the factor raised to the power s.
        #[arg(long, default_value_t = 1)]
        distinguished: usize,
        #[command(flatten)]
        engine: Engine,
    },
    /// Check annihilation certificates.
    VerifyAnn {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        distinguished: usize,
        #[command(flatten)]
        engine: Engine,
    },
    /// Conormal ideal and condition W.
    Conormal {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: Engine,
    },
    /// Run every fixture in a directory.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        engine: Engine,
    },
}

fn budget(e: &Engine) -> Budget {
    Budget {
        max_steps: e.max_steps,
        timeout_secs: e.timeout,
    }
}

fn load(input: &InputArgs) -> dcond_core::Result<Germ> {
    parse_germ(input.vars.as_deref(), input.poly.as_deref(), &input.factors)
}

fn report_for(name: &str, input: &InputArgs, germ: &Germ, engine: &Engine) -> Report {
    Report::new(
        InputEcho {
            command: name.into(),
            vars: germ.vars.clone(),
            poly: input.poly.clone(),
            factors: input.factors.clone(),
            weights: input.weights.clone(),
        },
        LimitsEcho {
            max_steps: engine.max_steps,
            timeout_secs: engine.timeout,
            hit: Vec::new(),
        },
    )
}

fn emit(report: &Report, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    if report.all_decided() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run_with(
    name: &str,
    input: &InputArgs,
    engine: &Engine,
    f: impl FnOnce(&Germ) -> dcond_core::Result<Vec<(String, Decision)>>,
) -> dcond_core::Result<ExitCode> {
    let germ = load(input)?;
    let mut report = report_for(name, input, &germ, engine);
    for (k, d) in f(&germ)? {
        report.insert(&k, &d);
    }
    Ok(emit(&report, engine.format))
}

fn run(cli: Cli) -> dcond_core::Result<ExitCode> {
    match cli.command {
        Command::Check {
            input,
            conditions,
            engine,
        } => {
            let checks = commands::parse_checks(&conditions)?;
            run_with("check", &input, &engine, |g| {
                if let Some(w) = &input.weights {
                    input::parse_weights(w, &g.h)?;
                }
                Ok(commands::check(g, &checks, budget(&engine))?
                    .into_iter()
                    .map(|(c, d)| (c.label().to_string(), d))
                    .collect())
            })
        }
        Command::Bfun {
            input,
            max_order,
            max_coeff_deg,
            max_b_deg,
            engine,
        } => run_with("bfun", &input, &engine, |g| {
            let bounds = Bounds::new(max_order, max_coeff_deg, max_b_deg.unwrap_or(max_order));
            let d = commands::bfun(g, bounds, input.weights.as_deref(), budget(&engine))?;
            Ok(vec![("B".into(), d)])
        }),
        Command::Arrangement {
            input,
            distinguished,
            engine,
        } => run_with("arrangement", &input, &engine, |g| {
            commands::arrangement(g, distinguished, input.weights.as_deref(), budget(&engine))
        }),
        Command::VerifyAnn {
            input,
            distinguished,
            engine,
        } => run_with("verify-ann", &input, &engine, |g| {
            commands::verify_ann(g, distinguished, budget(&engine))
        }),
        Command::Conormal { input, engine } => {
            run_with("conormal", &input, &engine, |g| commands::conormal(g, budget(&engine)))
        }
        Command::Corpus { dir, engine } => {
            let report = corpus::run(&dir, budget(&engine))?;
            match engine.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(if report.failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
