use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use probstir::probabilistic::{prob_log, prob_order_numbers, prob_triangle};
use probstir::rational::{parse_rational, to_exact_string};
use probstir::special::{deg_log, order_numbers, triangle, NumberFamily};
use probstir::verify::{default_gammas, default_lambdas, grid_suite, mc_check, SuiteOptions};
use probstir::{Error, Family, RandomVariable, Rational, Series};

/// Exit codes.
const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const DOMAIN: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "probstir",
    version,
    about = "Exact Stirling-type numbers for degenerate, heterogeneous and probabilistic families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a triangle of numbers T(n,k), 0 <= k <= n <= nmax.
    Table(TableArgs),
    /// Print the EGF coefficients of a series.
    Series(SeriesArgs),
    /// Run the identity suites and report every check.
    Verify(VerifyArgs),
    /// Monte Carlo estimate of E[(S_j)_{n,lambda}] against the exact value.
    Mc(McArgs),
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// s1, s2, s1-deg, s2-deg, lah, hetero-s1, hetero-s2, prob-s1, prob-s2, prob-g, prob-h.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Random variable, e.g. `binomial:m=5,p=1/3`; required for prob-* families.
    #[arg(long)]
    rv: Option<String>,
    #[arg(long, value_parser = rational, default_value = "0", allow_hyphen_values = true)]
    lambda: Rational,
    #[arg(long, env = "PROBSTIR_ORDER", default_value_t = 10)]
    nmax: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    /// log_lambda^Y(1+t), the compositional inverse of E[e_lambda^Y(t)] - 1.
    ProbLog,
    Daehee,
    Cauchy,
    Bernoulli,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    kind: SeriesKind,
    /// Random variable; without it the deterministic (Y = 1) series is printed.
    #[arg(long)]
    rv: Option<String>,
    #[arg(long, value_parser = rational, default_value = "0", allow_hyphen_values = true)]
    lambda: Rational,
    /// Order of the Daehee, Cauchy or Bernoulli numbers.
    #[arg(long, value_parser = rational, default_value = "1", allow_hyphen_values = true)]
    gamma: Rational,
    /// Argument of the Bernoulli polynomials.
    #[arg(long, value_parser = rational, default_value = "0", allow_hyphen_values = true)]
    x: Rational,
    #[arg(long, env = "PROBSTIR_ORDER", default_value_t = 10)]
    order: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Random variable to check; may be repeated.
    #[arg(long)]
    rv: Vec<String>,
    /// Check every built-in distribution.
    #[arg(long)]
    all_builtin: bool,
    /// Values of lambda; may be repeated. Defaults to 0, 1, 1/2, -1/3, 2.
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    lambda: Vec<Rational>,
    /// Integer orders for the Bernoulli, Daehee and Cauchy checks; may be
    /// repeated. Defaults to -3..=4.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Vec<i64>,
    #[arg(long, env = "PROBSTIR_ORDER", default_value_t = 10)]
    nmax: usize,
    /// Truncation depth for closed forms given by infinite sums.
    #[arg(long, default_value_t = probstir::probabilistic::closed_form::DEFAULT_DEPTH)]
    depth: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    rv: String,
    #[arg(long, value_parser = rational, default_value = "0", allow_hyphen_values = true)]
    lambda: Rational,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn parse_family(text: &str) -> Result<Family, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => USAGE,
            Failure::Domain(_) | Failure::Io(_) => DOMAIN,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn parse_rv(text: &str) -> Result<RandomVariable, Failure> {
    Ok(text.parse()?)
}

fn rv_json(rv: Option<&RandomVariable>) -> (Value, Value) {
    match rv {
        None => (Value::Null, json!({})),
        Some(rv) => {
            let params: serde_json::Map<String, Value> = rv
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), Value::String(v)))
                .collect();
            (Value::String(rv.name().to_string()), Value::Object(params))
        }
    }
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string(value).expect("json values always serialize");
    s.push('\n');
    s
}

fn run_table(args: &TableArgs) -> Outcome {
    let rv = args.rv.as_deref().map(parse_rv).transpose()?;
    let table = if args.family.is_probabilistic() {
        let rv = rv
            .as_ref()
            .ok_or_else(|| Failure::Usage(format!("family {} needs --rv", args.family)))?;
        prob_triangle(rv, &args.lambda, args.family, args.nmax)?
    } else {
        if rv.is_some() {
            return Err(Failure::Usage(format!(
                "family {} does not take --rv",
                args.family
            )));
        }
        triangle(args.family, &args.lambda, args.nmax)?
    };
    let text = match args.out.format {
        Format::Csv => {
            let mut s = String::from("n,k,value\n");
            for (n, k, v) in table.entries() {
                s.push_str(&format!("{n},{k},{}\n", to_exact_string(v)));
            }
            s
        }
        Format::Json => {
            let (name, params) = rv_json(table.rv());
            let entries: Vec<Value> = table
                .entries()
                .map(|(n, k, v)| json!([n, k, to_exact_string(v)]))
                .collect();
            to_json(&json!({
                "family": args.family.tag(),
                "rv": name,
                "params": params,
                "lambda": to_exact_string(table.lambda()),
                "nmax": args.nmax,
                "entries": entries,
            }))
        }
    };
    Ok((text, OK))
}

fn series_for(args: &SeriesArgs, rv: Option<&RandomVariable>) -> Result<Series, Error> {
    let family = match args.kind {
        SeriesKind::ProbLog => {
            return match rv {
                Some(rv) => prob_log(rv, &args.lambda, args.order),
                None => deg_log(&args.lambda, args.order).truncate(args.order),
            }
        }
        SeriesKind::Daehee => NumberFamily::Daehee,
        SeriesKind::Cauchy => NumberFamily::Cauchy,
        SeriesKind::Bernoulli => NumberFamily::Bernoulli,
    };
    match rv {
        Some(rv) => prob_order_numbers(rv, &args.lambda, &args.gamma, &args.x, family, args.order),
        None => order_numbers(&args.lambda, &args.gamma, &args.x, family, args.order),
    }
}

fn run_series(args: &SeriesArgs) -> Outcome {
    let rv = args.rv.as_deref().map(parse_rv).transpose()?;
    let coeffs = series_for(args, rv.as_ref())?.egf_coeffs();
    let text = match args.out.format {
        Format::Csv => {
            let mut s = String::from("n,value\n");
            for (n, v) in coeffs.iter().enumerate() {
                s.push_str(&format!("{n},{}\n", to_exact_string(v)));
            }
            s
        }
        Format::Json => {
            let (name, params) = rv_json(rv.as_ref());
            let kind = args.kind.to_possible_value().expect("no skipped variants");
            let values: Vec<Value> = coeffs
                .iter()
                .enumerate()
                .map(|(n, v)| json!([n, to_exact_string(v)]))
                .collect();
            to_json(&json!({
                "kind": kind.get_name(),
                "rv": name,
                "params": params,
                "lambda": to_exact_string(&args.lambda),
                "gamma": to_exact_string(&args.gamma),
                "x": to_exact_string(&args.x),
                "order": args.order,
                "coefficients": values,
            }))
        }
    };
    Ok((text, OK))
}

fn run_verify(args: &VerifyArgs) -> Outcome {
    let mut rvs = if args.all_builtin {
        let mut all = RandomVariable::builtin();
        all.push(RandomVariable::PointMass {
            c: Rational::from_integer(1.into()),
        });
        all
    } else {
        Vec::new()
    };
    for text in &args.rv {
        let rv = parse_rv(text)?;
        // every first-kind identity divides by the mean
        rv.require_nonzero_mean()?;
        rvs.push(rv);
    }
    let lambdas = if args.lambda.is_empty() {
        default_lambdas()
    } else {
        args.lambda.clone()
    };
    let opts = SuiteOptions {
        gammas: if args.gamma.is_empty() {
            default_gammas()
        } else {
            args.gamma.clone()
        },
        depth: args.depth,
        ..SuiteOptions::default()
    };
    let report = grid_suite(&rvs, &lambdas, args.nmax, &opts);
    let code = if report.no_failures() { OK } else { FAILED };
    let text = match args.out.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("id,rv,lambda,nmax,status,checked\n");
            for r in &report.records {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.id,
                    csv_field(r.rv.as_deref().unwrap_or("")),
                    r.lambda.as_deref().unwrap_or(""),
                    r.nmax,
                    r.status,
                    r.checked
                ));
            }
            s
        }
    };
    eprint!("{report}");
    Ok((text, code))
}

fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

fn run_mc(args: &McArgs) -> Outcome {
    let rv = parse_rv(&args.rv)?;
    let est = mc_check(&rv, &args.lambda, args.n, args.j, args.samples, args.seed)?;
    let code = if est.within_band() { OK } else { FAILED };
    let mut text = serde_json::to_string_pretty(&est).expect("estimates serialize");
    text.push('\n');
    Ok((text, code))
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, path) = match &cli.command {
        Command::Table(a) => (run_table(a), a.out.output.as_ref()),
        Command::Series(a) => (run_series(a), a.out.output.as_ref()),
        Command::Verify(a) => (run_verify(a), a.out.output.as_ref()),
        Command::Mc(a) => (run_mc(a), a.output.as_ref()),
    };
    let outcome = result.and_then(|(text, code)| emit(&text, path).map(|_| code));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Domain(m) | Failure::Io(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
