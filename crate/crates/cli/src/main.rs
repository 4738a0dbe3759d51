use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curvlab::catalog::{builtin, find_builtin, BUILTINS};
use curvlab::geomfile::load_geometry_file_with;
use curvlab::suite::{self, parse_checks, RunConfig, Tolerances, EXIT_USAGE};
use curvlab::{GeometryEntry, Scalar};

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Verify curvature and complex-structure claims on 4-manifolds")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Precision {
    F64,
    F32,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on a built-in geometry.
    Verify {
        geometry: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the built-in geometries.
    List,
    /// Show what a geometry declares and which checks apply.
    Describe {
        geometry: String,
        #[arg(long = "params", value_name = "KEY=VAL")]
        params: Vec<String>,
    },
    /// Load a geometry from a JSON file and run checks on it.
    CheckFile {
        path: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated checks, or `all`. Defaults to the checks behind the
    /// geometry's expected claims.
    #[arg(long)]
    checks: Option<String>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance override, e.g. `ricci=1e-6`. Repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    tol: Vec<String>,
    /// Sampling interval for one coordinate, e.g. `r=2.5:6`. Repeatable.
    #[arg(long = "region", value_name = "KEY=LO:HI")]
    region: Vec<String>,
    /// Geometry parameter, e.g. `alpha=0.3`. Repeatable or comma-separated.
    #[arg(long = "params", value_name = "KEY=VAL")]
    params: Vec<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    precision: Precision,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>, UsageError> {
    let mut out = BTreeMap::new();
    for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| UsageError(format!("parameter `{item}` is not KEY=VAL")))?;
        let v: f64 = v.trim().parse().map_err(|_| UsageError(format!("parameter `{item}`: `{v}` is not a number")))?;
        if !v.is_finite() {
            return Err(UsageError(format!("parameter `{item}` is not finite")));
        }
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn parse_region(item: &str) -> Result<(String, f64, f64), UsageError> {
    let bad = || UsageError(format!("region `{item}` is not KEY=LO:HI"));
    let (k, range) = item.split_once('=').ok_or_else(bad)?;
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((k.trim().to_string(), lo, hi))
}

fn config(args: &RunArgs) -> Result<RunConfig, UsageError> {
    if args.samples == 0 {
        return Err(UsageError("--samples must be at least 1".into()));
    }
    if args.jobs == Some(0) {
        return Err(UsageError("--jobs must be at least 1".into()));
    }
    let mut tolerances = Tolerances::default();
    for t in &args.tol {
        tolerances.set_pair(t).map_err(UsageError)?;
    }
    Ok(RunConfig {
        checks: args.checks.as_deref().map(parse_checks).transpose().map_err(UsageError)?,
        samples: args.samples,
        seed: args.seed,
        region: args.region.iter().map(|r| parse_region(r)).collect::<Result<_, _>>()?,
        tolerances,
        jobs: args.jobs,
    })
}

enum Source<'a> {
    Builtin(&'a str),
    File(&'a PathBuf),
}

fn load<T: Scalar>(src: &Source, params: &BTreeMap<String, f64>) -> Result<GeometryEntry<T>, UsageError> {
    Ok(match src {
        Source::Builtin(name) => builtin(name, params)?,
        Source::File(path) => load_geometry_file_with(path, params)?,
    })
}

fn verify<T: Scalar>(src: &Source, args: &RunArgs, format: Format) -> Result<i32, UsageError> {
    let cfg = config(args)?;
    let entry = load::<T>(src, &parse_params(&args.params)?)?;
    let report = suite::run(&entry, &cfg)?;
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    Ok(report.exit_code())
}

fn run_checks(src: Source, args: &RunArgs, format: Format) -> Result<i32, UsageError> {
    match args.precision {
        Precision::F64 => verify::<f64>(&src, args, format),
        Precision::F32 => verify::<f32>(&src, args, format),
    }
}

fn list(format: Format) {
    match format {
        Format::Text => {
            for b in BUILTINS {
                let params: Vec<String> = b.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let params = if params.is_empty() { String::new() } else { format!(" [{}]", params.join(" ")) };
                println!("{:<16} {}{}", b.name, b.summary, params);
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = BUILTINS
                .iter()
                .map(|b| {
                    serde_json::json!({
                        "name": b.name,
                        "summary": b.summary,
                        "params": b.params.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&items).expect("list serializes"));
        }
    }
}

fn describe(name: &str, params: &[String], format: Format) -> Result<i32, UsageError> {
    if find_builtin(name).is_none() {
        let names: Vec<&str> = BUILTINS.iter().map(|b| b.name).collect();
        return Err(UsageError(format!("unknown geometry `{name}` (known: {})", names.join(", "))));
    }
    let entry = builtin::<f64>(name, &parse_params(params)?)?;
    let d = suite::describe(&entry);
    match format {
        Format::Text => print!("{}", d.to_text()),
        Format::Json => print!("{}", d.to_json()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            list(cli.format);
            Ok(0)
        }
        Command::Describe { geometry, params } => describe(geometry, params, cli.format),
        Command::Verify { geometry, run } => run_checks(Source::Builtin(geometry), run, cli.format),
        Command::CheckFile { path, run } => run_checks(Source::File(path), run, cli.format),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
