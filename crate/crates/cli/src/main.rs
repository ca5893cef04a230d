use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use otsfd::experiments::{lookup, REGISTRY};
use otsfd::harness::{run_study, StudyConfig};
use otsfd::reproduce::reproduce_all;
use otsfd::solvers_1d::SchemeVariant;
use otsfd::{Error, TimeStepPolicy};

const EXIT_USAGE: u8 = 1;
const EXIT_ACCEPTANCE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "otsfd", version, about = "Optimal-time-step finite-difference convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments with their step rule and predicted orders.
    List,
    /// Run a convergence study and write its CSV.
    Run(RunArgs),
    /// Run every figure study and timing study into a directory with a manifest.
    ReproduceAll {
        /// Output directory (default: $OTSFD_OUT_DIR, then `otsfd-out`).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    experiment: String,
    #[arg(long)]
    n_min: Option<usize>,
    /// Number of resolutions `n_min * 2^k`.
    #[arg(long)]
    refinements: Option<usize>,
    /// `ots`, `subopt` or `ratio=<c>:<p>` for `dt = c dx^p`.
    #[arg(long, value_parser = parse_policy)]
    policy: Option<Policy>,
    #[arg(long, value_enum)]
    correction: Option<Switch>,
    #[arg(long)]
    final_time: Option<f64>,
    /// CSV path (default: `<out root>/<experiment>.csv`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fixture name overriding the experiment default.
    #[arg(long)]
    seed_fixture: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug)]
enum Policy {
    Ots,
    Subopt,
    Ratio(f64, f64),
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    match s {
        "ots" => Ok(Policy::Ots),
        "subopt" => Ok(Policy::Subopt),
        _ => {
            let body = s.strip_prefix("ratio=").ok_or_else(|| format!("unknown policy `{s}`"))?;
            let (c, p) = body.split_once(':').ok_or_else(|| format!("expected ratio=<c>:<p>, got `{s}`"))?;
            let c = c.parse::<f64>().map_err(|e| format!("bad ratio coefficient: {e}"))?;
            let p = p.parse::<f64>().map_err(|e| format!("bad ratio exponent: {e}"))?;
            Ok(Policy::Ratio(c, p))
        }
    }
}

fn out_root() -> PathBuf {
    std::env::var_os("OTSFD_OUT_DIR").map_or_else(|| PathBuf::from("otsfd-out"), PathBuf::from)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::UnknownExperiment(_) | Error::MissingDerivative(_) | Error::NoPositiveRoot { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_NUMERICAL,
    }
}

fn fmt_order(policy: &TimeStepPolicy, e: &otsfd::experiments::Experiment) -> String {
    e.predicted_order(policy).map_or_else(|_| "-".into(), |o| format!("{o}"))
}

fn cmd_list() -> Result<u8, Error> {
    println!("{:<29} {:<56} {:<28} {:>5} {:>7}", "experiment", "scheme", "default dt rule", "order", "subopt");
    for e in REGISTRY {
        println!(
            "{:<29} {:<56} {:<28} {:>5} {:>7}",
            e.name,
            e.scheme,
            e.dt_formula,
            fmt_order(&e.default_policy, e),
            fmt_order(&e.suboptimal, e)
        );
    }
    Ok(0)
}

fn cmd_run(args: RunArgs) -> Result<u8, Error> {
    let e = lookup(&args.experiment)?;
    let policy = match args.policy {
        None => e.default_policy,
        Some(Policy::Ots) => TimeStepPolicy::Optimal,
        Some(Policy::Subopt) => e.suboptimal,
        Some(Policy::Ratio(c, exponent)) => TimeStepPolicy::ExplicitRatio { c, exponent },
    };
    policy.validate()?;
    let nidc = match args.correction {
        Some(Switch::On) => true,
        Some(Switch::Off) => false,
        None => policy.is_optimal() && e.supports_nidc,
    };
    let mut cfg = StudyConfig::new(e.name, SchemeVariant::new(nidc, policy))?
        .with_resolutions(args.n_min.unwrap_or(e.n_min), args.refinements.unwrap_or(e.levels));
    if let Some(t) = args.final_time {
        cfg = cfg.with_final_time(t);
    }
    if let Some(fx) = &args.seed_fixture {
        cfg = cfg.with_fixture(fx);
    }
    let out = args.out.unwrap_or_else(|| out_root().join(format!("{}.csv", e.name)));
    cfg.output = Some(out.clone());

    let report = run_study(&cfg)?;
    for r in &report.rows {
        match &r.failure {
            None => println!("N = {:>5}  dt = {:.4e}  error = {:.4e}", r.n, r.dt, r.error_linf),
            Some(f) => println!("N = {:>5}  failed: {f}", r.n),
        }
    }
    let order = report.order().map_or_else(|| "n/a".to_string(), |o| format!("{o:.3}"));
    println!(
        "{} [{}]: fitted order {order}, max error {:.3e}, csv {}",
        report.experiment,
        report.variant,
        report.max_error(),
        out.display()
    );
    Ok(if report.failures().next().is_some() { EXIT_NUMERICAL } else { 0 })
}

fn cmd_reproduce_all(out_dir: Option<PathBuf>) -> Result<u8, Error> {
    let dir = out_dir.unwrap_or_else(out_root);
    let manifest = reproduce_all(&dir, |m| {
        let value = m.value.map_or_else(|| "NaN".to_string(), |v| format!("{v:.3e}"));
        println!("{} {:<34} {value:>10}  {}", if m.pass { "ok  " } else { "FAIL" }, m.id, m.band);
    })?;
    println!("wrote {} studies and manifest.csv to {}", manifest.entries.len(), dir.display());
    Ok(if manifest.any_numerical_failure() {
        EXIT_NUMERICAL
    } else if !manifest.all_pass() {
        EXIT_ACCEPTANCE
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::List => cmd_list(),
        Command::Run(args) => cmd_run(args),
        Command::ReproduceAll { out_dir } => cmd_reproduce_all(out_dir),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
