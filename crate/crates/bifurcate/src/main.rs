use std::path::PathBuf;
use std::process::ExitCode;

use bifurcate::config::{ModelKind, RunConfig};
use bifurcate::core::continuation::Direction;
use bifurcate::pipeline::{run, EXIT_CONFIG};
use clap::Parser;

/// Trace an equilibrium curve, detect limit points and Hopf points, and
/// locate them precisely.
///
/// Writes `<prefix>_curve.csv` and `<prefix>_events.json`.
/// Exit codes: 0 ok, 1 output error, 2 bad configuration, 3 seed failure,
/// 4 continuation aborted, 5 a bifurcation point could not be located.
#[derive(Parser, Debug)]
#[command(name = "bifurcate", version)]
struct Cli {
    /// Built-in model with its shipped default configuration.
    #[arg(long, value_enum, conflicts_with = "config")]
    model: Option<ModelKind>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Arclength step.
    #[arg(long)]
    ds: Option<f64>,
    /// Maximum number of continuation steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Sign of dλ/ds at the seed: 1 or -1.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_direction)]
    direction: Option<Direction>,
    /// Lower end of the λ window.
    #[arg(long, allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    /// Upper end of the λ window.
    #[arg(long, allow_hyphen_values = true)]
    lambda_max: Option<f64>,
    /// Newton tolerance for both the corrector and the locators.
    #[arg(long)]
    tol: Option<f64>,
    /// Output path prefix.
    #[arg(long)]
    out: Option<String>,
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    let v: i64 = s.parse().map_err(|_| format!("{s:?} is not an integer"))?;
    Direction::try_from(v).map_err(str::to_owned)
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut c = match (&cli.config, cli.model) {
        (Some(path), _) => RunConfig::load(path).map_err(|e| e.to_string())?,
        (None, Some(m)) => RunConfig::builtin(m),
        (None, None) => return Err("one of --model or --config is required".into()),
    };
    let s = &mut c.settings;
    if let Some(v) = cli.ds {
        s.ds = v;
    }
    if let Some(v) = cli.steps {
        s.max_steps = v;
    }
    if let Some(v) = cli.direction {
        s.direction = v;
    }
    if let Some(v) = cli.lambda_min {
        s.lambda_min = v;
    }
    if let Some(v) = cli.lambda_max {
        s.lambda_max = v;
    }
    if let Some(v) = cli.tol {
        s.newton_tol = v;
        c.locate.tol = v;
    }
    if let Some(v) = &cli.out {
        c.output_prefix = v.clone();
    }
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let out = match run(&config) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (curve, events) = match out.write(&config.output_prefix) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(msg) = &out.trace_error {
        eprintln!("error: {msg}");
    }
    for e in &out.events {
        match (&e.located, &e.error) {
            (Some(l), _) => match l.beta {
                Some(b) => eprintln!("{}: lambda = {:.10}, beta = {:.10}", e.kind.as_str(), l.lambda, b),
                None => eprintln!("{}: lambda = {:.10}", e.kind.as_str(), l.lambda),
            },
            (None, Some(err)) => eprintln!("{}: not located ({err})", e.kind.as_str()),
            (None, None) => {}
        }
    }
    let t = out.timings;
    eprintln!(
        "{} points, {} events, {} neutral saddles; seed {:?}, trace {:?}, locate {:?}",
        out.curve.len(),
        out.events.len(),
        out.neutral_saddles.len(),
        t.seed,
        t.trace,
        t.locate
    );
    eprintln!("wrote {} and {}", curve.display(), events.display());
    ExitCode::from(out.exit_code() as u8)
}
