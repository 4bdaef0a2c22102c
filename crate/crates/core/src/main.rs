use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cstar_triple::jb_triple::Mutation;
use cstar_triple::suites::{
    parse_dims, parse_suites, replay_file, run_suites, OutputFormat, SuiteConfig, SuiteError,
};
use cstar_triple::ToleranceConfig;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Verify the Hilbert C*-module / JB*-triple identities on random matrix instances.
#[derive(Debug, Parser)]
#[command(name = "cstar-verify", version)]
struct Cli {
    /// Comma-separated dimension pairs, e.g. "1x1,2x3".
    #[arg(long, default_value = "1x1,2x2,3x2,2x3,4x1")]
    dims: String,

    /// Random instances per property and dimension pair.
    #[arg(long, default_value_t = 100)]
    trials: u64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Absolute tolerance; the composed tolerance is raised to match if needed.
    #[arg(long)]
    tol: Option<f64>,

    /// module, axioms, ball, extreme or all (comma lists accepted).
    #[arg(long, default_value = "all")]
    suite: String,

    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,

    /// Run only the named properties (comma-separated).
    #[arg(long, value_delimiter = ',')]
    property: Option<Vec<String>>,

    /// Write witness fixtures for failing properties into this directory.
    #[arg(long, value_name = "DIR")]
    fixtures: Option<PathBuf>,

    /// Replay a single witness fixture instead of running suites.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,

    /// Inject a known fault to confirm the suites catch it.
    #[arg(long, hide = true)]
    mutate: Option<Mutation>,
}

fn tolerances(tol: Option<f64>) -> Result<ToleranceConfig, SuiteError> {
    match tol {
        Some(t) => ToleranceConfig::with_abs_tol(t).map_err(|e| SuiteError::Config(e.to_string())),
        None => Ok(ToleranceConfig::default()),
    }
}

fn run(cli: Cli) -> Result<bool, SuiteError> {
    let format: OutputFormat = cli.format.parse()?;
    let tolerances = tolerances(cli.tol)?;

    if let Some(path) = &cli.check {
        let r = replay_file(path, &tolerances)?;
        match format {
            OutputFormat::Json => println!(
                "{}",
                serde_json::json!({
                    "property": r.property,
                    "space": r.space.to_string(),
                    "residual": r.outcome.residual,
                    "threshold": r.outcome.threshold,
                    "passed": r.outcome.pass,
                    "error": r.error,
                })
            ),
            OutputFormat::Text => {
                let verdict = if r.outcome.pass { "PASS" } else { "FAIL" };
                print!(
                    "{verdict} {} [{}] residual {:e} (threshold {:e})",
                    r.property, r.space, r.outcome.residual, r.outcome.threshold
                );
                match &r.error {
                    Some(e) => println!(": {e}"),
                    None => println!(),
                }
            }
        }
        return Ok(r.outcome.pass);
    }

    let config = SuiteConfig {
        dims: parse_dims(&cli.dims)?,
        trials: cli.trials,
        seed: cli.seed,
        tolerances,
        suites: parse_suites(&cli.suite)?,
        format,
        fixtures_dir: cli.fixtures,
        mutation: cli.mutate,
        only: cli.property,
    };
    let report = run_suites(&config)?;
    match format {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Text => print!("{}", report.to_text()),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("cstar-verify: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
