//! `qop`: run the paradox suite and single analyses from the command line.
//!
//! Exit codes: 0 success, 1 a paradox or invariant failed, 2 bad configuration.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qop_core::operator::Constants;
use qop_core::reports::{
    deficiency_report, emit_report, fourier_report, load_scenario, run_all, run_paradox, run_scenario, spectrum_report,
    uncertainty_cli_report, Emit, Format, ParadoxVerdict, ScenarioConfig,
};
use qop_core::uncertainty::DEFAULT_SEED;
use qop_core::QopError;

#[derive(Parser)]
#[command(name = "qop", version, about = "Operators as (expression, domain) pairs: paradoxes and analyses")]
struct Cli {
    /// Output format: json, csv or text.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run paradox 1-7, or all of them.
    Paradox {
        /// 1..7 or "all".
        id: String,
        /// Strict JSON scenario overriding constants, grid and tolerances.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lowest eigenvalues of H (well), Lz (circle) or P_alpha (twisted momentum on [0, 1]).
    Spectrum {
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long = "n-points", default_value_t = 2001)]
        n_points: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Deficiency indices of P_box, A_line, P_line, Lz_circle or H_well.
    Deficiency {
        #[arg(long)]
        operator: String,
    },
    /// Variances and bounds for a named state.
    Uncertainty {
        #[arg(long)]
        state: String,
    },
    /// Fourier transform of a catalog state.
    Fourier {
        #[arg(long)]
        state: String,
    },
    /// Run the analyses listed in a scenario file.
    Scenario { path: PathBuf },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: QopError| e.to_string())
}

fn seed() -> Result<u64, QopError> {
    match std::env::var("QOP_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| QopError::Config(format!("QOP_SEED must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn write<R: Emit>(reports: &[R], format: Format) -> Result<(), QopError> {
    let bytes = emit_report(reports, format)?;
    std::io::stdout().write_all(&bytes).map_err(|e| QopError::Structural(format!("stdout: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, QopError> {
    let seed = seed()?;
    let k = Constants::default();
    match cli.command {
        Command::Paradox { id, config } => {
            let cfg = match config {
                Some(p) => load_scenario(&p)?,
                None => ScenarioConfig::default(),
            };
            let reports = if id == "all" {
                run_all(&cfg, seed)
            } else {
                let n: u8 = id
                    .parse()
                    .ok()
                    .filter(|n| (1..=7).contains(n))
                    .ok_or_else(|| QopError::Config(format!("paradox id must be 1-7 or 'all', got '{id}'")))?;
                vec![run_paradox(n, &cfg, seed)?]
            };
            write(&reports, cli.format)?;
            let ok = reports.iter().all(|r| r.verdict == ParadoxVerdict::Reproduced);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Spectrum { operator, alpha, n_points, k: count } => {
            let k = Constants { alpha, ..k };
            k.validate().map_err(|e| QopError::Config(e.to_string()))?;
            write(&[spectrum_report(&operator, &k, n_points, count)?], cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Deficiency { operator } => {
            write(&[deficiency_report(&operator, &k)?], cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Uncertainty { state } => {
            let r = uncertainty_cli_report(&state, &k, seed)?;
            let holds = r.facts.get("inequality_holds").and_then(|v| v.as_bool()).unwrap_or(false);
            write(&[r], cli.format)?;
            Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Fourier { state } => {
            write(&[fourier_report(&state, &k)?], cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenario { path } => {
            let cfg = load_scenario(&path)?;
            write(&run_scenario(&cfg, seed)?, cli.format)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qop: {e}");
            match e {
                QopError::Config(_) | QopError::Input(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
