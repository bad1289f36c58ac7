use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use nforge_cli::cache::Lookup;
use nforge_cli::ideal_order;
use nforge_cli::{execute, Options, COMMANDS};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

/// Certificate-producing smooth-locus and desingularization-step computations.
#[derive(Debug, Parser)]
#[command(name = "nforge", version)]
struct Cli {
    /// One of groebner, normal-form, quotient, radical-member, jacobian, delta,
    /// elkik, certify-smooth, neron-step, verify, homogenize, annihilator-ext,
    /// lift, adjoin, resolve-chain.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    problem: PathBuf,
    /// Order N of truncated targets; overrides the problem file.
    #[arg(long)]
    truncation_order: Option<u32>,
    #[arg(long, default_value = "degrevlex", value_parser = ["degrevlex", "lex"])]
    monomial_order: String,
    #[arg(long, default_value_t = 24)]
    degree_budget: u32,
    /// Gröbner cache directory; NFORGE_CACHE_DIR takes precedence.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step report to re-verify (verify only).
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        truncation_order: cli.truncation_order,
        order: ideal_order(&cli.monomial_order).expect("clap restricts the values"),
        degree_budget: cli.degree_budget,
        cache_dir: cli.cache_dir,
        seed: cli.seed,
        report: cli.report,
    };
    let start = Instant::now();
    let (report, lookup) = execute(&cli.command, &cli.problem, &opts);
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Pretty => {
            if let Some(l) = lookup {
                eprintln!("groebner cache {}", if l == Lookup::Hit { "hit" } else { "miss" });
            }
            report.to_pretty(Some(start.elapsed()))
        }
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(report.exit_code() as u8)
}
