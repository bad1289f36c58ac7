//! Problem-file front end for nforge-core: loading, subcommand dispatch,
//! reports and the Gröbner cache.

pub mod cache;
pub mod commands;
pub mod error;
pub mod problem;
pub mod random;
pub mod report;

use sha2::{Digest, Sha256};

pub use commands::{run_command, Outcome, COMMANDS};
pub use error::CliError;
pub use problem::{load_problem, load_str, Options, Problem};
pub use report::{Report, Status};

fn echo(opts: &Options) -> report::OptionsEcho {
    report::OptionsEcho {
        truncation_order: opts.truncation_order,
        monomial_order: opts.order.to_string(),
        degree_budget: opts.degree_budget,
        seed: opts.seed,
    }
}

/// Loads `text`, runs `cmd` and settles the report. Errors become reports too.
pub fn execute_str(cmd: &str, text: &str, opts: &Options) -> (Report, Option<cache::Lookup>) {
    let mut report = Report {
        schema_version: report::SCHEMA_VERSION,
        command: cmd.to_string(),
        problem_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        options: echo(opts),
        status: Status::Error,
        checks: vec![],
        notes: vec![],
        result: serde_json::Value::Null,
        error: None,
    };
    let mut lookup = None;
    let run = || -> Result<Outcome, CliError> {
        if !COMMANDS.contains(&cmd) {
            return Err(CliError::schema("command", format!("unknown subcommand `{cmd}`")));
        }
        let pb = load_str(text, opts)?;
        run_command(cmd, &pb, opts)
    };
    match run() {
        Ok(out) => {
            report.checks = out.checks;
            report.result = out.result;
            report.notes = out.notes;
            lookup = out.cache;
        }
        Err(e) => report.error = Some((&e).into()),
    }
    report.settle();
    (report, lookup)
}

pub fn execute(cmd: &str, path: &std::path::Path, opts: &Options) -> (Report, Option<cache::Lookup>) {
    match std::fs::read_to_string(path) {
        Ok(text) => execute_str(cmd, &text, opts),
        Err(e) => {
            let err = CliError::Io { path: path.display().to_string(), message: e.to_string() };
            let (mut report, _) = execute_str(cmd, "", opts);
            report.checks.clear();
            report.result = serde_json::Value::Null;
            report.error = Some((&err).into());
            report.settle();
            (report, None)
        }
    }
}

pub fn ideal_order(name: &str) -> Option<nforge_core::ideal::OrderKind> {
    nforge_core::ideal::OrderKind::parse(name)
}
