//! Command-line harness: configuration ingestion, run directories with
//! manifests, CSV/JSON/SVG outputs and the cross-run report.

pub mod cli;
pub mod commands;
pub mod error;
pub mod plot;
pub mod report;
pub mod run;

use clap::Parser;
use maglab_core::field_model::FieldModelConfig;

use crate::cli::{Cli, Command};
use crate::commands::{Context, Outcome};
use crate::error::{HarnessError, HarnessResult};

/// Runs an already parsed command line.
pub fn execute(cli: &Cli) -> HarnessResult<Outcome> {
    let config = match (&cli.config, &cli.command) {
        (_, Command::Report { .. }) | (None, _) => None,
        (Some(p), _) => Some(FieldModelConfig::from_path(p)?),
    };
    if cli.trials == 0 {
        return Err(HarnessError::User("--trials must be at least 1".into()));
    }
    let ctx = Context {
        config,
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out.clone(),
    };
    match &cli.command {
        Command::Validate { resolution } => commands::validate(&ctx, *resolution),
        Command::Edges(a) => commands::edges(&ctx, a),
        Command::Sample(a) => commands::sample(&ctx, a),
        Command::Spectrum(a) => commands::spectrum(&ctx, a),
        Command::Wegner(a) => commands::wegner(&ctx, a),
        Command::Goodbox(a) => commands::goodbox(&ctx, a),
        Command::Balanced(a) => commands::balanced(&ctx, a),
        Command::Lifshitz(a) => commands::lifshitz(&ctx, a),
        Command::Decay(a) => commands::decay(&ctx, a),
        Command::Trial(a) => commands::trial(&ctx, a),
        Command::KernelAudit(a) => commands::kernel_audit(&ctx, a),
        Command::Ids(a) => commands::ids(&ctx, a),
        Command::Report { runs } => {
            let (dir, summary) = report::report(&ctx.out, ctx.seed, runs)?;
            Ok(Outcome {
                dir,
                summary,
                status: 0,
            })
        }
    }
}

/// Parses `args` (program name first), runs the command, prints the summary
/// line or a structured error, and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            println!("{} -> {}", o.summary, o.dir.display());
            o.status
        }
        Err(e) => {
            eprintln!("error[{}] {}: {e}", e.kind(), cli.command.name());
            e.exit_code()
        }
    }
}
