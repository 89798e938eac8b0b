//! Command-line front end: argument handling, per-command tables, CSV/JSON
//! output and the acceptance suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::Parser;

use crate::config::{Cli, CliCommand, Command, Opts, RunConfig};
use crate::error::CliResult;
use crate::output::write_table;

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Tabulate => "tabulate",
        Command::Limit => "limit",
        Command::Edgeworth => "edgeworth",
        Command::Mc => "mc",
        Command::Convergence => "convergence",
        Command::Validate => "validate",
    }
}

/// Runs one table-producing command; returns whether it succeeded on its own terms.
fn run_table(command: Command, opts: &Opts, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<bool> {
    let cfg = RunConfig::from_opts(command, opts)?;
    let (table, ok) = match command {
        Command::Tabulate => (commands::tabulate(&cfg)?, true),
        Command::Limit => (commands::limit(&cfg)?, true),
        Command::Edgeworth => (commands::edgeworth(&cfg)?, true),
        Command::Mc => commands::mc(&cfg)?,
        Command::Convergence => {
            let (t, rate) = commands::convergence(&cfg)?;
            writeln!(stderr, "fitted rate over n = {:?}: {rate:.4}", cfg.n_list)?;
            (t, true)
        }
        Command::Validate => unreachable!("validate has its own entry point"),
    };
    match &cfg.output_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_table(&table, &cfg, command_name(command), &mut w)?;
            w.flush()?;
        }
        None => write_table(&table, &cfg, command_name(command), stdout)?,
    }
    Ok(ok)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 success, 1 failure, 2 usage error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let (command, opts) = match cli.command {
        CliCommand::Validate(v) => {
            let results = validate::run_suite(v.tolerance_scale, &v.only, |r| {
                let _ = writeln!(stdout, "{}", r.line());
            });
            let failed = results.iter().filter(|r| !r.pass).count();
            let _ = writeln!(stdout, "{} of {} criteria passed", results.len() - failed, results.len());
            return if failed == 0 { 0 } else { 1 };
        }
        CliCommand::Tabulate(o) => (Command::Tabulate, o),
        CliCommand::Limit(o) => (Command::Limit, o),
        CliCommand::Edgeworth(o) => (Command::Edgeworth, o),
        CliCommand::Mc(o) => (Command::Mc, o),
        CliCommand::Convergence(o) => (Command::Convergence, o),
    };
    match run_table(command, &opts, stdout, stderr) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main_with_env() -> i32 {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    run(std::env::args_os(), &mut out, &mut err)
}
