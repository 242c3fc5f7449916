mod args;
mod design;
mod error;
mod experiment;
mod mechanisms;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;
use output::Report;

fn dispatch(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Run(a) => mechanisms::run(a),
        Command::Worstcase(c) => mechanisms::worstcase(c),
        Command::Verify(c) => mechanisms::verify(c),
        Command::Amd(c) => design::amd(c),
        Command::Experiment(c) => experiment::experiment(c),
    }
}

/// Exit status and the text destined for stdout and stderr.
struct Execution {
    code: u8,
    stdout: String,
    stderr: String,
}

fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    log::info!("configuration: {cli:?}");

    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers.into()).build_global() {
            return Execution {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            };
        }
    }
    match dispatch(&cli) {
        Ok(report) => Execution {
            code: 0,
            stdout: report.render(cli.format),
            stderr: String::new(),
        },
        Err(e) => Execution {
            code: e.exit_code() as u8,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn main() -> ExitCode {
    let run = execute(std::env::args_os());
    let stdout_ok = std::io::stdout().lock().write_all(run.stdout.as_bytes()).is_ok();
    let _ = std::io::stderr().lock().write_all(run.stderr.as_bytes());
    if !stdout_ok && run.code == 0 {
        return ExitCode::from(1);
    }
    ExitCode::from(run.code)
}

#[cfg(test)]
mod tests;
