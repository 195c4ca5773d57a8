use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use nvsensor_cli::{commands, Cli, CliError};

const THREADS_VAR: &str = "NVSENSOR_THREADS";

fn init_thread_pool() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    init_thread_pool()?;
    let outcome = commands::run(cli)?;
    let dir = cli.resolve_config()?.output.dir;
    let text = commands::emit(&outcome, dir.as_deref())?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Config(format!("stdout: {e}")))?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
