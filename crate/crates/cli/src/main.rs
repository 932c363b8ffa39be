use std::process::ExitCode;

use clap::Parser;
use ndv_scout_cli::{run, Cli, UsageError, EXIT_USAGE};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NDV_SCOUT_LOG", "warn")).init();
    // clap exits with status 2 on argument errors.
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.is::<UsageError>() { EXIT_USAGE } else { 1 };
            ExitCode::from(code as u8)
        }
    }
}
