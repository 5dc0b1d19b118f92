use std::path::PathBuf;
use std::process::ExitCode;

use chebext_cli::{parse_config, run, summary, write_outputs, DEFAULT_CONFIG};
use clap::Parser;

/// Run a verification campaign and write records.csv and summary.txt.
#[derive(Parser)]
#[command(name = "chebext", version)]
struct Args {
    /// Campaign file; the bundled delta sweep when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] path`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Do not print the summary.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => DEFAULT_CONFIG.to_string(),
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            let origin = args
                .config
                .as_ref()
                .map_or("<default>".into(), |p| p.display().to_string());
            eprintln!("error: {origin}: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = run(&config);
    let dir = args.output.unwrap_or_else(|| config.output.clone());
    if let Err(e) = write_outputs(&outcome, &dir) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if !args.quiet {
        print!("{}", summary(&outcome));
    }
    if outcome.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
