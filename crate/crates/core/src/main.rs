use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use conley_lab::cli::{self, Command, Format, EXIT_ERROR};

/// Conley and Poincaré indices of planar vector fields.
#[derive(Debug, Parser)]
#[command(name = "conley-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// INI scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Report path; CSV exports go beside it. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let (report, code, csv) = match cli::load_config(&args.config) {
        Ok(config) => {
            let o = cli::run(&config, args.command);
            (cli::report(Some(&config), vec![o.result], start.elapsed()), o.exit_code, o.csv)
        }
        Err(e) => {
            eprintln!("conley-lab: {}: {e}", args.config.display());
            let result = serde_json::json!({
                "command": args.command.as_str(),
                "status": "error",
                "error": cli::error_object(e.kind(), &e.to_string(), None),
            });
            (cli::report(None, vec![result], start.elapsed()), EXIT_ERROR, Vec::new())
        }
    };
    if let Err(e) = cli::emit(&report, args.format, args.out.as_deref(), &csv) {
        eprintln!("conley-lab: cannot write report: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(code as u8)
}
