//! Config loading, command dispatch and report output for the `conley-lab`
//! binary.

mod config;
mod emit;
mod run;

pub use config::{load_config, parse_config, ConfigError, OrbitDirection, RunConfig, Tolerances};
pub use emit::{to_json, to_text};
pub use run::{
    error_object, homology_json, report_json, run, triple_json, verifier_json, Command, Outcome, EXIT_ERROR, EXIT_OK,
    EXIT_VERIFIER_FAILED,
};

use std::path::Path;
use std::time::Duration;

use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// Top-level report: `{version, config, results, timing}`.
pub fn report(config: Option<&RunConfig>, results: Vec<Value>, elapsed: Duration) -> Value {
    json!({
        "version": VERSION,
        "config": config.map_or(Value::Null, RunConfig::echo),
        "results": results,
        "timing": {"elapsed_ms": elapsed.as_secs_f64() * 1e3},
    })
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Text => to_text(report),
    }
}

/// Writes the rendered report to `out` (stdout when absent) and CSV side
/// files into the report's directory.
pub fn emit(report: &Value, format: Format, out: Option<&Path>, csv: &[(String, String)]) -> std::io::Result<()> {
    let text = render(report, format);
    match out {
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())
        }
        Some(path) => {
            std::fs::write(path, text)?;
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            for (name, body) in csv {
                std::fs::write(dir.join(name), body)?;
            }
            Ok(())
        }
    }
}
