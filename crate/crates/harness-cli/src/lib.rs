//! Scenario-driven runs over the model operators, with CSV/SVG/JSON export.

pub mod export;
pub mod expr;
pub mod registry;
pub mod report;
pub mod run;
pub mod scenario;
pub mod symbols;

use std::path::PathBuf;

pub use export::{export, parse_report, report_json, Format};
pub use report::RunReport;
pub use run::{run_scenario, run_with_threads, threads_from_env};
pub use scenario::{parse_scenario, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{origin}:{line}:{column}: field `{path}`: {message}")]
    Schema { origin: String, path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown scenario `{0}`; not a built-in name or a readable file")]
    UnknownScenario(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// A built-in scenario name or a path to a scenario file.
pub fn load_scenario(arg: &str) -> Result<Scenario, HarnessError> {
    if let Some(text) = registry::get(arg) {
        return parse_scenario(text, arg);
    }
    let path = PathBuf::from(arg);
    if !path.is_file() {
        return Err(HarnessError::UnknownScenario(arg.to_string()));
    }
    let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    parse_scenario(&text, arg)
}
