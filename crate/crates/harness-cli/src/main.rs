use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use harness_cli::{export, load_scenario, parse_report, registry, report_json, run_with_threads, threads_from_env, Format};

/// Resolvent and quasimode experiments on semiclassical systems.
#[derive(Parser)]
#[command(name = "psdlab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a built-in scenario or a scenario file; exit code 0 iff every assertion passes.
    Run {
        config: String,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in scenario names.
    ListScenarios,
    /// Turn a saved report into CSV tables, SVG heatmaps or canonical JSON.
    Export {
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Run { config, out } => {
            let sc = load_scenario(&config)?;
            let report = run_with_threads(&sc, threads_from_env()?)?;
            let text = report_json(&report);
            match out {
                Some(p) => std::fs::write(&p, &text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            for a in &report.analyses {
                if let Some(e) = &a.error {
                    eprintln!("analysis {} failed: {e}", a.id);
                }
            }
            for a in report.assertions.iter().filter(|a| !a.passed) {
                eprintln!(
                    "FAIL {}.{} {:?} {} (actual {}){}",
                    a.analysis,
                    a.field,
                    a.op,
                    a.expected,
                    a.actual.as_ref().map_or("none".to_string(), |v| v.to_string()),
                    a.note.as_deref().map_or(String::new(), |n| format!(": {n}"))
                );
            }
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::ListScenarios => {
            for n in registry::names() {
                println!("{n}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Export { report, format, out } => {
            let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let r = parse_report(&text, &report.display().to_string())?;
            for p in export(&r, format, &out)? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
