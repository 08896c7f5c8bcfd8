use std::panic;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use tangentia::corpus;
use tangentia::morphism::DEFAULT_MAX_DEGREE;
use tangentia::script::{run_source, RunOptions, SCHEMA};

/// Tangent algebras of automorphism groups of free algebras.
///
/// Composition `compose A, B` is the map x -> A(B(x)).
#[derive(Parser)]
#[command(name = "tangentia", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a script file, or a corpus script by name.
    Run {
        script: PathBuf,
        /// Print the versioned JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Default truncation bound.
        #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
        max_degree: usize,
        /// Seed for sampling; overrides seeds given in the script.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the corpus scripts.
    Corpus,
}

fn load(path: &PathBuf) -> Result<String, String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => path
            .to_str()
            .and_then(corpus::source)
            .map(str::to_string)
            .ok_or_else(|| format!("cannot read {}: {e}", path.display())),
    }
}

fn report_error(json: bool, kind: &str, message: &str, pos: Option<(usize, usize)>) {
    if json {
        let err = json!({
            "kind": kind,
            "message": message,
            "line": pos.map(|p| p.0),
            "column": pos.map(|p| p.1),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"schema": SCHEMA, "error": err})).unwrap()
        );
    } else {
        eprintln!("tangentia: {message}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Corpus => {
            for n in corpus::names() {
                println!("{n}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Run {
            script,
            json,
            max_degree,
            seed,
        } => {
            let src = match load(&script) {
                Ok(s) => s,
                Err(e) => {
                    report_error(json, "io", &e, None);
                    return ExitCode::from(1);
                }
            };
            let opts = RunOptions { max_degree, seed };
            panic::set_hook(Box::new(|_| {}));
            let outcome = panic::catch_unwind(|| run_source(&src, &opts));
            match outcome {
                Ok(Ok(report)) => {
                    if json {
                        print!("{}", report.render_json());
                    } else {
                        print!("{}", report.render_text());
                    }
                    ExitCode::SUCCESS
                }
                Ok(Err(e)) => {
                    let p = e.pos();
                    report_error(json, e.kind(), &e.to_string(), Some((p.line, p.col)));
                    ExitCode::from(if e.is_internal() { 2 } else { 1 })
                }
                Err(payload) => {
                    let msg = payload
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| payload.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "unknown panic".into());
                    report_error(json, "invariant", &format!("internal error: {msg}"), None);
                    ExitCode::from(2)
                }
            }
        }
    }
}
