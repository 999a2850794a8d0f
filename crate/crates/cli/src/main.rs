use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lattice_bv_cli::catalog::{explain, CATALOG};
use lattice_bv_cli::config::RunConfig;
use lattice_bv_cli::suites::SUITES;

/// Exact verifier for BV and Moyal-Weyl quantization of free lattice field
/// theories.
#[derive(Parser)]
#[command(name = "lattice-bv", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and print one line per check.
    Run {
        /// TOML configuration; defaults are used for anything missing.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Suites to run, comma separated or repeated.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// `kg` or `maxwell2d`.
        #[arg(long)]
        model: Option<String>,
        /// Larger windows and more samples.
        #[arg(long)]
        extended: bool,
        /// Write the JSON report here.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Describe one identity of the catalog.
    Explain { id: String },
    /// List suites and the identities each one checks.
    ListSuites,
}

fn init_workers() -> Result<(), String> {
    let Ok(v) = std::env::var("LATTICE_BV_WORKERS") else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| format!("LATTICE_BV_WORKERS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("LATTICE_BV_WORKERS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Explain { id } => match explain(&id) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        },
        Cmd::ListSuites => {
            for (name, _) in SUITES {
                println!("{name}");
                for e in CATALOG.iter().filter(|e| e.suite == *name) {
                    println!("  {:<26} {}", e.id, e.anchor);
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { config, seed, suite, model, extended, report_out } => {
            let mut cfg = match config {
                Some(p) => match RunConfig::load(&p) {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(2);
                    }
                },
                None => RunConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if !suite.is_empty() {
                cfg.suites = suite;
            }
            if let Some(m) = model {
                cfg.model.name = m;
            }
            if extended {
                cfg.extend();
            }
            if let Err(e) = init_workers() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            let setup = match cfg.validate() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let report = lattice_bv_cli::run(&cfg, &setup);
            for r in &report.records {
                println!("{}", r.line());
            }
            let failed = report.records.iter().filter(|r| !r.pass).count();
            println!(
                "{} records, {failed} failed | model {} | seed {} | exact arithmetic",
                report.records.len(),
                report.model,
                report.seed
            );
            if let Some(path) = report_out {
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                if let Err(e) = std::fs::write(&path, json + "\n") {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
