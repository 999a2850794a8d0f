//! Command line front end: configuration, identity catalog, suites and
//! reports.

pub mod catalog;
pub mod config;
pub mod report;
pub mod suites;

use rayon::prelude::*;

use config::{RunConfig, Setup};
use report::{Report, SCHEMA_VERSION};
use suites::{run_suite, Ctx, SUITES};

/// Runs the selected suites in parallel and merges the records in suite
/// order.
pub fn run(cfg: &RunConfig, setup: &Setup) -> Report {
    let canonical = cfg.canonical();
    let selected = cfg.suite_list();
    let per_suite: Vec<Vec<report::Record>> = selected
        .par_iter()
        .map(|name| {
            let (idx, f) = SUITES.iter().enumerate().find(|(_, (n, _))| n == name).map(|(i, (_, f))| (i, *f)).expect("suite");
            let ctx = Ctx { cfg, setup, seed: cfg.seed.wrapping_add(idx as u64) };
            run_suite(f, &ctx, name).into_iter().map(|o| report::record(&canonical, name, o)).collect()
        })
        .collect();
    let records: Vec<_> = per_suite.into_iter().flatten().collect();
    Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        model: cfg.model.name.clone(),
        seed: cfg.seed,
        config_digest: report::digest(&[&canonical]),
        suites: selected.iter().map(|s| s.to_string()).collect(),
        pass: !records.is_empty() && records.iter().all(|r| r.pass),
        records,
    }
}
