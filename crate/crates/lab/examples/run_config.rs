//! Runs a checked-in configuration in-process and prints its manifest.
//!
//! `cargo run -p coupled-logistic-lab --example run_config -- crates/lab/configs/basin_small_strength.toml`

use std::path::PathBuf;

use coupled_logistic_lab::commands::execute;
use coupled_logistic_lab::{LabResult, RunConfig};

fn main() -> LabResult<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/gamma_small_strength.toml")
    });
    let cfg = RunConfig::load(&path)?;
    let report = execute(&cfg)?;
    for line in &report.summary {
        println!("{line}");
    }
    println!("{}", serde_json::to_string_pretty(&report.manifest).expect("manifest serializes"));
    Ok(())
}
