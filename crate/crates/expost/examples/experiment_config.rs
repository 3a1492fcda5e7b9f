//! Experiment configs: the JSON-driven workflow behind the `expost` binary.
//!
//! A config names the environment (agents, value model, signal distribution,
//! grid) and one task; `run_experiment` executes it and writes CSV/JSON
//! results to an output directory. This example builds a config in code,
//! runs it, and walks the outputs — exactly what
//! `expost optimize --config cfg.json --out out/` does from the shell.
//!
//! Run with: `cargo run -p expost --example experiment_config`

use std::fs;

use expost::config::ExperimentConfig;
use expost::runner::run_experiment;

fn main() -> expost::Result<()> {
    let dir = std::env::temp_dir().join("expost_experiment_config_example");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir)?;

    // The optimal auction for two additive bidders, as a config file.
    let config_json = serde_json::json!({
        "n_agents": 2,
        "model": {"kind": "additive", "weights": [1.0, 1.0]},
        "distribution": {"kind": "uniform"},
        "resolution": 51,
        "seed": 3,
        "task": {
            "kind": "optimize",
            "objective": {"rule": "additive"},
            "n_samples": 50_000
        }
    });
    let config_path = dir.join("optimize.json");
    fs::write(
        &config_path,
        serde_json::to_string_pretty(&config_json).unwrap(),
    )?;

    let config = ExperimentConfig::load(&config_path)?;
    let out_dir = dir.join("out");
    let outcome = run_experiment(&config, &dir, &out_dir, None)?;

    println!(
        "task `{}` finished, violations found: {}",
        outcome.task, outcome.violations_found
    );
    println!("outputs in {}:", out_dir.display());
    for name in &outcome.files {
        let bytes = fs::metadata(out_dir.join(name))?.len();
        println!("  {name:<26} {bytes:>8} bytes");
    }

    // The run summary records the environment, tolerances, and results.
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json"))?)
            .expect("summary.json is valid JSON");
    println!(
        "\nobjective value (expected revenue): {}",
        summary["results"]["objective_value"]
    );
    println!(
        "Monte Carlo cross-check: {} +- {}",
        summary["results"]["monte_carlo"]["mean"], summary["results"]["monte_carlo"]["std_error"]
    );
    assert!(!outcome.violations_found);
    assert!(out_dir.join("allocation.csv").exists());
    assert!(out_dir.join("payments.csv").exists());

    Ok(())
}
