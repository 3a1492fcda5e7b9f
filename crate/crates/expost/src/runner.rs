//! Executes experiment configs end to end: builds the environment, runs the
//! task, and writes result files plus a run summary to an output directory.
//!
//! Every output file except `summary.json` is byte-identical across reruns
//! of the same config and seed; `summary.json` additionally carries
//! wall-clock timings.

use std::fs::{self, File};
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use crate::config::{resolve, ExperimentConfig, ObjectiveSpec, RuleSpec, TaskSpec};
use crate::csvio;
use crate::design::{
    must_sell_constant_shares, optimal_additive, optimal_strictly_increasing, revenue_objective,
    OptimalAuction,
};
use crate::error::{Error, Result};
use crate::mechanism::{
    check_eventual_monotonicity, synthesize_payments, verify_epic, verify_epir,
    weak_monotonicity_check, AllocationRule, Mechanism, VerificationReport,
};
use crate::revenue::{
    compare_mechanisms, expected_revenue_mc, inclusive_posted_price_benchmark, ComparisonEntry,
    ConstantShareMaxSurface,
};
use crate::signal::{tolerance_summary, Grid};

/// Monte Carlo sample count used when a task leaves it unset.
pub const DEFAULT_SAMPLES: usize = 200_000;

/// Outcome of a run, for exit-code mapping and follow-up inspection.
#[derive(Debug)]
pub struct RunOutcome {
    /// Name of the task that ran.
    pub task: String,
    /// True when a verification found incentive or monotonicity violations.
    pub violations_found: bool,
    /// File names written to the output directory, `summary.json` last.
    pub files: Vec<String>,
}

/// Runs one experiment config.
///
/// Input paths inside the config resolve relative to `base_dir` (normally the
/// config file's directory); outputs land in `out_dir`, which is created if
/// missing. `seed_override` takes precedence over the config's seed.
pub fn run_experiment(
    config: &ExperimentConfig,
    base_dir: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<RunOutcome> {
    let start = Instant::now();
    config.validate()?;
    let grid = config.grid()?;
    let model = config.build_model()?;
    let dist = config.build_distribution(base_dir)?;
    let seed = seed_override.unwrap_or_else(|| config.seed());
    fs::create_dir_all(out_dir)?;

    let mut files = Vec::new();
    let (violations_found, results) = match &config.task {
        TaskSpec::Verify {
            allocation_csv,
            payments_csv,
            must_sell,
        } => {
            let rule = read_rule(base_dir, allocation_csv, &grid, config.n_agents, *must_sell)?;
            let mut reports = vec![
                check_eventual_monotonicity(&rule, &model)?,
                weak_monotonicity_check(&rule, &model)?,
            ];
            if let Some(payments_csv) = payments_csv {
                let payments =
                    csvio::read_payment_csv(open(base_dir, payments_csv)?, &grid, config.n_agents)?;
                let mechanism = Mechanism::new(rule, payments)?;
                reports.push(verify_epic(&mechanism, &model)?);
                reports.push(verify_epir(&mechanism, &model)?);
            }
            write_reports(out_dir, &reports, &mut files)?;
            let failed = reports.iter().any(|r| !r.passed());
            (failed, json!({ "reports": report_digest(&reports) }))
        }

        TaskSpec::Synthesize {
            allocation_csv,
            baseline,
        } => {
            let rule = read_rule(base_dir, allocation_csv, &grid, config.n_agents, false)?;
            let em = check_eventual_monotonicity(&rule, &model)?;
            if !em.passed() {
                let reports = vec![em];
                write_reports(out_dir, &reports, &mut files)?;
                (true, json!({ "reports": report_digest(&reports) }))
            } else {
                let mechanism = synthesize_payments(&rule, &model, baseline.unwrap_or_default())?;
                csvio::write_payment_csv(create(out_dir, "payments.csv")?, mechanism.payment())?;
                files.push("payments.csv".into());
                let reports = vec![
                    em,
                    verify_epic(&mechanism, &model)?,
                    verify_epir(&mechanism, &model)?,
                ];
                write_reports(out_dir, &reports, &mut files)?;
                let failed = reports.iter().any(|r| !r.passed());
                (failed, json!({ "reports": report_digest(&reports) }))
            }
        }

        TaskSpec::Optimize {
            objective,
            n_samples,
        } => {
            let (mechanism, auction) = match objective {
                ObjectiveSpec::StrictlyIncreasing => {
                    let auction = optimal_strictly_increasing(&model, &dist, &grid)?;
                    (auction.mechanism.clone(), Some(auction))
                }
                ObjectiveSpec::Additive => {
                    let auction = optimal_additive(&model, &dist, &grid)?;
                    (auction.mechanism.clone(), Some(auction))
                }
                ObjectiveSpec::MustSellShares { shares } => {
                    (must_sell_constant_shares(&model, &grid, shares)?, None)
                }
            };
            write_mechanism(out_dir, &mechanism, &mut files)?;
            if let Some(OptimalAuction {
                virtual_values,
                ironed_virtual_values,
                ..
            }) = &auction
            {
                csvio::write_virtual_values_csv(
                    create(out_dir, "virtual_values.csv")?,
                    virtual_values,
                )?;
                files.push("virtual_values.csv".into());
                csvio::write_virtual_values_csv(
                    create(out_dir, "ironed_virtual_values.csv")?,
                    ironed_virtual_values,
                )?;
                files.push("ironed_virtual_values.csv".into());
            }
            let objective_value = revenue_objective(mechanism.allocation(), &model, &dist)?;
            let estimate = expected_revenue_mc(
                &mechanism,
                &dist,
                n_samples.unwrap_or(DEFAULT_SAMPLES),
                seed,
            )?;
            (
                false,
                json!({
                    "objective_value": objective_value,
                    "monte_carlo": estimate,
                }),
            )
        }

        TaskSpec::Revenue {
            mechanisms,
            n_samples,
        } => {
            let mut built = Vec::with_capacity(mechanisms.len());
            for spec in mechanisms {
                let rule = match &spec.rule {
                    RuleSpec::ConstantShares { shares } => {
                        AllocationRule::constant_shares(grid.clone(), shares)?
                    }
                    RuleSpec::EfficientHighestSignal => {
                        AllocationRule::efficient_highest_signal(grid.clone(), config.n_agents)?
                    }
                    RuleSpec::AllocationCsv { path } => {
                        read_rule(base_dir, path, &grid, config.n_agents, false)?
                    }
                };
                built.push(synthesize_payments(
                    &rule,
                    &model,
                    spec.baseline.unwrap_or_default(),
                )?);
            }
            let entries: Vec<ComparisonEntry<'_>> = mechanisms
                .iter()
                .zip(&built)
                .map(|(spec, mechanism)| ComparisonEntry {
                    label: spec.label.clone(),
                    mechanism,
                })
                .collect();
            let table = compare_mechanisms(
                &entries,
                &model,
                &dist,
                n_samples.unwrap_or(DEFAULT_SAMPLES),
                seed,
            )?;
            csvio::write_comparison_csv(create(out_dir, "comparison.csv")?, &table)?;
            files.push("comparison.csv".into());
            write_json(out_dir, "comparison.json", &json!(&table))?;
            files.push("comparison.json".into());
            let failed = table.rows.iter().any(|r| !r.epic_pass || !r.epir_pass);
            (failed, json!(&table))
        }

        TaskSpec::Benchmark {
            n_agents_list,
            n_samples,
        } => {
            let list = n_agents_list.clone().unwrap_or_else(|| vec![2, 3, 4, 5]);
            if let Some(&n) = list.iter().find(|&&n| n < 2) {
                return Err(Error::Config(format!(
                    "benchmark needs at least two agents, got {n}"
                )));
            }
            let samples = n_samples.unwrap_or(DEFAULT_SAMPLES);
            let mut rows = Vec::with_capacity(list.len());
            for (k, &n) in list.iter().enumerate() {
                let shares = vec![1.0 / n as f64; n];
                let surface = ConstantShareMaxSurface::new(dist.space(), &shares)?;
                let estimate = expected_revenue_mc(&surface, &dist, samples, seed + k as u64)?;
                rows.push(json!({
                    "n_agents": n,
                    "posted_price": inclusive_posted_price_benchmark(&dist, n),
                    "must_sell_mean": estimate.mean,
                    "must_sell_std_error": estimate.std_error,
                    "n_samples": estimate.n_samples,
                }));
            }
            write_benchmark_csv(out_dir, &rows)?;
            files.push("benchmark.csv".into());
            (false, json!({ "rows": rows }))
        }
    };

    let summary = json!({
        "task": config.task.kind_name(),
        "n_agents": config.n_agents,
        "resolution": config.resolution(),
        "seed": seed,
        "model": model.label(),
        "distribution": dist.label(),
        "tolerances": tolerance_summary(),
        "violations_found": violations_found,
        "results": results,
        "files": files,
        "timings": { "total_ms": start.elapsed().as_secs_f64() * 1e3 },
    });
    write_json(out_dir, "summary.json", &summary)?;
    let mut files = files;
    files.push("summary.json".into());

    Ok(RunOutcome {
        task: config.task.kind_name().into(),
        violations_found,
        files,
    })
}

fn open(base_dir: &Path, path: &Path) -> Result<File> {
    let resolved = resolve(base_dir, path);
    File::open(&resolved)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", resolved.display())))
}

fn create(out_dir: &Path, name: &str) -> Result<File> {
    File::create(out_dir.join(name)).map_err(Error::from)
}

fn read_rule(
    base_dir: &Path,
    path: &Path,
    grid: &Grid,
    n_agents: usize,
    must_sell: bool,
) -> Result<AllocationRule> {
    csvio::read_allocation_csv(open(base_dir, path)?, grid, n_agents, must_sell)
}

fn write_json(out_dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut file = create(out_dir, name)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    use std::io::Write;
    writeln!(file)?;
    Ok(())
}

fn write_mechanism(out_dir: &Path, mechanism: &Mechanism, files: &mut Vec<String>) -> Result<()> {
    csvio::write_allocation_csv(create(out_dir, "allocation.csv")?, mechanism.allocation())?;
    files.push("allocation.csv".into());
    csvio::write_payment_csv(create(out_dir, "payments.csv")?, mechanism.payment())?;
    files.push("payments.csv".into());
    Ok(())
}

fn write_reports(
    out_dir: &Path,
    reports: &[VerificationReport],
    files: &mut Vec<String>,
) -> Result<()> {
    write_json(out_dir, "verification.json", &json!({ "reports": reports }))?;
    files.push("verification.json".into());
    Ok(())
}

/// Compact per-report lines for the run summary; the full violation lists
/// stay in `verification.json`.
fn report_digest(reports: &[VerificationReport]) -> serde_json::Value {
    json!(reports
        .iter()
        .map(|r| {
            json!({
                "kind": r.kind,
                "passed": r.passed(),
                "violations": r.violations.len(),
                "max_defect": r.max_defect,
                "checks": r.checks,
            })
        })
        .collect::<Vec<_>>())
}

fn write_benchmark_csv(out_dir: &Path, rows: &[serde_json::Value]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(out_dir, "benchmark.csv")?);
    writer.write_record([
        "n_agents",
        "posted_price",
        "must_sell_mean",
        "must_sell_std_error",
        "n_samples",
    ])?;
    for row in rows {
        writer.write_record([
            row["n_agents"].to_string(),
            row["posted_price"].as_f64().unwrap_or(f64::NAN).to_string(),
            row["must_sell_mean"]
                .as_f64()
                .unwrap_or(f64::NAN)
                .to_string(),
            row["must_sell_std_error"]
                .as_f64()
                .unwrap_or(f64::NAN)
                .to_string(),
            row["n_samples"].to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
