//! Pinned CSV formats for grid tables and comparison results.
//!
//! Profile tables use one row per grid profile in row-major order (agent 0 is
//! the most significant axis): signal columns `s_1..s_n` followed by one
//! value column per agent (`q_*` allocations, `p_*` payments, `J_*` virtual
//! values). Imports accept rows in any order but demand exact grid coverage:
//! every profile appears exactly once, every signal sits on a grid point.

use std::io::{Read, Write};

use crate::design::VirtualValueField;
use crate::error::{Error, Result};
use crate::mechanism::{AllocationRule, PaymentRule};
use crate::revenue::ComparisonTable;
use crate::signal::{Grid, SignalDistribution};

fn header_for(grid_agents: usize, prefix: &str) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * grid_agents);
    for i in 1..=grid_agents {
        h.push(format!("s_{i}"));
    }
    for i in 1..=grid_agents {
        h.push(format!("{prefix}_{i}"));
    }
    h
}

fn write_table<W: Write>(out: W, grid: &Grid, prefix: &str, tables: &[&[f64]]) -> Result<()> {
    let n = tables.len();
    let lat = grid.lattice(n)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header_for(n, prefix))?;
    let mut coords = vec![0usize; n];
    let mut record = Vec::with_capacity(2 * n);
    for flat in 0..lat.total() {
        lat.unflatten(flat, &mut coords);
        record.clear();
        for &c in &coords {
            record.push(grid.point(c).to_string());
        }
        for table in tables {
            record.push(table[flat].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn read_table<R: Read>(
    input: R,
    grid: &Grid,
    n_agents: usize,
    prefix: &str,
) -> Result<Vec<Vec<f64>>> {
    let lat = grid.lattice(n_agents)?;
    let mut r = csv::Reader::from_reader(input);
    let expected = header_for(n_agents, prefix);
    let got: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if got != expected {
        return Err(Error::Domain(format!(
            "csv header mismatch: expected {expected:?}, got {got:?}"
        )));
    }
    let mut tables = vec![vec![0.0; lat.total()]; n_agents];
    let mut seen = vec![false; lat.total()];
    let mut coords = vec![0usize; n_agents];
    for (row_idx, record) in r.records().enumerate() {
        let record = record?;
        let line = row_idx + 2; // header is line 1
        if record.len() != 2 * n_agents {
            return Err(Error::Domain(format!(
                "csv line {line}: expected {} fields, got {}",
                2 * n_agents,
                record.len()
            )));
        }
        let parse = |idx: usize| -> Result<f64> {
            record[idx].trim().parse::<f64>().map_err(|_| {
                Error::Domain(format!(
                    "csv line {line}: field {:?} is not a number",
                    &record[idx]
                ))
            })
        };
        for a in 0..n_agents {
            let s = parse(a)?;
            coords[a] = grid.index_of(s).ok_or_else(|| {
                Error::Domain(format!("csv line {line}: signal {s} is not a grid point"))
            })?;
        }
        let flat = lat.flatten(&coords);
        if seen[flat] {
            return Err(Error::Domain(format!("csv line {line}: duplicate profile")));
        }
        seen[flat] = true;
        for (a, table) in tables.iter_mut().enumerate() {
            table[flat] = parse(n_agents + a)?;
        }
    }
    let missing = seen.iter().filter(|&&s| !s).count();
    if missing > 0 {
        return Err(Error::Domain(format!(
            "csv covers {} of {} grid profiles ({missing} missing)",
            lat.total() - missing,
            lat.total()
        )));
    }
    Ok(tables)
}

/// Writes an allocation table (`s_*` then `q_*` columns).
pub fn write_allocation_csv<W: Write>(out: W, rule: &AllocationRule) -> Result<()> {
    let tables: Vec<&[f64]> = (0..rule.n_agents()).map(|a| rule.table(a)).collect();
    write_table(out, rule.grid(), "q", &tables)
}

/// Reads an allocation table and validates feasibility and grid coverage.
pub fn read_allocation_csv<R: Read>(
    input: R,
    grid: &Grid,
    n_agents: usize,
    must_sell: bool,
) -> Result<AllocationRule> {
    let tables = read_table(input, grid, n_agents, "q")?;
    AllocationRule::from_tables(grid.clone(), tables, must_sell)
}

/// Writes a payment table (`s_*` then `p_*` columns).
pub fn write_payment_csv<W: Write>(out: W, payments: &PaymentRule) -> Result<()> {
    let tables: Vec<&[f64]> = (0..payments.n_agents())
        .map(|a| payments.table(a))
        .collect();
    write_table(out, payments.grid(), "p", &tables)
}

/// Reads a payment table covering the whole grid.
pub fn read_payment_csv<R: Read>(input: R, grid: &Grid, n_agents: usize) -> Result<PaymentRule> {
    let tables = read_table(input, grid, n_agents, "p")?;
    PaymentRule::from_tables(grid.clone(), tables)
}

/// Writes a virtual-value field (`s_*` then `J_*` columns).
pub fn write_virtual_values_csv<W: Write>(out: W, field: &VirtualValueField) -> Result<()> {
    let tables: Vec<&[f64]> = (0..field.n_agents()).map(|a| field.table(a)).collect();
    write_table(out, field.grid(), "J", &tables)
}

/// Reads a tabulated CDF from two columns `signal,cdf`; the header row is
/// optional. Knots must be strictly increasing with the CDF running 0 to 1.
pub fn read_tabulated_cdf<R: Read>(input: R) -> Result<SignalDistribution> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(input);
    let mut knots = Vec::new();
    for (row_idx, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Domain(format!(
                "cdf line {}: expected 2 fields, got {}",
                row_idx + 1,
                record.len()
            )));
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(pair) => knots.push((pair[0], pair[1])),
            Err(_) if row_idx == 0 => continue, // header row
            Err(_) => {
                return Err(Error::Domain(format!(
                    "cdf line {}: fields {:?} are not numbers",
                    row_idx + 1,
                    record
                )))
            }
        }
    }
    SignalDistribution::tabulated_cdf(&knots)
}

/// Writes a comparison table with the pinned seven columns.
pub fn write_comparison_csv<W: Write>(out: W, table: &ComparisonTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "method",
        "mean",
        "std_error",
        "epic_pass",
        "epir_pass",
        "max_ic_defect",
    ])?;
    for row in &table.rows {
        w.write_record([
            row.label.clone(),
            row.method.clone(),
            row.mean.to_string(),
            row.std_error.to_string(),
            row.epic_pass.to_string(),
            row.epir_pass.to_string(),
            row.max_ic_defect.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
