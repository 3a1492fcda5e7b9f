//! Seeded random fixtures: eventually monotone allocation tables and
//! labelled own-signal slices for stress-testing the verifiers and the
//! implementability oracle.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mechanism::{for_each_own_slice, AllocationRule};
use crate::signal::{Grid, SIGNAL_TOL};
use crate::value::ValueModel;

/// Draws a random eventually monotone allocation rule for `model`.
///
/// Per agent and own-signal slice: tail allocations (strictly above the flat
/// threshold) are sorted draws from `[0, 1/n]`, and head allocations are
/// independent draws capped at the smallest tail value, so every tail point
/// dominates the whole head. Capping at `1/n` keeps every profile feasible
/// without cross-agent coordination.
pub fn random_em_rule(
    grid: &Grid,
    model: &ValueModel,
    rng: &mut ChaCha8Rng,
) -> Result<AllocationRule> {
    let n = model.n_agents();
    let cap = 1.0 / n as f64;
    let lat = grid.lattice(n)?;
    let mut tables = vec![vec![0.0; lat.total()]; n];
    let mut threshold_err = None;
    for (agent, table) in tables.iter_mut().enumerate() {
        for_each_own_slice(grid, n, agent, |base, stride, others| {
            if threshold_err.is_some() {
                return;
            }
            let threshold = match model.flat_threshold(agent, others) {
                Ok(t) => t,
                Err(e) => {
                    threshold_err = Some(e);
                    return;
                }
            };
            let tail_start = (0..grid.len())
                .find(|&k| grid.point(k) > threshold + SIGNAL_TOL)
                .unwrap_or(grid.len());
            let mut tail: Vec<f64> = (tail_start..grid.len())
                .map(|_| rng.random::<f64>() * cap)
                .collect();
            tail.sort_by(f64::total_cmp);
            let head_cap = tail.first().copied().unwrap_or(cap);
            for k in 0..tail_start {
                table[base + k * stride] = rng.random::<f64>() * head_cap;
            }
            for (j, &q) in tail.iter().enumerate() {
                table[base + (tail_start + j) * stride] = q;
            }
        });
        if let Some(e) = threshold_err {
            return Err(e);
        }
    }
    AllocationRule::from_tables(grid.clone(), tables, false)
}

/// One labelled own-signal slice: values with an exactly flat head and a
/// strictly increasing tail, allocations either eventually monotone or
/// carrying a planted violation with a comfortable margin.
#[derive(Debug, Clone)]
pub struct SliceCase {
    pub values: Vec<f64>,
    pub allocations: Vec<f64>,
    pub eventually_monotone: bool,
}

/// Draws a labelled slice of length `2..=max_len` (`max_len >= 2`).
///
/// Violations in non-monotone cases are planted with margin at least `1e-3`
/// in chained-constraint gain, far above the incentive tolerance, so the
/// label is unambiguous for both the direct check and the oracle.
pub fn random_slice_case(
    rng: &mut ChaCha8Rng,
    max_len: usize,
    eventually_monotone: bool,
) -> SliceCase {
    assert!(max_len >= 2, "slices need at least two points");
    let len = rng.random_range(2..=max_len);
    // Index of the last flat-head point. A planted violation needs at least
    // one tail point.
    let head_end = if eventually_monotone {
        rng.random_range(0..len)
    } else {
        rng.random_range(0..len - 1)
    };
    let base_value = rng.random::<f64>();
    let mut values = vec![base_value; len];
    for k in head_end + 1..len {
        values[k] = values[k - 1] + 0.01 + 0.5 * rng.random::<f64>();
    }

    let tail_len = len - head_end - 1;
    let mut allocations = vec![0.0; len];
    if eventually_monotone {
        let mut tail: Vec<f64> = (0..tail_len).map(|_| rng.random::<f64>()).collect();
        tail.sort_by(f64::total_cmp);
        let head_cap = tail.first().copied().unwrap_or(1.0);
        for slot in allocations.iter_mut().take(head_end + 1) {
            *slot = rng.random::<f64>() * head_cap;
        }
        allocations[head_end + 1..].copy_from_slice(&tail);
    } else if tail_len >= 2 && rng.random::<bool>() {
        // Variant: a strict decrease inside the tail.
        let mut tail: Vec<f64> = (0..tail_len)
            .map(|_| 0.3 + 0.7 * rng.random::<f64>())
            .collect();
        tail.sort_by(f64::total_cmp);
        let dip = rng.random_range(1..tail_len);
        tail[dip] = (tail[dip - 1] - 0.1 - 0.2 * rng.random::<f64>()).max(0.0);
        let head_cap = tail.iter().copied().fold(f64::INFINITY, f64::min).min(1.0);
        for slot in allocations.iter_mut().take(head_end + 1) {
            *slot = rng.random::<f64>() * head_cap;
        }
        allocations[head_end + 1..].copy_from_slice(&tail);
    } else {
        // Variant: the flat head exceeds the whole tail.
        let mut tail: Vec<f64> = (0..tail_len).map(|_| 0.4 * rng.random::<f64>()).collect();
        tail.sort_by(f64::total_cmp);
        for slot in allocations.iter_mut().take(head_end + 1) {
            *slot = 0.5 + 0.5 * rng.random::<f64>();
        }
        allocations[head_end + 1..].copy_from_slice(&tail);
    }
    SliceCase {
        values,
        allocations,
        eventually_monotone,
    }
}
