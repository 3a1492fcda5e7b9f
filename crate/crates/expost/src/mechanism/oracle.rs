//! Slice-level implementability oracle, independent of the monotonicity
//! characterization.
//!
//! Fix one agent and the others' signals, and list the agent's own-signal
//! grid points `k = 0..n` with values `v[k]` and allocations `q[k]`. Truthful
//! utilities `u[k]` support an incentive compatible payment rule on the slice
//! if and only if the difference constraints
//!
//! ```text
//! u[t] >= u[d] + (v[t] - v[d]) * q[d]    for every truth t and deviation d
//! ```
//!
//! admit a solution. The oracle decides this by running Bellman-Ford on the
//! complete digraph with edge cost `c(a -> b) = (v[b] - v[a]) * q[b]`: the
//! system is feasible exactly when that graph has no negative cycle, and the
//! shortest-path distances themselves are a valid utility profile. When a
//! negative cycle exists, walking it against the edge direction yields a
//! deviation cycle whose required utility gains sum to a positive number —
//! a self-contained certificate that no payments work.

use crate::error::{Error, Result};
use crate::tol;

/// Verdict of the oracle on one slice.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    /// Payments exist; `utilities` is one valid truthful-utility profile
    /// (shortest-path potentials of the constraint graph).
    Feasible { utilities: Vec<f64> },
    /// No payments exist. `cycle` lists slice indices `k_1, ..., k_r` such
    /// that chaining the incentive constraints around `k_1 -> k_2 -> ... ->
    /// k_r -> k_1` forces a total utility gain of `gain > 0` — impossible.
    Infeasible { cycle: Vec<usize>, gain: f64 },
}

impl OracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Feasible { .. })
    }
}

/// Required utility gain of the constraint "truth `t` against deviation `d`".
fn constraint_gain(values: &[f64], allocations: &[f64], d: usize, t: usize) -> f64 {
    (values[t] - values[d]) * allocations[d]
}

/// Decides whether any payment vector makes truth-telling optimal on one
/// own-signal slice, up to `tolerance` per constraint.
///
/// The tolerance absorbs floating-point noise: cycles whose gain stays below
/// it are treated as zero-gain (feasible), matching the incentive gate used
/// by the full-mechanism verifier.
pub fn implementability_oracle(
    values: &[f64],
    allocations: &[f64],
    tolerance: f64,
) -> Result<OracleOutcome> {
    let n = values.len();
    if n == 0 || allocations.len() != n {
        return Err(Error::Domain(format!(
            "slice needs matching nonempty values/allocations, got {} and {}",
            n,
            allocations.len()
        )));
    }
    if values
        .iter()
        .chain(allocations.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::Domain("slice entries must be finite".into()));
    }
    if !(0.0..f64::INFINITY).contains(&tolerance) {
        return Err(Error::Domain(format!(
            "tolerance must be nonnegative, got {tolerance}"
        )));
    }
    if n == 1 {
        return Ok(OracleOutcome::Feasible {
            utilities: vec![0.0],
        });
    }

    // Bellman-Ford from an implicit super-source: dist = 0 everywhere, then
    // relax all n(n-1) edges up to n rounds. An edge a -> b with cost
    // (v[b] - v[a]) * q[b] encodes u[a] >= u[b] + (v[a] - v[b]) * q[b].
    let mut dist = vec![0.0f64; n];
    let mut pred = vec![usize::MAX; n];
    let mut cycle_node = None;
    for round in 0..n {
        let mut relaxed = false;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let cost = (values[b] - values[a]) * allocations[b];
                if dist[a] + cost < dist[b] - tolerance {
                    dist[b] = dist[a] + cost;
                    pred[b] = a;
                    relaxed = true;
                    if round == n - 1 {
                        cycle_node = Some(b);
                    }
                }
            }
        }
        if !relaxed {
            break;
        }
    }

    let Some(start) = cycle_node else {
        return Ok(OracleOutcome::Feasible { utilities: dist });
    };

    // A relaxation in round n proves a negative cycle reachable through
    // `start`: walk predecessors n steps to land on the cycle, then collect
    // it. Predecessor order reverses the edges, which is exactly the
    // deviation order in which the incentive constraints chain up.
    if let Some(cycle) = pred_cycle(&pred, start, n) {
        let gain = cycle_gain(values, allocations, &cycle);
        if gain > 0.0 {
            return Ok(OracleOutcome::Infeasible { cycle, gain });
        }
    }
    // Fallback certificate: on a scalar slice, infeasibility always shows up
    // on some pair already — the chained pair constraints force
    // (v[b] - v[a]) * (q[a] - q[b]) > 0.
    let (pair, gain) = best_pair(values, allocations);
    debug_assert!(
        gain > 0.0,
        "negative cycle detected but no positive pair exists"
    );
    Ok(OracleOutcome::Infeasible {
        cycle: pair.to_vec(),
        gain,
    })
}

/// Walks the predecessor chain `steps` times from `start`, then collects the
/// cycle it landed on. Returns `None` if the chain dead-ends first.
fn pred_cycle(pred: &[usize], start: usize, steps: usize) -> Option<Vec<usize>> {
    let mut node = start;
    for _ in 0..steps {
        node = *pred.get(node)?;
    }
    let anchor = node;
    let mut cycle = vec![anchor];
    let mut walk = *pred.get(anchor)?;
    while walk != anchor {
        cycle.push(walk);
        walk = *pred.get(walk)?;
    }
    Some(cycle)
}

/// Total required utility gain around a deviation cycle.
fn cycle_gain(values: &[f64], allocations: &[f64], cycle: &[usize]) -> f64 {
    (0..cycle.len())
        .map(|j| {
            let d = cycle[j];
            let t = cycle[(j + 1) % cycle.len()];
            constraint_gain(values, allocations, d, t)
        })
        .sum()
}

/// The pair `(a, b)` whose two chained constraints force the largest total
/// utility gain, together with that gain.
fn best_pair(values: &[f64], allocations: &[f64]) -> ([usize; 2], f64) {
    let mut best = ([0, 0], f64::NEG_INFINITY);
    for a in 0..values.len() {
        for b in (a + 1)..values.len() {
            let gain = (values[b] - values[a]) * (allocations[a] - allocations[b]);
            if gain > best.1 {
                best = ([a, b], gain);
            }
        }
    }
    best
}

/// Checks eventual monotonicity of one own-signal slice directly from its
/// values: the flat head is the maximal prefix where the value stays at its
/// bottom level, and every point after it must dominate all earlier points.
///
/// For slices of a convex, nondecreasing value model (exactly flat head,
/// strictly increasing tail) this agrees with the implementability oracle.
pub fn slice_is_eventually_monotone(values: &[f64], allocations: &[f64]) -> bool {
    let n = values.len();
    if n == 0 || allocations.len() != n {
        return false;
    }
    let mut head_end = 0;
    while head_end + 1 < n && values[head_end + 1] - values[0] <= tol::VALUE {
        head_end += 1;
    }
    let mut run_max = f64::NEG_INFINITY;
    for k in 0..n {
        if k > head_end && allocations[k] < run_max - tol::ALLOCATION {
            return false;
        }
        run_max = run_max.max(allocations[k]);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_utilities(values: &[f64], allocations: &[f64], utilities: &[f64], slack: f64) {
        for t in 0..values.len() {
            for d in 0..values.len() {
                if t == d {
                    continue;
                }
                let required = utilities[d] + constraint_gain(values, allocations, d, t);
                assert!(
                    utilities[t] >= required - slack,
                    "constraint truth {t} vs deviation {d} fails: {} < {}",
                    utilities[t],
                    required
                );
            }
        }
    }

    #[test]
    fn monotone_slice_is_feasible_with_valid_potentials() {
        let values = [1.0, 1.0, 1.5, 2.0];
        let allocations = [0.2, 0.1, 0.4, 0.9];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        match outcome {
            OracleOutcome::Feasible { utilities } => {
                check_utilities(&values, &allocations, &utilities, 2.0 * tol::INCENTIVE)
            }
            OracleOutcome::Infeasible { .. } => panic!("slice is eventually monotone"),
        }
        assert!(slice_is_eventually_monotone(&values, &allocations));
    }

    #[test]
    fn decreasing_tail_is_infeasible_with_positive_cycle() {
        let values = [1.0, 1.5, 2.0];
        let allocations = [0.1, 0.9, 0.2];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        match outcome {
            OracleOutcome::Infeasible { cycle, gain } => {
                assert!(gain > tol::INCENTIVE);
                // Replay the certificate: the chained constraints force a
                // positive total gain around the cycle.
                let replay: f64 = (0..cycle.len())
                    .map(|j| {
                        let d = cycle[j];
                        let t = cycle[(j + 1) % cycle.len()];
                        (values[t] - values[d]) * allocations[d]
                    })
                    .sum();
                assert!((replay - gain).abs() < 1e-12);
            }
            OracleOutcome::Feasible { .. } => panic!("allocation drops on the strict tail"),
        }
        assert!(!slice_is_eventually_monotone(&values, &allocations));
    }

    #[test]
    fn head_above_tail_is_infeasible() {
        // The head allocation exceeds the tail: not eventually monotone and
        // not implementable, even though the tail itself is monotone.
        let values = [1.0, 1.0, 1.5];
        let allocations = [0.9, 0.9, 0.1];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        assert!(!outcome.is_feasible());
        assert!(!slice_is_eventually_monotone(&values, &allocations));
    }

    #[test]
    fn dip_at_flat_head_is_feasible() {
        // Arbitrary movement inside the flat head is implementable as long
        // as the tail dominates it.
        let values = [1.0, 1.0, 1.5];
        let allocations = [0.9, 0.0, 0.9];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        match outcome {
            OracleOutcome::Feasible { utilities } => {
                check_utilities(&values, &allocations, &utilities, 2.0 * tol::INCENTIVE)
            }
            OracleOutcome::Infeasible { .. } => panic!("flat-head dip is implementable"),
        }
        assert!(slice_is_eventually_monotone(&values, &allocations));
    }

    #[test]
    fn constant_values_accept_any_allocation() {
        let values = [2.0, 2.0, 2.0, 2.0];
        let allocations = [0.9, 0.1, 0.7, 0.3];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        assert!(outcome.is_feasible());
        assert!(slice_is_eventually_monotone(&values, &allocations));
    }

    #[test]
    fn tiny_defects_inside_the_tolerance_are_absorbed() {
        // A decrease of 1e-12 on the tail is float noise, not a violation.
        let values = [1.0, 1.5, 2.0];
        let allocations = [0.1, 0.5, 0.5 - 1e-12];
        let outcome = implementability_oracle(&values, &allocations, tol::INCENTIVE).unwrap();
        assert!(outcome.is_feasible());
    }

    #[test]
    fn singleton_and_malformed_slices() {
        assert!(implementability_oracle(&[1.0], &[0.4], 0.0)
            .unwrap()
            .is_feasible());
        assert!(implementability_oracle(&[1.0, 2.0], &[0.4], 0.0).is_err());
        assert!(implementability_oracle(&[], &[], 0.0).is_err());
        assert!(implementability_oracle(&[1.0, f64::NAN], &[0.1, 0.2], 0.0).is_err());
    }
}
