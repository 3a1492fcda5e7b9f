//! The implementability oracle: a certificate-producing check that a single
//! own-signal slice admits incentive compatible payments.
//!
//! Incentive constraints along a slice say `u(t) >= u(d) + (v_t - v_d) q_d`
//! for every truth `t` and deviation `d`. The oracle runs shortest paths on
//! this constraint graph: it either returns a feasible utility profile, or a
//! cycle of reports whose chained constraints force a strictly positive
//! utility gain around the loop — an impossibility any reader can replay.
//!
//! Run with: `cargo run -p expost --example implementability_oracle`

use expost::mechanism::{implementability_oracle, slice_is_eventually_monotone, OracleOutcome};

fn main() -> expost::Result<()> {
    // A flat head (common-value region) followed by an increasing tail.
    // The allocation dips inside the head — harmless, since the value does
    // not move there.
    let values = [1.0, 1.0, 1.0, 1.2, 1.5];
    let allocations = [0.9, 0.2, 0.6, 0.9, 1.0];
    match implementability_oracle(&values, &allocations, 1e-12)? {
        OracleOutcome::Feasible { utilities } => {
            println!("head dip is implementable; one utility profile:");
            for (k, u) in utilities.iter().enumerate() {
                println!(
                    "  v = {:.1}, q = {:.1}  ->  u = {u:.3}",
                    values[k], allocations[k]
                );
            }
        }
        OracleOutcome::Infeasible { .. } => unreachable!("slice is eventually monotone"),
    }
    assert!(slice_is_eventually_monotone(&values, &allocations));

    // The same dip placed in the tail, where the value strictly rises, kills
    // implementability. The oracle names the offending reports.
    let values = [1.0, 1.2, 1.5];
    let allocations = [0.2, 0.9, 0.6];
    match implementability_oracle(&values, &allocations, 1e-12)? {
        OracleOutcome::Feasible { .. } => unreachable!("tail dip is not implementable"),
        OracleOutcome::Infeasible { cycle, gain } => {
            println!("\ntail dip is not implementable; certificate cycle {cycle:?}:");
            // Replay the certificate: sum the incentive constraints around
            // the cycle. Utilities cancel, leaving a positive net gain that
            // no utility assignment can satisfy.
            let mut replayed = 0.0;
            for i in 0..cycle.len() {
                let d = cycle[i];
                let t = cycle[(i + 1) % cycle.len()];
                let step = (values[t] - values[d]) * allocations[d];
                println!(
                    "  truth {t} vs deviation {d}: u({t}) - u({d}) >= \
                     ({:.1} - {:.1}) * {:.1} = {step:+.2}",
                    values[t], values[d], allocations[d]
                );
                replayed += step;
            }
            println!("  chained around the cycle: 0 >= {replayed:.2} — impossible");
            assert!((replayed - gain).abs() < 1e-12);
            assert!(gain > 0.0);
        }
    }
    assert!(!slice_is_eventually_monotone(
        &[1.0, 1.2, 1.5],
        &[0.2, 0.9, 0.6]
    ));

    Ok(())
}
