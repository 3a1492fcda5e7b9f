//! Eventual monotonicity: the exact grid condition for an allocation rule to
//! admit ex-post incentive compatible payments.
//!
//! With interdependent values an agent's value can stay flat in their own
//! signal up to a threshold that depends on the others (for the pure common
//! value `v = max_j s_j`, the flat region is `s_i <= max_{j != i} s_j`).
//! Below that threshold the allocation may move freely; above it, each
//! allocation must dominate *every* lower point of the slice.
//!
//! Run with: `cargo run -p expost --example eventual_monotonicity`

use expost::{check_eventual_monotonicity, AllocationRule, Grid, SignalSpace, ValueModel};

fn main() -> expost::Result<()> {
    let grid = Grid::uniform(SignalSpace::unit(), 21)?;
    let model = ValueModel::max_signal(SignalSpace::unit(), 2)?;

    // A rule that wiggles below the flat threshold but is sorted above it.
    // Agent 0 gets a fluctuating share while their signal is below the
    // rival's, then a share that increases in the own signal.
    let wiggly = AllocationRule::from_fn(grid.clone(), 2, false, |s, q| {
        let flat_region = s[0] <= s[1];
        q[0] = if flat_region {
            0.15 + 0.1 * (8.0 * s[0]).sin()
        } else {
            0.3 + 0.5 * s[0]
        };
        q[1] = 0.0;
    })?;
    let report = check_eventual_monotonicity(&wiggly, &model)?;
    println!("wiggle below the threshold:\n  {}", report.summary());
    assert!(report.passed());

    // The same wiggle *above* the threshold breaks implementability: an agent
    // whose report moves the allocation down while their value is rising
    // cannot be made truthful by any payments.
    let broken = AllocationRule::from_fn(grid.clone(), 2, false, |s, q| {
        q[0] = if s[0] <= s[1] {
            0.1
        } else {
            0.5 + 0.2 * (10.0 * s[0]).cos()
        };
        q[1] = 0.0;
    })?;
    let report = check_eventual_monotonicity(&broken, &model)?;
    println!("wiggle above the threshold:\n  {}", report.summary());
    assert!(!report.passed());
    let worst = report
        .violations
        .iter()
        .max_by(|a, b| a.defect.total_cmp(&b.defect))
        .expect("failing report has violations");
    println!(
        "  worst violation: agent {} at profile {:?} is dominated by the report {:.3} \
         (allocation drops by {:.4})",
        worst.agent,
        worst.profile,
        worst.deviation.unwrap(),
        worst.defect
    );

    // Under private values every slice is increasing from the start, so the
    // condition collapses to plain monotonicity: the first rule now fails
    // because its head wiggle sits above the (empty) flat region.
    let private = ValueModel::private(SignalSpace::unit(), 2)?;
    let report = check_eventual_monotonicity(&wiggly, &private)?;
    println!("same rule under private values:\n  {}", report.summary());
    assert!(!report.passed());

    Ok(())
}
