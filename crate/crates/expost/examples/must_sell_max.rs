//! Must-sell design under the pure common value: when the value `v = max_j
//! s_j` is flat in each agent's own signal below the rival maximum, no
//! strictly increasing machinery applies — yet constant shares are optimal
//! among must-sell mechanisms, and any share split earns the same revenue.
//!
//! Each agent pays their share priced at the highest rival signal, so total
//! revenue is a share-weighted blend of rival maxima. With every split the
//! seller collects the inclusive posted-price benchmark `E[max of n-1]`.
//!
//! Run with: `cargo run -p expost --example must_sell_max`

use expost::design::must_sell_constant_shares;
use expost::revenue::{
    expected_revenue_mc, inclusive_posted_price_benchmark, ConstantShareMaxSurface,
};
use expost::{verify_epic, verify_epir, Grid, SignalDistribution, SignalSpace, ValueModel};

fn main() -> expost::Result<()> {
    let space = SignalSpace::unit();
    let dist = SignalDistribution::uniform(space);

    for n in [2, 3, 5] {
        let model = ValueModel::max_signal(space, n)?;
        let grid = Grid::uniform(space, if n <= 2 { 101 } else { 11 })?;
        let shares = vec![1.0 / n as f64; n];
        let mechanism = must_sell_constant_shares(&model, &grid, &shares)?;
        assert!(verify_epic(&mechanism, &model)?.passed());
        assert!(verify_epir(&mechanism, &model)?.passed());

        // The exact closed-form payment surface (no grid interpolation)
        // drives the Monte Carlo estimate.
        let surface = ConstantShareMaxSurface::new(space, &shares)?;
        let estimate = expected_revenue_mc(&surface, &dist, 400_000, 7)?;
        let benchmark = inclusive_posted_price_benchmark(&dist, n);
        println!(
            "n = {n}: equal-share revenue {:.4} +- {:.4}, posted-price benchmark {:.4} \
             ((n-1)/n = {:.4})",
            estimate.mean,
            estimate.std_error,
            benchmark,
            (n as f64 - 1.0) / n as f64
        );
        assert!((estimate.mean - benchmark).abs() < 4.0 * estimate.std_error);
    }

    // Lopsided splits change who pays, not what the seller collects.
    let model = ValueModel::max_signal(space, 2)?;
    let grid = Grid::uniform(space, 101)?;
    println!("\nshare splits for n = 2 (all earn 1/2):");
    for shares in [[0.5, 0.5], [0.9, 0.1], [0.25, 0.75]] {
        must_sell_constant_shares(&model, &grid, &shares)?;
        let surface = ConstantShareMaxSurface::new(space, &shares)?;
        let estimate = expected_revenue_mc(&surface, &dist, 400_000, 11)?;
        println!(
            "  shares {shares:?}: revenue {:.4} +- {:.4}",
            estimate.mean, estimate.std_error
        );
        assert!((estimate.mean - 0.5).abs() < 4.0 * estimate.std_error);
    }

    Ok(())
}
