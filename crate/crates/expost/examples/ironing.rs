//! Ironing: the monotone repair of a non-monotone virtual value curve.
//!
//! Pointwise maximization of raw virtual values can produce an allocation
//! that decreases in an agent's own signal, which is not implementable.
//! Ironing replaces the curve by the slope of the convex hull of its
//! cumulative quantile integral: the result is nondecreasing, preserves the
//! distribution-weighted mass, and is flat exactly where the original curve
//! needed averaging.
//!
//! Run with: `cargo run -p expost --example ironing`

use expost::design::iron;
use expost::{Grid, SignalDistribution, SignalSpace};

fn main() -> expost::Result<()> {
    let space = SignalSpace::unit();
    let dist = SignalDistribution::uniform(space);
    let grid = Grid::uniform(space, 41)?;

    // A curve with a hump: rises, dips, then rises again.
    let raw: Vec<f64> = grid
        .points()
        .iter()
        .map(|&s| 2.0 * s - 1.0 + 0.35 * (6.0 * s).sin())
        .collect();
    let ironed = iron(&raw, grid.points(), &dist)?;

    println!("signal   raw      ironed");
    for k in (0..grid.len()).step_by(4) {
        let marker = if (ironed.values[k] - raw[k]).abs() > 1e-9 {
            "  <- averaged"
        } else {
            ""
        };
        println!(
            "{:>6.3}  {:>7.3}  {:>7.3}{marker}",
            grid.point(k),
            raw[k],
            ironed.values[k]
        );
    }

    println!("\nflat intervals (where the hull averages the hump away):");
    for flat in &ironed.flats {
        println!(
            "  signals [{:.3}, {:.3}] pinned at {:.4}",
            flat.start, flat.end, flat.value
        );
    }
    assert!(
        !ironed.flats.is_empty(),
        "the hump must force a flat stretch"
    );

    // The repair is monotone, mass-preserving, and idempotent.
    assert!(ironed.values.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    let mass = |curve: &[f64]| -> f64 {
        (0..grid.len())
            .map(|k| curve[k] * dist.pdf(grid.point(k)) * grid.trapezoid_weight(k))
            .sum()
    };
    let (raw_mass, ironed_mass) = (mass(&raw), mass(&ironed.values));
    println!("\nweighted mass: raw {raw_mass:.6}, ironed {ironed_mass:.6}");
    assert!((raw_mass - ironed_mass).abs() < 1e-9);

    let twice = iron(&ironed.values, grid.points(), &dist)?;
    assert!(twice
        .values
        .iter()
        .zip(&ironed.values)
        .all(|(a, b)| (a - b).abs() < 1e-12));
    println!("ironing twice changes nothing (idempotent).");

    Ok(())
}
