//! Revenue laboratory: expected-revenue estimates for payment surfaces, a
//! posted-price benchmark, and side-by-side mechanism comparisons.
//!
//! Monte Carlo estimation is fully deterministic given a seed: samples are
//! drawn in fixed-size batches, each from its own counter-derived stream, so
//! the estimate is byte-identical across runs and machines.

use serde::Serialize;

use crate::design::must_sell_constant_shares;
use crate::error::{Error, Result};
use crate::mechanism::{verify_epic, verify_epir, Mechanism};
use crate::signal::{SignalDistribution, SignalSpace};
use crate::value::ValueModel;

/// Samples per Monte Carlo batch; each batch owns one RNG stream.
const BATCH: usize = 1 << 16;

/// Total seller income as a function of the reported profile.
pub trait PaymentSurface {
    fn n_agents(&self) -> usize;
    fn space(&self) -> SignalSpace;
    /// Sum of all agents' payments at the profile.
    fn total_payment_at(&self, profile: &[f64]) -> f64;
}

/// Gridded mechanisms extend off-grid by multilinear interpolation of the
/// total-payment table.
impl PaymentSurface for Mechanism {
    fn n_agents(&self) -> usize {
        Mechanism::n_agents(self)
    }

    fn space(&self) -> SignalSpace {
        self.grid().space()
    }

    fn total_payment_at(&self, profile: &[f64]) -> f64 {
        let grid = self.grid();
        let n = Mechanism::n_agents(self);
        debug_assert_eq!(profile.len(), n);
        let m = grid.len();
        let lat = self.allocation().lattice();
        let space = grid.space();
        let h = grid.spacing();
        // Cell index and in-cell fraction per axis.
        let mut cell = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for (a, &s) in profile.iter().enumerate() {
            let t = ((s - space.lower()) / h).clamp(0.0, (m - 1) as f64);
            let c = (t.floor() as usize).min(m - 2);
            cell[a] = c;
            frac[a] = t - c as f64;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << n) {
            let mut weight = 1.0;
            let mut flat = 0;
            for a in 0..n {
                let bit = (corner >> a) & 1;
                weight *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                flat += (cell[a] + bit) * lat.stride(a);
            }
            if weight == 0.0 {
                continue;
            }
            let mut at_corner = 0.0;
            for agent in 0..n {
                at_corner += self.payment().value(agent, flat);
            }
            total += weight * at_corner;
        }
        total
    }
}

/// Exact payment surface of the must-sell constant-share mechanism under a
/// common-value max model: agent `i` always pays `shares[i]` times the
/// highest rival signal. Free of any grid, so Monte Carlo against it carries
/// no interpolation bias.
#[derive(Debug, Clone)]
pub struct ConstantShareMaxSurface {
    space: SignalSpace,
    shares: Vec<f64>,
}

impl ConstantShareMaxSurface {
    pub fn new(space: SignalSpace, shares: &[f64]) -> Result<Self> {
        if shares.len() < 2 {
            return Err(Error::InvalidRule(
                "the closed-form surface needs at least two agents".into(),
            ));
        }
        if (shares.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRule(
                "must-sell shares must sum to one".into(),
            ));
        }
        Ok(Self {
            space,
            shares: shares.to_vec(),
        })
    }
}

impl PaymentSurface for ConstantShareMaxSurface {
    fn n_agents(&self) -> usize {
        self.shares.len()
    }

    fn space(&self) -> SignalSpace {
        self.space
    }

    fn total_payment_at(&self, profile: &[f64]) -> f64 {
        let mut top = 0usize;
        for (j, &s) in profile.iter().enumerate() {
            if s > profile[top] {
                top = j;
            }
        }
        let mut second = f64::NEG_INFINITY;
        for (j, &s) in profile.iter().enumerate() {
            if j != top {
                second = second.max(s);
            }
        }
        let mut total = 0.0;
        for (i, &c) in self.shares.iter().enumerate() {
            total += c * if i == top { second } else { profile[top] };
        }
        total
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RevenueEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Seeded Monte Carlo estimate of expected total revenue.
pub fn expected_revenue_mc(
    surface: &dyn PaymentSurface,
    dist: &SignalDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<RevenueEstimate> {
    if n_samples == 0 {
        return Err(Error::Domain(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let n = surface.n_agents();
    let mut profile = vec![0.0; n];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut drawn = 0usize;
    let mut batch = 0u64;
    while drawn < n_samples {
        let mut rng = SignalDistribution::batch_rng(seed, batch);
        let this_batch = BATCH.min(n_samples - drawn);
        for _ in 0..this_batch {
            dist.fill_profile(&mut rng, &mut profile);
            let p = surface.total_payment_at(&profile);
            sum += p;
            sum_sq += p * p;
        }
        drawn += this_batch;
        batch += 1;
    }
    let mean = sum / n_samples as f64;
    let variance = if n_samples > 1 {
        ((sum_sq - n_samples as f64 * mean * mean) / (n_samples as f64 - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RevenueEstimate {
        mean,
        std_error: (variance / n_samples as f64).sqrt(),
        n_samples,
    })
}

/// Expected total revenue of a gridded mechanism by tensor-product trapezoid
/// quadrature on its own grid. Limited to three agents; beyond that the
/// tensor grid is too coarse to mean anything at desk scale — use
/// [`expected_revenue_mc`].
pub fn expected_revenue_quadrature(
    mechanism: &Mechanism,
    dist: &SignalDistribution,
) -> Result<f64> {
    let n = Mechanism::n_agents(mechanism);
    if n > 3 {
        return Err(Error::ResourceLimit(format!(
            "tensor quadrature supports up to 3 agents, got {n}; use Monte Carlo"
        )));
    }
    let grid = mechanism.grid();
    let lat = mechanism.allocation().lattice();
    let mut axis_weight = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        axis_weight.push(dist.pdf(grid.point(k)) * grid.trapezoid_weight(k));
    }
    let mut coords = vec![0usize; n];
    let mut total = 0.0;
    for flat in 0..lat.total() {
        lat.unflatten(flat, &mut coords);
        let mut weight = 1.0;
        for &c in &coords {
            weight *= axis_weight[c];
        }
        let mut payment = 0.0;
        for agent in 0..n {
            payment += mechanism.payment().value(agent, flat);
        }
        total += weight * payment;
    }
    Ok(total)
}

/// Expected revenue of the inclusive posted price: the seller posts the price
/// that every agent accepts in equilibrium, collecting the expectation of the
/// highest of `n_agents - 1` independent signals. Returns 0 for fewer than
/// two agents.
pub fn inclusive_posted_price_benchmark(dist: &SignalDistribution, n_agents: usize) -> f64 {
    if n_agents < 2 {
        return 0.0;
    }
    let space = dist.space();
    let cells = 20_000usize;
    let h = space.width() / cells as f64;
    let power = (n_agents - 1) as f64;
    let mut total = 0.0;
    let mut left = dist.cdf(space.lower()).powf(power);
    for k in 0..cells {
        let right_x = space.lower() + (k + 1) as f64 * h;
        let right = dist.cdf(right_x).powf(power);
        let mid = right_x - 0.5 * h;
        total += mid * (right - left);
        left = right;
    }
    total
}

/// Seeded Monte Carlo estimate of the expected `rank`-th highest of
/// `n_agents` independent signals (`rank = 1` is the maximum).
pub fn order_statistic_mean_mc(
    dist: &SignalDistribution,
    n_agents: usize,
    rank: usize,
    n_samples: usize,
    seed: u64,
) -> Result<RevenueEstimate> {
    if rank == 0 || rank > n_agents {
        return Err(Error::Domain(format!(
            "rank {rank} out of range for {n_agents} agents"
        )));
    }
    struct OrderStat {
        space: SignalSpace,
        n: usize,
        rank: usize,
    }
    impl PaymentSurface for OrderStat {
        fn n_agents(&self) -> usize {
            self.n
        }
        fn space(&self) -> SignalSpace {
            self.space
        }
        fn total_payment_at(&self, profile: &[f64]) -> f64 {
            let mut sorted = profile.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted[self.n - self.rank]
        }
    }
    let stat = OrderStat {
        space: dist.space(),
        n: n_agents,
        rank,
    };
    expected_revenue_mc(&stat, dist, n_samples, seed)
}

/// One labelled mechanism in a comparison run.
pub struct ComparisonEntry<'a> {
    pub label: String,
    pub mechanism: &'a Mechanism,
}

/// One row of a revenue comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub method: String,
    pub mean: f64,
    pub std_error: f64,
    pub epic_pass: bool,
    pub epir_pass: bool,
    pub max_ic_defect: f64,
    /// Lower edge of the three-standard-error band.
    pub revenue_min: f64,
    /// Upper edge of the three-standard-error band.
    pub revenue_max: f64,
}

/// Revenue and incentive summary of several mechanisms under one model.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Estimates revenue and verifies incentives for each entry. Entry `k` draws
/// its samples from seed `base_seed + k`, so rows never share randomness.
pub fn compare_mechanisms(
    entries: &[ComparisonEntry<'_>],
    model: &ValueModel,
    dist: &SignalDistribution,
    n_samples: usize,
    base_seed: u64,
) -> Result<ComparisonTable> {
    let mut rows = Vec::with_capacity(entries.len());
    for (k, entry) in entries.iter().enumerate() {
        let epic = verify_epic(entry.mechanism, model)?;
        let epir = verify_epir(entry.mechanism, model)?;
        let estimate = expected_revenue_mc(entry.mechanism, dist, n_samples, base_seed + k as u64)?;
        rows.push(ComparisonRow {
            label: entry.label.clone(),
            method: "monte-carlo".into(),
            mean: estimate.mean,
            std_error: estimate.std_error,
            epic_pass: epic.passed(),
            epir_pass: epir.passed(),
            max_ic_defect: epic.max_defect,
            revenue_min: estimate.mean - 3.0 * estimate.std_error,
            revenue_max: estimate.mean + 3.0 * estimate.std_error,
        });
    }
    Ok(ComparisonTable { rows })
}

/// Convenience: the must-sell constant-share mechanism *and* its exact
/// closed-form surface, for estimating with and without grid interpolation.
pub fn constant_share_pair(
    model: &ValueModel,
    grid: &crate::signal::Grid,
    shares: &[f64],
) -> Result<(Mechanism, ConstantShareMaxSurface)> {
    let mechanism = must_sell_constant_shares(model, grid, shares)?;
    let surface = ConstantShareMaxSurface::new(grid.space(), shares)?;
    Ok((mechanism, surface))
}
