//! Allocation rules, payment rules, and mechanisms as dense grid tables.
//!
//! An [`AllocationRule`] stores `q_i(s)` for every agent `i` and grid profile
//! `s`; a [`PaymentRule`] stores `p_i(s)`. A [`Mechanism`] pairs the two over
//! one grid. Verification ([`verify`]), payment synthesis ([`payments`]), the
//! slice-level implementability oracle ([`oracle`]), and seeded random rule
//! generators ([`random`]) live in the submodules and are re-exported here.

mod oracle;
mod payments;
pub mod random;
mod verify;

pub use oracle::{implementability_oracle, slice_is_eventually_monotone, OracleOutcome};
pub use payments::{synthesize_payments, utility, PaymentBaseline};
pub use verify::{
    check_eventual_monotonicity, verify_epic, verify_epir, weak_monotonicity_check, ReportKind,
    VerificationReport, Violation,
};

use crate::error::{Error, Result};
use crate::signal::{Grid, Lattice};

/// Slack allowed when validating feasibility sums and probability bounds of
/// imported tables (pure float round-off, far below any decision tolerance).
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A dense allocation table over a profile grid.
///
/// Invariants enforced at construction: every entry lies in `[0, 1]`, the
/// entries of each profile sum to at most one, and — when the rule is flagged
/// must-sell — to exactly one (all up to [`FEASIBILITY_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationRule {
    grid: Grid,
    n_agents: usize,
    must_sell: bool,
    q: Vec<Vec<f64>>,
}

impl AllocationRule {
    /// Wraps per-agent tables (each of length `grid.len()^n_agents`, row-major
    /// with agent 0 as the most significant axis) after validating feasibility.
    pub fn from_tables(grid: Grid, q: Vec<Vec<f64>>, must_sell: bool) -> Result<Self> {
        let n_agents = q.len();
        let lat = grid.lattice(n_agents)?;
        for (i, table) in q.iter().enumerate() {
            if table.len() != lat.total() {
                return Err(Error::InvalidRule(format!(
                    "agent {i} table has {} entries, grid has {}",
                    table.len(),
                    lat.total()
                )));
            }
        }
        for flat in 0..lat.total() {
            let mut sum = 0.0;
            for (i, table) in q.iter().enumerate() {
                let v = table[flat];
                if !v.is_finite() || !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&v) {
                    return Err(Error::InvalidRule(format!(
                        "allocation q_{i} = {v} at profile {flat} is outside [0, 1]"
                    )));
                }
                sum += v;
            }
            if sum > 1.0 + FEASIBILITY_TOL {
                return Err(Error::InvalidRule(format!(
                    "allocations at profile {flat} sum to {sum} > 1"
                )));
            }
            if must_sell && (sum - 1.0).abs() > FEASIBILITY_TOL {
                return Err(Error::InvalidRule(format!(
                    "must-sell rule leaves probability {sum} != 1 at profile {flat}"
                )));
            }
        }
        Ok(Self {
            grid,
            n_agents,
            must_sell,
            q,
        })
    }

    /// Builds a rule by evaluating `fill(profile, out)` at every grid profile.
    pub fn from_fn(
        grid: Grid,
        n_agents: usize,
        must_sell: bool,
        mut fill: impl FnMut(&[f64], &mut [f64]),
    ) -> Result<Self> {
        let lat = grid.lattice(n_agents)?;
        let mut q = vec![vec![0.0; lat.total()]; n_agents];
        let mut coords = vec![0usize; n_agents];
        let mut profile = vec![0.0; n_agents];
        let mut shares = vec![0.0; n_agents];
        for flat in 0..lat.total() {
            lat.unflatten(flat, &mut coords);
            for (a, &c) in coords.iter().enumerate() {
                profile[a] = grid.point(c);
            }
            fill(&profile, &mut shares);
            for (i, table) in q.iter_mut().enumerate() {
                table[flat] = shares[i];
            }
        }
        Self::from_tables(grid, q, must_sell)
    }

    /// Constant-share rule: agent `i` always receives `shares[i]`.
    pub fn constant_shares(grid: Grid, shares: &[f64]) -> Result<Self> {
        let total: f64 = shares.iter().sum();
        if shares.iter().any(|&c| c < 0.0 || !c.is_finite()) || total > 1.0 + FEASIBILITY_TOL {
            return Err(Error::InvalidRule(format!(
                "shares must be nonnegative and sum to at most one, got {shares:?}"
            )));
        }
        let must_sell = (total - 1.0).abs() <= FEASIBILITY_TOL;
        let shares = shares.to_vec();
        Self::from_fn(grid, shares.len(), must_sell, |_, out| {
            out.copy_from_slice(&shares);
        })
    }

    /// The object goes to the highest signal, ties to the lowest agent index.
    pub fn efficient_highest_signal(grid: Grid, n_agents: usize) -> Result<Self> {
        Self::from_fn(grid, n_agents, true, |profile, out| {
            out.fill(0.0);
            let mut winner = 0;
            for (j, &s) in profile.iter().enumerate() {
                if s > profile[winner] {
                    winner = j;
                }
            }
            out[winner] = 1.0;
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn must_sell(&self) -> bool {
        self.must_sell
    }

    pub fn lattice(&self) -> Lattice {
        self.grid
            .lattice(self.n_agents)
            .expect("validated at construction")
    }

    /// Allocation of agent `i` at the flattened profile index.
    pub fn value(&self, agent: usize, flat: usize) -> f64 {
        self.q[agent][flat]
    }

    pub fn table(&self, agent: usize) -> &[f64] {
        &self.q[agent]
    }
}

/// A dense payment table over a profile grid (same layout as allocations).
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentRule {
    grid: Grid,
    n_agents: usize,
    p: Vec<Vec<f64>>,
}

impl PaymentRule {
    /// Wraps per-agent payment tables after checking shape and finiteness.
    pub fn from_tables(grid: Grid, p: Vec<Vec<f64>>) -> Result<Self> {
        let n_agents = p.len();
        let lat = grid.lattice(n_agents)?;
        for (i, table) in p.iter().enumerate() {
            if table.len() != lat.total() {
                return Err(Error::InvalidRule(format!(
                    "agent {i} payment table has {} entries, grid has {}",
                    table.len(),
                    lat.total()
                )));
            }
            if let Some(v) = table.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidRule(format!(
                    "agent {i} payment table contains non-finite entry {v}"
                )));
            }
        }
        Ok(Self { grid, n_agents, p })
    }

    /// Builds a payment rule by evaluating `fill(profile, out)` everywhere.
    pub fn from_fn(
        grid: Grid,
        n_agents: usize,
        mut fill: impl FnMut(&[f64], &mut [f64]),
    ) -> Result<Self> {
        let lat = grid.lattice(n_agents)?;
        let mut p = vec![vec![0.0; lat.total()]; n_agents];
        let mut coords = vec![0usize; n_agents];
        let mut profile = vec![0.0; n_agents];
        let mut charges = vec![0.0; n_agents];
        for flat in 0..lat.total() {
            lat.unflatten(flat, &mut coords);
            for (a, &c) in coords.iter().enumerate() {
                profile[a] = grid.point(c);
            }
            fill(&profile, &mut charges);
            for (i, table) in p.iter_mut().enumerate() {
                table[flat] = charges[i];
            }
        }
        Self::from_tables(grid, p)
    }

    /// Everyone always pays zero.
    pub fn zero(grid: Grid, n_agents: usize) -> Result<Self> {
        let lat = grid.lattice(n_agents)?;
        Self::from_tables(grid, vec![vec![0.0; lat.total()]; n_agents])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn value(&self, agent: usize, flat: usize) -> f64 {
        self.p[agent][flat]
    }

    pub fn table(&self, agent: usize) -> &[f64] {
        &self.p[agent]
    }
}

/// An allocation rule paired with a payment rule over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    allocation: AllocationRule,
    payment: PaymentRule,
}

impl Mechanism {
    pub fn new(allocation: AllocationRule, payment: PaymentRule) -> Result<Self> {
        if allocation.grid() != payment.grid() {
            return Err(Error::GridMismatch(
                "allocation and payment rules use different grids".into(),
            ));
        }
        if allocation.n_agents() != payment.n_agents() {
            return Err(Error::GridMismatch(format!(
                "allocation covers {} agents, payments {}",
                allocation.n_agents(),
                payment.n_agents()
            )));
        }
        Ok(Self {
            allocation,
            payment,
        })
    }

    pub fn allocation(&self) -> &AllocationRule {
        &self.allocation
    }

    pub fn payment(&self) -> &PaymentRule {
        &self.payment
    }

    pub fn grid(&self) -> &Grid {
        self.allocation.grid()
    }

    pub fn n_agents(&self) -> usize {
        self.allocation.n_agents()
    }
}

/// Iterates one-dimensional own-signal slices of a profile table.
///
/// Calls `body(base, stride, others_values)` once per assignment of the other
/// agents' signals; the slice's flattened indices are `base + k * stride`.
pub(crate) fn for_each_own_slice(
    grid: &Grid,
    n_agents: usize,
    agent: usize,
    mut body: impl FnMut(usize, usize, &[f64]),
) {
    let lat = grid.lattice(n_agents).expect("validated at construction");
    let stride = lat.stride(agent);
    let mut others_idx = vec![0usize; n_agents - 1];
    let mut others_vals = vec![0.0; n_agents - 1];
    for sl in 0..lat.slice_count(agent) {
        let base = lat.slice_base(agent, sl, &mut others_idx);
        for (slot, &c) in others_idx.iter().enumerate() {
            others_vals[slot] = grid.point(c);
        }
        body(base, stride, &others_vals);
    }
}

/// Reconstructs the full profile of a slice point: the others' values in
/// ascending agent order with `own` spliced in at position `agent`.
pub(crate) fn splice_profile(agent: usize, own: f64, others: &[f64]) -> Vec<f64> {
    let mut profile = Vec::with_capacity(others.len() + 1);
    profile.extend_from_slice(&others[..agent]);
    profile.push(own);
    profile.extend_from_slice(&others[agent..]);
    profile
}
