//! Grid verifiers: eventual monotonicity, ex-post incentive compatibility,
//! ex-post participation, and pairwise weak monotonicity.
//!
//! Each verifier sweeps every one-dimensional own-signal slice of the table
//! and returns a [`VerificationReport`] listing the violations it found (at
//! most one per grid point, keeping the worst counterexample) together with
//! the largest defect observed anywhere, even when that defect stays inside
//! the tolerance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanism::{for_each_own_slice, splice_profile, AllocationRule, Mechanism};
use crate::signal::SIGNAL_TOL;
use crate::tol;
use crate::value::ValueModel;

/// Which property a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    EventualMonotonicity,
    ExPostIncentive,
    ExPostParticipation,
    WeakMonotonicity,
}

impl std::fmt::Display for ReportKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ReportKind::EventualMonotonicity => "eventual monotonicity",
            ReportKind::ExPostIncentive => "ex-post incentive compatibility",
            ReportKind::ExPostParticipation => "ex-post participation",
            ReportKind::WeakMonotonicity => "weak monotonicity",
        };
        f.write_str(name)
    }
}

/// One counterexample found by a verifier.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    /// Agent whose constraint fails.
    pub agent: usize,
    /// Profile at which the constraint is evaluated (truthful profile for
    /// incentive checks; the later/higher point for monotonicity checks).
    pub profile: Vec<f64>,
    /// Own-signal report that witnesses the failure, when the constraint
    /// compares two points of the same slice.
    pub deviation: Option<f64>,
    /// Size of the failure, in the units of the checked inequality.
    pub defect: f64,
    /// Whether the comparison starts at the first grid point above the flat
    /// threshold, where the boundary convention itself decides the outcome.
    pub at_threshold: bool,
}

/// Outcome of one verifier sweep.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub kind: ReportKind,
    /// Counterexamples whose defect exceeds `tolerance` (worst one per point).
    pub violations: Vec<Violation>,
    /// Largest defect seen anywhere, including defects inside the tolerance.
    pub max_defect: f64,
    /// Gate the defects were compared against.
    pub tolerance: f64,
    /// Points per grid axis during the sweep.
    pub grid_resolution: usize,
    /// Number of inequality comparisons performed.
    pub checks: usize,
}

impl VerificationReport {
    fn new(kind: ReportKind, tolerance: f64, grid_resolution: usize) -> Self {
        Self {
            kind,
            violations: Vec::new(),
            max_defect: 0.0,
            tolerance,
            grid_resolution,
            checks: 0,
        }
    }

    /// True when no violation exceeded the tolerance.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// One human-readable line: verdict, counts, worst defect.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} violations, max defect {:.3e}, tolerance {:.0e}, {} checks on a {}-point axis)",
            self.kind,
            if self.passed() { "PASS" } else { "FAIL" },
            self.violations.len(),
            self.max_defect,
            self.tolerance,
            self.checks,
            self.grid_resolution,
        )
    }

    fn observe(&mut self, defect: f64) -> bool {
        self.checks += 1;
        if defect > self.max_defect {
            self.max_defect = defect;
        }
        defect > self.tolerance
    }
}

fn check_shapes(
    grid_agents: usize,
    model: &ValueModel,
    grid_space: crate::SignalSpace,
) -> Result<()> {
    if model.n_agents() != grid_agents {
        return Err(Error::GridMismatch(format!(
            "value model covers {} agents, rule {}",
            model.n_agents(),
            grid_agents
        )));
    }
    let space = model.space();
    if (space.lower() - grid_space.lower()).abs() > SIGNAL_TOL
        || (space.upper() - grid_space.upper()).abs() > SIGNAL_TOL
    {
        return Err(Error::GridMismatch(format!(
            "value model lives on [{}, {}], rule grid on [{}, {}]",
            space.lower(),
            space.upper(),
            grid_space.lower(),
            grid_space.upper()
        )));
    }
    Ok(())
}

/// Checks eventual monotonicity: at every grid point strictly above the
/// model's flat threshold, the agent's allocation must be at least the
/// allocation at every lower grid point of the slice — including points at or
/// below the threshold. At and below the threshold itself the allocation may
/// move arbitrarily.
pub fn check_eventual_monotonicity(
    rule: &AllocationRule,
    model: &ValueModel,
) -> Result<VerificationReport> {
    check_shapes(rule.n_agents(), model, rule.grid().space())?;
    let grid = rule.grid();
    let mut report = VerificationReport::new(
        ReportKind::EventualMonotonicity,
        tol::ALLOCATION,
        grid.len(),
    );
    let mut threshold_err = None;
    for agent in 0..rule.n_agents() {
        let table = rule.table(agent);
        for_each_own_slice(grid, rule.n_agents(), agent, |base, stride, others| {
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
            // Running maximum over all points seen so far; only points above
            // the threshold are required to dominate it.
            let mut best: Option<(usize, f64)> = None;
            for k in 0..grid.len() {
                let own = grid.point(k);
                let q = table[base + k * stride];
                if own > threshold + SIGNAL_TOL {
                    if let Some((arg, max_q)) = best {
                        if report.observe(max_q - q) {
                            report.violations.push(Violation {
                                agent,
                                profile: splice_profile(agent, own, others),
                                deviation: Some(grid.point(arg)),
                                defect: max_q - q,
                                at_threshold: grid.point(arg) <= threshold + SIGNAL_TOL,
                            });
                        }
                    }
                }
                if best.map_or(true, |(_, max_q)| q > max_q) {
                    best = Some((k, q));
                }
            }
        });
    }
    if let Some(e) = threshold_err {
        return Err(e);
    }
    Ok(report)
}

/// Per-agent utility table of a mechanism under a value model: for each agent
/// the vector `u_i(s) = v_i(s) q_i(s) - p_i(s)` over flattened profiles.
fn utility_tables(mechanism: &Mechanism, model: &ValueModel) -> Vec<Vec<f64>> {
    let grid = mechanism.grid();
    let n = mechanism.n_agents();
    let lat = mechanism.allocation().lattice();
    let mut coords = vec![0usize; n];
    let mut profile = vec![0.0; n];
    let mut u = vec![vec![0.0; lat.total()]; n];
    for flat in 0..lat.total() {
        lat.unflatten(flat, &mut coords);
        for (a, &c) in coords.iter().enumerate() {
            profile[a] = grid.point(c);
        }
        for agent in 0..n {
            let v = model.eval_unchecked(agent, &profile);
            u[agent][flat] = v * mechanism.allocation().value(agent, flat)
                - mechanism.payment().value(agent, flat);
        }
    }
    u
}

/// Checks ex-post incentive compatibility: at every profile, reporting the
/// true own signal is within tolerance of the best own-signal report, holding
/// the others' reports fixed.
pub fn verify_epic(mechanism: &Mechanism, model: &ValueModel) -> Result<VerificationReport> {
    check_shapes(mechanism.n_agents(), model, mechanism.grid().space())?;
    let grid = mechanism.grid();
    let n = mechanism.n_agents();
    let mut report =
        VerificationReport::new(ReportKind::ExPostIncentive, tol::INCENTIVE, grid.len());
    for agent in 0..n {
        let q = mechanism.allocation().table(agent);
        let p = mechanism.payment().table(agent);
        let mut own_value = vec![0.0; grid.len()];
        for_each_own_slice(grid, n, agent, |base, stride, others| {
            let mut profile = splice_profile(agent, 0.0, others);
            for (k, slot) in own_value.iter_mut().enumerate() {
                profile[agent] = grid.point(k);
                *slot = model.eval_unchecked(agent, &profile);
            }
            for k_true in 0..grid.len() {
                let v_true = own_value[k_true];
                let u_true = v_true * q[base + k_true * stride] - p[base + k_true * stride];
                // Worst deviation for this truth.
                let mut worst: Option<(usize, f64)> = None;
                for k_dev in 0..grid.len() {
                    if k_dev == k_true {
                        continue;
                    }
                    let u_dev = v_true * q[base + k_dev * stride] - p[base + k_dev * stride];
                    let defect = u_dev - u_true;
                    if worst.map_or(true, |(_, d)| defect > d) {
                        worst = Some((k_dev, defect));
                    }
                }
                if let Some((k_dev, defect)) = worst {
                    if report.observe(defect) {
                        report.violations.push(Violation {
                            agent,
                            profile: splice_profile(agent, grid.point(k_true), others),
                            deviation: Some(grid.point(k_dev)),
                            defect,
                            at_threshold: false,
                        });
                    }
                }
            }
        });
    }
    Ok(report)
}

/// Checks ex-post participation: truthful utility is nonnegative everywhere.
pub fn verify_epir(mechanism: &Mechanism, model: &ValueModel) -> Result<VerificationReport> {
    check_shapes(mechanism.n_agents(), model, mechanism.grid().space())?;
    let grid = mechanism.grid();
    let lat = mechanism.allocation().lattice();
    let mut report =
        VerificationReport::new(ReportKind::ExPostParticipation, tol::INCENTIVE, grid.len());
    let u = utility_tables(mechanism, model);
    let mut coords = vec![0usize; mechanism.n_agents()];
    for (agent, table) in u.iter().enumerate() {
        for (flat, &u_val) in table.iter().enumerate() {
            if report.observe(-u_val) {
                lat.unflatten(flat, &mut coords);
                let profile: Vec<f64> = coords.iter().map(|&c| grid.point(c)).collect();
                report.violations.push(Violation {
                    agent,
                    profile,
                    deviation: None,
                    defect: -u_val,
                    at_threshold: false,
                });
            }
        }
    }
    Ok(report)
}

/// Checks pairwise weak monotonicity of an allocation rule against a value
/// model: along every own-signal slice, `(q(s'') - q(s'))(v(s'') - v(s'))`
/// must be nonnegative for every pair of points.
pub fn weak_monotonicity_check(
    rule: &AllocationRule,
    model: &ValueModel,
) -> Result<VerificationReport> {
    check_shapes(rule.n_agents(), model, rule.grid().space())?;
    let grid = rule.grid();
    let n = rule.n_agents();
    let mut report =
        VerificationReport::new(ReportKind::WeakMonotonicity, tol::INCENTIVE, grid.len());
    for agent in 0..n {
        let q = rule.table(agent);
        let mut own_value = vec![0.0; grid.len()];
        for_each_own_slice(grid, n, agent, |base, stride, others| {
            let mut profile = splice_profile(agent, 0.0, others);
            for (k, slot) in own_value.iter_mut().enumerate() {
                profile[agent] = grid.point(k);
                *slot = model.eval_unchecked(agent, &profile);
            }
            for hi in 1..grid.len() {
                let mut worst: Option<(usize, f64)> = None;
                for lo in 0..hi {
                    let product = (q[base + hi * stride] - q[base + lo * stride])
                        * (own_value[hi] - own_value[lo]);
                    if worst.map_or(true, |(_, d)| -product > d) {
                        worst = Some((lo, -product));
                    }
                }
                if let Some((lo, defect)) = worst {
                    if report.observe(defect) {
                        report.violations.push(Violation {
                            agent,
                            profile: splice_profile(agent, grid.point(hi), others),
                            deviation: Some(grid.point(lo)),
                            defect,
                            at_threshold: false,
                        });
                    }
                }
            }
        });
    }
    Ok(report)
}
