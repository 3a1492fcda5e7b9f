//! Revenue-optimal design: virtual values, quantile-space ironing, pointwise
//! optimal rules, and the virtual-surplus objective.
//!
//! The virtual value of agent `i` at profile `s` is
//!
//! ```text
//! J_i(s) = v_i(s) - (1 - F(s_i)) / f(s_i) * dv_i/ds_i
//! ```
//!
//! Expected revenue of any incentive compatible mechanism whose lowest own
//! signal earns zero utility equals the expectation of the allocated virtual
//! surplus, so revenue maximization is pointwise maximization of `J` — after
//! replacing each own-signal slice of `J` by its ironed version (the
//! derivative of the greatest convex minorant of its quantile-space
//! integral), which is what keeps the pointwise maximizer implementable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanism::{
    synthesize_payments, AllocationRule, Mechanism, PaymentBaseline, FEASIBILITY_TOL,
};
use crate::signal::{Grid, SignalDistribution, SIGNAL_TOL};
use crate::value::ValueModel;

/// Virtual values of at least `-SALE_TOL` count as profitable to serve.
pub const SALE_TOL: f64 = 1e-12;

/// Adjacent ironed values within this distance merge into one flat interval.
const FLAT_TOL: f64 = 1e-12;

/// The information-rent coefficient `coefficient * (1 - F(s)) / f(s)`.
pub fn adjusted_hazard(dist: &SignalDistribution, coefficient: f64, s: f64) -> Result<f64> {
    Ok(coefficient * dist.inverse_hazard(s)?)
}

/// Virtual value of one agent at one profile.
pub fn virtual_value(
    model: &ValueModel,
    dist: &SignalDistribution,
    agent: usize,
    profile: &[f64],
) -> Result<f64> {
    check_spaces(model, dist)?;
    let v = model.eval(agent, profile)?;
    let slope = model.own_subgradient(agent, profile)?;
    Ok(v - slope * dist.inverse_hazard(profile[agent])?)
}

fn check_spaces(model: &ValueModel, dist: &SignalDistribution) -> Result<()> {
    let m = model.space();
    let d = dist.space();
    if (m.lower() - d.lower()).abs() > SIGNAL_TOL || (m.upper() - d.upper()).abs() > SIGNAL_TOL {
        return Err(Error::GridMismatch(format!(
            "value model lives on [{}, {}], distribution on [{}, {}]",
            m.lower(),
            m.upper(),
            d.lower(),
            d.upper()
        )));
    }
    Ok(())
}

/// Dense table of per-agent virtual values over the profile lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualValueField {
    grid: Grid,
    n_agents: usize,
    values: Vec<Vec<f64>>,
}

impl VirtualValueField {
    /// Evaluates the virtual value of every agent at every grid profile.
    pub fn compute(model: &ValueModel, dist: &SignalDistribution, grid: &Grid) -> Result<Self> {
        check_spaces(model, dist)?;
        let n = model.n_agents();
        let lat = grid.lattice(n)?;
        let mut rent = Vec::with_capacity(grid.len());
        for k in 0..grid.len() {
            rent.push(dist.inverse_hazard(grid.point(k))?);
        }
        let mut values = vec![vec![0.0; lat.total()]; n];
        let mut coords = vec![0usize; n];
        let mut profile = vec![0.0; n];
        for flat in 0..lat.total() {
            lat.unflatten(flat, &mut coords);
            for (a, &c) in coords.iter().enumerate() {
                profile[a] = grid.point(c);
            }
            for (agent, table) in values.iter_mut().enumerate() {
                let v = model.eval_unchecked(agent, &profile);
                let slope = model.own_subgradient(agent, &profile)?;
                table[flat] = v - slope * rent[coords[agent]];
            }
        }
        Ok(Self {
            grid: grid.clone(),
            n_agents: n,
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn value(&self, agent: usize, flat: usize) -> f64 {
        self.values[agent][flat]
    }

    pub fn table(&self, agent: usize) -> &[f64] {
        &self.values[agent]
    }

    /// Irons every own-signal slice of every agent in quantile space.
    pub fn ironed_along_own(&self, dist: &SignalDistribution) -> Result<Self> {
        let lat = self.grid.lattice(self.n_agents)?;
        let mut out = self.values.clone();
        let mut raw = vec![0.0; self.grid.len()];
        for agent in 0..self.n_agents {
            let stride = lat.stride(agent);
            let mut others = vec![0usize; self.n_agents - 1];
            for sl in 0..lat.slice_count(agent) {
                let base = lat.slice_base(agent, sl, &mut others);
                for (k, slot) in raw.iter_mut().enumerate() {
                    *slot = self.values[agent][base + k * stride];
                }
                let curve = iron(&raw, self.grid.points(), dist)?;
                for (k, &v) in curve.values.iter().enumerate() {
                    out[agent][base + k * stride] = v;
                }
            }
        }
        Ok(Self {
            grid: self.grid.clone(),
            n_agents: self.n_agents,
            values: out,
        })
    }
}

/// A maximal interval (in signal units) on which an ironed curve is constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatInterval {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

/// An ironed one-dimensional curve over grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct IronedCurve {
    /// Grid points the curve is sampled on.
    pub points: Vec<f64>,
    /// Quantiles `F(point)` of those points.
    pub quantiles: Vec<f64>,
    /// Ironed curve values, nondecreasing along the points.
    pub values: Vec<f64>,
    /// Maximal constant runs of length at least two.
    pub flats: Vec<FlatInterval>,
}

/// Irons a curve sampled at `points`: replaces it by the derivative of the
/// greatest convex minorant of its cumulative integral in quantile space.
///
/// Each point owns the quantile cell reaching halfway to its neighbors, so a
/// curve that is already nondecreasing is reproduced exactly (every cell's
/// average is the point value itself) and the quantile-weighted mean is
/// always preserved.
pub fn iron(raw: &[f64], points: &[f64], dist: &SignalDistribution) -> Result<IronedCurve> {
    let m = raw.len();
    if m == 0 || points.len() != m {
        return Err(Error::Domain(format!(
            "ironing needs matching nonempty curves, got {} values over {} points",
            m,
            points.len()
        )));
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("ironing input must be finite".into()));
    }
    for w in points.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain(
                "ironing points must be strictly increasing".into(),
            ));
        }
    }
    let quantiles: Vec<f64> = points.iter().map(|&s| dist.cdf(s)).collect();
    if m == 1 {
        return Ok(IronedCurve {
            points: points.to_vec(),
            quantiles,
            values: raw.to_vec(),
            flats: Vec::new(),
        });
    }
    // Cell boundaries: each point owns the quantile interval up to the
    // midpoints towards its neighbors.
    let mut bounds = Vec::with_capacity(m + 1);
    bounds.push(quantiles[0]);
    for k in 1..m {
        bounds.push(0.5 * (quantiles[k - 1] + quantiles[k]));
    }
    bounds.push(quantiles[m - 1]);
    if bounds[m] - bounds[0] <= 0.0 {
        return Err(Error::Domain(
            "ironing points carry no probability mass under the distribution".into(),
        ));
    }
    // Cumulative integral at the boundaries.
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for k in 0..m {
        cum.push(cum[k] + raw[k] * (bounds[k + 1] - bounds[k]));
    }
    // Lower convex hull of (bounds, cum) by monotone chain; indices into
    // `bounds`. Duplicated boundary points (zero-width cells) coincide in
    // both coordinates and drop out as collinear.
    let cross = |a: usize, b: usize, c: usize| -> f64 {
        (bounds[b] - bounds[a]) * (cum[c] - cum[a]) - (bounds[c] - bounds[a]) * (cum[b] - cum[a])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(m + 1);
    for j in 0..=m {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], j) <= 0.0 {
            hull.pop();
        }
        hull.push(j);
    }
    // The ironed value on cell k is the slope of the hull segment over it.
    let mut values = vec![0.0; m];
    let mut seg = 0;
    for (k, slot) in values.iter_mut().enumerate() {
        while hull[seg + 1] <= k {
            seg += 1;
        }
        let (a, b) = (hull[seg], hull[seg + 1]);
        *slot = (cum[b] - cum[a]) / (bounds[b] - bounds[a]);
    }

    let mut flats = Vec::new();
    let mut run_start = 0;
    for k in 1..=m {
        if k == m || (values[k] - values[run_start]).abs() > FLAT_TOL {
            if k - run_start >= 2 {
                flats.push(FlatInterval {
                    start: points[run_start],
                    end: points[k - 1],
                    value: values[run_start],
                });
            }
            run_start = k;
        }
    }
    Ok(IronedCurve {
        points: points.to_vec(),
        quantiles,
        values,
        flats,
    })
}

/// A pointwise-optimal mechanism together with the fields that produced it.
#[derive(Debug, Clone)]
pub struct OptimalAuction {
    pub mechanism: Mechanism,
    /// Raw virtual values.
    pub virtual_values: VirtualValueField,
    /// Own-slice ironed virtual values actually maximized pointwise.
    pub ironed_virtual_values: VirtualValueField,
}

/// Serves whichever agent has the highest field value at each profile (ties
/// to the lowest index), keeping the object when every value is below zero.
fn pointwise_argmax_rule(field: &VirtualValueField) -> Result<AllocationRule> {
    let lat = field.grid().lattice(field.n_agents())?;
    let mut tables = vec![vec![0.0; lat.total()]; field.n_agents()];
    for flat in 0..lat.total() {
        let mut winner = 0;
        for agent in 1..field.n_agents() {
            if field.value(agent, flat) > field.value(winner, flat) {
                winner = agent;
            }
        }
        if field.value(winner, flat) >= -SALE_TOL {
            tables[winner][flat] = 1.0;
        }
    }
    AllocationRule::from_tables(field.grid().clone(), tables, false)
}

/// Revenue-maximizing mechanism for a value model that is strictly increasing
/// in the own signal: pointwise maximization of ironed virtual values.
///
/// Fails with [`Error::NotStrictlyIncreasing`] when the model has flat
/// regions in the own signal (use [`must_sell_constant_shares`] for those),
/// and with [`Error::NotEventuallyMonotone`] in the rare case where cross
/// effects make the ironed maximizer itself unimplementable.
pub fn optimal_strictly_increasing(
    model: &ValueModel,
    dist: &SignalDistribution,
    grid: &Grid,
) -> Result<OptimalAuction> {
    if !model.is_strictly_increasing_own() {
        return Err(Error::NotStrictlyIncreasing(model.label()));
    }
    let raw = VirtualValueField::compute(model, dist, grid)?;
    let ironed = raw.ironed_along_own(dist)?;
    let rule = pointwise_argmax_rule(&ironed)?;
    let mechanism = synthesize_payments(&rule, model, PaymentBaseline::BindingParticipation)?;
    Ok(OptimalAuction {
        mechanism,
        virtual_values: raw,
        ironed_virtual_values: ironed,
    })
}

/// Revenue-maximizing mechanism for additive models under a monotone hazard
/// rate: the agent with the smallest weighted information rent wins whenever
/// the best virtual value clears zero. No ironing is needed — the monotone
/// hazard makes every virtual-value slice nondecreasing already.
pub fn optimal_additive(
    model: &ValueModel,
    dist: &SignalDistribution,
    grid: &Grid,
) -> Result<OptimalAuction> {
    if model.additive_weights().is_none() {
        return Err(Error::InvalidModel(format!(
            "the closed-form optimal construction needs an additive model, got {}",
            model.label()
        )));
    }
    if let Some((at, before, after)) = dist.monotone_hazard_violation(grid)? {
        return Err(Error::NotMonotoneHazard { at, before, after });
    }
    let raw = VirtualValueField::compute(model, dist, grid)?;
    let rule = pointwise_argmax_rule(&raw)?;
    let mechanism = synthesize_payments(&rule, model, PaymentBaseline::BindingParticipation)?;
    Ok(OptimalAuction {
        mechanism,
        virtual_values: raw.clone(),
        ironed_virtual_values: raw,
    })
}

/// Must-sell mechanism with signal-independent shares summing to one, priced
/// at the binding-participation baseline.
///
/// Constant shares are trivially implementable for any value model; for
/// common-value max models this construction attains the must-sell optimum.
pub fn must_sell_constant_shares(
    model: &ValueModel,
    grid: &Grid,
    shares: &[f64],
) -> Result<Mechanism> {
    let total: f64 = shares.iter().sum();
    if (total - 1.0).abs() > FEASIBILITY_TOL {
        return Err(Error::InvalidRule(format!(
            "must-sell shares must sum to one, got {total}"
        )));
    }
    let rule = AllocationRule::constant_shares(grid.clone(), shares)?;
    synthesize_payments(&rule, model, PaymentBaseline::BindingParticipation)
}

/// Expected virtual surplus `E[sum_i q_i(s) J_i(s)]` of an allocation rule
/// under the signal distribution, by tensor-product trapezoid quadrature on
/// the rule's own grid.
///
/// For mechanisms priced at the binding-participation baseline this is the
/// quadrature counterpart of expected revenue.
pub fn revenue_objective(
    rule: &AllocationRule,
    model: &ValueModel,
    dist: &SignalDistribution,
) -> Result<f64> {
    let grid = rule.grid();
    let field = VirtualValueField::compute(model, dist, grid)?;
    if field.n_agents() != rule.n_agents() {
        return Err(Error::GridMismatch(format!(
            "rule covers {} agents, model {}",
            rule.n_agents(),
            field.n_agents()
        )));
    }
    let n = rule.n_agents();
    let lat = rule.lattice();
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
        let mut surplus = 0.0;
        for agent in 0..n {
            surplus += rule.value(agent, flat) * field.value(agent, flat);
        }
        total += weight * surplus;
    }
    Ok(total)
}
