//! Payment synthesis for eventually monotone allocation rules.
//!
//! Along every own-signal slice the truthful utility is pinned down (up to
//! the slice's constant) by the envelope recurrence
//!
//! ```text
//! u(k+1) = u(k) + (v(k+1) - v(k)) * q(k+1)
//! ```
//!
//! and payments follow as `p(k) = v(k) * q(k) - u(k)`. The right-endpoint
//! weight `q(k+1)` makes the discrete rule exactly incentive compatible for
//! every eventually monotone table, not merely up to discretization error:
//! it is the exact envelope integral of the left-continuous step
//! interpolation of the allocation slice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{
    check_eventual_monotonicity, for_each_own_slice, AllocationRule, Mechanism, PaymentRule,
};
use crate::value::ValueModel;

/// Pins the one free constant per own-signal slice of synthesized payments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaymentBaseline {
    /// No charge at the lowest own signal; utilities start at `q * v` there.
    Zero,
    /// Participation binds at the lowest own signal: utility starts at zero,
    /// which maximizes revenue among participation-respecting constants.
    BindingParticipation,
    /// Binding participation plus a flat extra charge on every type; positive
    /// amounts deliberately break participation (useful for testing).
    Shifted(f64),
}

impl Default for PaymentBaseline {
    fn default() -> Self {
        PaymentBaseline::BindingParticipation
    }
}

impl PaymentBaseline {
    /// Truthful utility assigned to the lowest own signal of a slice, given
    /// the allocation and value there.
    fn bottom_utility(self, q0: f64, v0: f64) -> f64 {
        match self {
            PaymentBaseline::Zero => q0 * v0,
            PaymentBaseline::BindingParticipation => 0.0,
            PaymentBaseline::Shifted(extra) => -extra,
        }
    }
}

/// Builds the unique (up to the baseline) ex-post incentive compatible
/// payment rule for an eventually monotone allocation rule.
///
/// Fails with [`Error::NotEventuallyMonotone`] when no incentive compatible
/// payments exist for the table.
pub fn synthesize_payments(
    rule: &AllocationRule,
    model: &ValueModel,
    baseline: PaymentBaseline,
) -> Result<Mechanism> {
    let em = check_eventual_monotonicity(rule, model)?;
    if let Some(worst) = em
        .violations
        .iter()
        .max_by(|a, b| a.defect.total_cmp(&b.defect))
    {
        return Err(Error::NotEventuallyMonotone {
            agent: worst.agent,
            profile: worst.profile.clone(),
            deviation: worst.deviation.unwrap_or(f64::NAN),
            defect: worst.defect,
        });
    }

    let grid = rule.grid();
    let n = rule.n_agents();
    let lat = rule.lattice();
    let mut tables = vec![vec![0.0; lat.total()]; n];
    for agent in 0..n {
        let q = rule.table(agent);
        let table = &mut tables[agent];
        let mut own_value = vec![0.0; grid.len()];
        for_each_own_slice(grid, n, agent, |base, stride, others| {
            let mut profile = super::splice_profile(agent, 0.0, others);
            for (k, slot) in own_value.iter_mut().enumerate() {
                profile[agent] = grid.point(k);
                *slot = model.eval_unchecked(agent, &profile);
            }
            let mut u = baseline.bottom_utility(q[base], own_value[0]);
            table[base] = own_value[0] * q[base] - u;
            for k in 1..grid.len() {
                u += (own_value[k] - own_value[k - 1]) * q[base + k * stride];
                table[base + k * stride] = own_value[k] * q[base + k * stride] - u;
            }
        });
    }
    let payment = PaymentRule::from_tables(grid.clone(), tables)?;
    Mechanism::new(rule.clone(), payment)
}

/// Truthful utility `v * q - p` of one agent at a grid profile.
pub fn utility(
    mechanism: &Mechanism,
    model: &ValueModel,
    agent: usize,
    profile: &[f64],
) -> Result<f64> {
    if profile.len() != mechanism.n_agents() {
        return Err(Error::Domain(format!(
            "profile has {} coordinates, mechanism covers {} agents",
            profile.len(),
            mechanism.n_agents()
        )));
    }
    let grid = mechanism.grid();
    let mut coords = Vec::with_capacity(profile.len());
    for &s in profile {
        coords.push(grid.index_of(s).ok_or_else(|| {
            Error::Domain(format!("signal {s} does not lie on the evaluation grid"))
        })?);
    }
    let flat = mechanism.allocation().lattice().flatten(&coords);
    let v = model.eval(agent, profile)?;
    Ok(v * mechanism.allocation().value(agent, flat) - mechanism.payment().value(agent, flat))
}
