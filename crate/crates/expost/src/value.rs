//! Interdependent value models.
//!
//! Each agent's value for the object is a function of the whole signal
//! profile that is, in own signal, nondecreasing and convex. Four families are
//! built in: private values, weighted sums, the common maximum, and a custom
//! piecewise-linear convex curve of the own signal plus a max/sum/constant
//! composition of the others' signals.
//!
//! Because own-value curves may start flat, each agent has a *flat threshold*
//! for every profile of the others: the largest own signal at which the value
//! still equals the bottom value. Allocation monotonicity is only meaningful
//! above that threshold; everything downstream (the eventual-monotonicity
//! check, payment synthesis) keys off [`ValueModel::flat_threshold`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::{Grid, SignalSpace, SIGNAL_TOL};
use crate::tol;

/// A convex piecewise-linear curve of the own signal, anchored at value 0 at
/// the lower end of the space, described by `(breakpoint, slope)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
}

impl PiecewiseLinear {
    /// Validates the pieces: breakpoints strictly increasing starting at
    /// `lower`, slopes finite, nonnegative, and nondecreasing (convexity);
    /// decreasing slopes are rejected at load time.
    pub fn new(space: SignalSpace, pieces: &[(f64, f64)]) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidModel(
                "piecewise curve needs at least one piece".into(),
            ));
        }
        let mut breakpoints = Vec::with_capacity(pieces.len());
        let mut slopes = Vec::with_capacity(pieces.len());
        for (i, &(b, g)) in pieces.iter().enumerate() {
            if !b.is_finite() || !g.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "piece {i} is not finite: ({b}, {g})"
                )));
            }
            if g < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "piece {i} has negative slope {g}"
                )));
            }
            if let Some(&prev) = slopes.last() {
                if g < prev {
                    return Err(Error::InvalidModel(format!(
                        "slopes must be nondecreasing (convexity); piece {i} drops from {prev} to {g}"
                    )));
                }
            }
            if let Some(&prev) = breakpoints.last() {
                if b <= prev {
                    return Err(Error::InvalidModel(format!(
                        "breakpoints must be strictly increasing; piece {i} has {b} after {prev}"
                    )));
                }
            } else if (b - space.lower()).abs() > SIGNAL_TOL {
                return Err(Error::InvalidModel(format!(
                    "first breakpoint must sit at the lower end {} of the space, got {b}",
                    space.lower()
                )));
            }
            if b > space.upper() + SIGNAL_TOL {
                return Err(Error::InvalidModel(format!(
                    "breakpoint {b} lies above the upper end {} of the space",
                    space.upper()
                )));
            }
            breakpoints.push(b);
            slopes.push(g);
        }
        breakpoints[0] = space.lower();
        Ok(Self {
            breakpoints,
            slopes,
        })
    }

    /// Curve value at `x` (0 at the first breakpoint).
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for k in 0..self.breakpoints.len() {
            let start = self.breakpoints[k];
            if x <= start {
                break;
            }
            let end = self
                .breakpoints
                .get(k + 1)
                .copied()
                .unwrap_or(f64::INFINITY);
            v += self.slopes[k] * (x.min(end) - start);
        }
        v
    }

    /// Slope of the piece to the right of `x`.
    pub fn right_slope(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        self.slopes[k.saturating_sub(1).min(self.slopes.len() - 1)]
    }

    /// Slope of the piece to the left of `x`.
    pub fn left_slope(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < x);
        self.slopes[k.saturating_sub(1).min(self.slopes.len() - 1)]
    }

    /// Start of the first strictly rising piece, if any.
    fn first_rising_breakpoint(&self) -> Option<f64> {
        self.slopes
            .iter()
            .position(|&g| g > 0.0)
            .map(|k| self.breakpoints[k])
    }
}

/// Shift of a custom own-value curve by the others' signals:
/// `constant + max_coeff * max(others) + sum_coeff * sum(others)`.
/// The max over an empty set of others contributes 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OthersShift {
    pub constant: f64,
    pub max_coeff: f64,
    pub sum_coeff: f64,
}

impl OthersShift {
    pub const NONE: Self = Self {
        constant: 0.0,
        max_coeff: 0.0,
        sum_coeff: 0.0,
    };

    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            max_coeff: 0.0,
            sum_coeff: 0.0,
        }
    }

    fn eval(&self, profile: &[f64], own: usize) -> f64 {
        let mut max_others = f64::NEG_INFINITY;
        let mut sum_others = 0.0;
        for (j, &s) in profile.iter().enumerate() {
            if j != own {
                max_others = max_others.max(s);
                sum_others += s;
            }
        }
        if !max_others.is_finite() {
            max_others = 0.0;
        }
        self.constant + self.max_coeff * max_others + self.sum_coeff * sum_others
    }
}

/// Built-in value families.
#[derive(Debug, Clone, PartialEq)]
enum ValueFamily {
    /// v_i = s_i.
    Private,
    /// v_i = sum_j weights[j] * s_j (one common weight vector).
    Additive { weights: Vec<f64> },
    /// v_i = max_j s_j.
    MaxSignal,
    /// v_i = curve(s_i) + shift(others).
    Custom {
        own: PiecewiseLinear,
        shift: OthersShift,
    },
}

/// An interdependent value model over a common signal space.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueModel {
    space: SignalSpace,
    n_agents: usize,
    family: ValueFamily,
}

impl ValueModel {
    /// Private values: each agent values the object at their own signal.
    pub fn private(space: SignalSpace, n_agents: usize) -> Result<Self> {
        Self::build(space, n_agents, ValueFamily::Private)
    }

    /// Weighted-sum values with a common weight vector (entry j weighs signal j).
    pub fn additive(space: SignalSpace, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidModel(format!(
                "additive weights must be finite and nonnegative, got {weights:?}"
            )));
        }
        Self::build(
            space,
            weights.len(),
            ValueFamily::Additive {
                weights: weights.to_vec(),
            },
        )
    }

    /// Pure common value: everyone values the object at the highest signal.
    pub fn max_signal(space: SignalSpace, n_agents: usize) -> Result<Self> {
        Self::build(space, n_agents, ValueFamily::MaxSignal)
    }

    /// Custom model: convex piecewise-linear curve of the own signal plus a
    /// max/sum/constant composition of the others' signals.
    pub fn custom(
        space: SignalSpace,
        n_agents: usize,
        pieces: &[(f64, f64)],
        shift: OthersShift,
    ) -> Result<Self> {
        let own = PiecewiseLinear::new(space, pieces)?;
        Self::build(space, n_agents, ValueFamily::Custom { own, shift })
    }

    fn build(space: SignalSpace, n_agents: usize, family: ValueFamily) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::InvalidModel("need at least one agent".into()));
        }
        Ok(Self {
            space,
            n_agents,
            family,
        })
    }

    pub fn space(&self) -> SignalSpace {
        self.space
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Short human-readable label for reports.
    pub fn label(&self) -> String {
        match &self.family {
            ValueFamily::Private => "private".into(),
            ValueFamily::Additive { weights } => format!("additive{weights:?}"),
            ValueFamily::MaxSignal => "max-signal".into(),
            ValueFamily::Custom { own, .. } => {
                format!("custom ({} pieces)", own.slopes.len())
            }
        }
    }

    fn check_agent_profile(&self, agent: usize, profile: &[f64]) -> Result<()> {
        if agent >= self.n_agents {
            return Err(Error::Domain(format!(
                "agent {agent} out of range for {} agents",
                self.n_agents
            )));
        }
        if profile.len() != self.n_agents {
            return Err(Error::Domain(format!(
                "profile has {} coordinates, model has {} agents",
                profile.len(),
                self.n_agents
            )));
        }
        self.space.check_profile(profile)
    }

    /// Agent `agent`'s value at `profile`.
    pub fn eval(&self, agent: usize, profile: &[f64]) -> Result<f64> {
        self.check_agent_profile(agent, profile)?;
        Ok(self.eval_unchecked(agent, profile))
    }

    /// Same as [`eval`](Self::eval) without domain validation; used in grid
    /// sweeps where profiles are grid points by construction.
    pub fn eval_unchecked(&self, agent: usize, profile: &[f64]) -> f64 {
        match &self.family {
            ValueFamily::Private => profile[agent],
            ValueFamily::Additive { weights } => {
                profile.iter().zip(weights).map(|(s, w)| s * w).sum()
            }
            ValueFamily::MaxSignal => profile.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ValueFamily::Custom { own, shift } => {
                own.eval(profile[agent]) + shift.eval(profile, agent)
            }
        }
    }

    /// Subgradient of agent `agent`'s value in their own signal.
    ///
    /// Fixed selection rule: the right derivative everywhere except at the
    /// upper end of the space, where the left derivative is used. Payments do
    /// not depend on the selection (the value curve is convex, so one-sided
    /// derivatives disagree only at countably many kinks).
    pub fn own_subgradient(&self, agent: usize, profile: &[f64]) -> Result<f64> {
        self.check_agent_profile(agent, profile)?;
        let s = profile[agent];
        let at_top = s >= self.space.upper() - SIGNAL_TOL;
        Ok(match &self.family {
            ValueFamily::Private => 1.0,
            ValueFamily::Additive { weights } => weights[agent],
            ValueFamily::MaxSignal => {
                let mut max_others = f64::NEG_INFINITY;
                for (j, &x) in profile.iter().enumerate() {
                    if j != agent {
                        max_others = max_others.max(x);
                    }
                }
                if !max_others.is_finite() {
                    // Single agent: value is the own signal.
                    1.0
                } else if at_top {
                    if s > max_others + SIGNAL_TOL {
                        1.0
                    } else {
                        0.0
                    }
                } else if s >= max_others - SIGNAL_TOL {
                    1.0
                } else {
                    0.0
                }
            }
            ValueFamily::Custom { own, .. } => {
                if at_top {
                    own.left_slope(s)
                } else {
                    own.right_slope(s)
                }
            }
        })
    }

    /// The flat threshold of agent `agent` given the others' signals: the
    /// largest own signal at which the value still equals its bottom value.
    ///
    /// `others` lists the remaining agents' signals in ascending agent order
    /// (length `n_agents - 1`). Computed in closed form per family.
    pub fn flat_threshold(&self, agent: usize, others: &[f64]) -> Result<f64> {
        if agent >= self.n_agents {
            return Err(Error::Domain(format!(
                "agent {agent} out of range for {} agents",
                self.n_agents
            )));
        }
        if others.len() + 1 != self.n_agents {
            return Err(Error::Domain(format!(
                "expected {} other signals, got {}",
                self.n_agents - 1,
                others.len()
            )));
        }
        self.space.check_profile(others)?;
        Ok(match &self.family {
            ValueFamily::Private => self.space.lower(),
            ValueFamily::Additive { weights } => {
                if weights[agent] > 0.0 {
                    self.space.lower()
                } else {
                    self.space.upper()
                }
            }
            ValueFamily::MaxSignal => others
                .iter()
                .copied()
                .fold(self.space.lower(), f64::max)
                .min(self.space.upper()),
            ValueFamily::Custom { own, .. } => {
                own.first_rising_breakpoint().unwrap_or(self.space.upper())
            }
        })
    }

    /// The shared signal weights when this is an additive model.
    pub fn additive_weights(&self) -> Option<&[f64]> {
        match &self.family {
            ValueFamily::Additive { weights } => Some(weights),
            _ => None,
        }
    }

    /// Whether the value is strictly increasing in the own signal everywhere
    /// (flat threshold at the bottom of the space for every profile of others).
    pub fn is_strictly_increasing_own(&self) -> bool {
        match &self.family {
            ValueFamily::Private => true,
            ValueFamily::Additive { weights } => weights.iter().all(|&w| w > 0.0),
            ValueFamily::MaxSignal => self.n_agents == 1,
            ValueFamily::Custom { own, .. } => own.slopes[0] > 0.0,
        }
    }

    /// Scans own-signal monotonicity and convexity over the grid.
    pub fn check_regularity(&self, grid: &Grid) -> Result<RegularityReport> {
        scan_regularity(self.n_agents, grid, |agent, profile| {
            self.eval_unchecked(agent, profile)
        })
    }
}

/// One regularity defect found by [`scan_regularity`].
#[derive(Debug, Clone, Serialize)]
pub struct RegularityViolation {
    pub agent: usize,
    /// The grid profile at which the defect is anchored.
    pub profile: Vec<f64>,
    /// Size of the defect (how far below zero the difference fell).
    pub defect: f64,
}

/// Outcome of a regularity scan: first differences (monotonicity) and second
/// differences (convexity) of each own-value slice, checked against a small
/// negative tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub monotonicity_violations: Vec<RegularityViolation>,
    pub convexity_violations: Vec<RegularityViolation>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.monotonicity_violations.is_empty() && self.convexity_violations.is_empty()
    }
}

/// Checks an arbitrary value function for own-signal monotonicity and
/// convexity on the grid. Exposed as a free function so callers can probe
/// candidate value functions that the built-in families cannot represent.
pub fn scan_regularity(
    n_agents: usize,
    grid: &Grid,
    eval: impl Fn(usize, &[f64]) -> f64,
) -> Result<RegularityReport> {
    let lat = grid.lattice(n_agents)?;
    let m = grid.len();
    let mut report = RegularityReport {
        monotonicity_violations: Vec::new(),
        convexity_violations: Vec::new(),
    };
    let mut others = vec![0usize; n_agents - 1];
    let mut profile = vec![0.0; n_agents];
    let mut slice_vals = vec![0.0; m];
    for agent in 0..n_agents {
        for sl in 0..lat.slice_count(agent) {
            lat.slice_base(agent, sl, &mut others);
            let mut slot = 0;
            for a in 0..n_agents {
                if a != agent {
                    profile[a] = grid.point(others[slot]);
                    slot += 1;
                }
            }
            for k in 0..m {
                profile[agent] = grid.point(k);
                slice_vals[k] = eval(agent, &profile);
            }
            for k in 1..m {
                let d1 = slice_vals[k] - slice_vals[k - 1];
                if d1 < -tol::VALUE {
                    profile[agent] = grid.point(k);
                    report.monotonicity_violations.push(RegularityViolation {
                        agent,
                        profile: profile.clone(),
                        defect: -d1,
                    });
                }
                if k + 1 < m {
                    let d2 = slice_vals[k + 1] - 2.0 * slice_vals[k] + slice_vals[k - 1];
                    if d2 < -tol::VALUE {
                        profile[agent] = grid.point(k);
                        report.convexity_violations.push(RegularityViolation {
                            agent,
                            profile: profile.clone(),
                            defect: -d2,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
