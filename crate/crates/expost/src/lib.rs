//! Toolkit for single-object auctions with interdependent values, analysed
//! ex post on a finite signal grid.
//!
//! The crate answers four questions about a dense allocation table
//! `q_i(s_1, ..., s_n)` over a shared signal grid:
//!
//! 1. **Is it implementable?** Allocation rules admit incentive-compatible
//!    payments exactly when each own-signal slice is *eventually monotone*:
//!    every point above the agent's flat threshold dominates all lower
//!    points, while below the threshold the allocation may move freely
//!    ([`mechanism::check_eventual_monotonicity`], with an independent
//!    cyclic-monotonicity oracle in [`mechanism::implementability_oracle`]).
//! 2. **What are the payments?** A discrete envelope formula pins payments up
//!    to a per-slice baseline ([`mechanism::synthesize_payments`]); truthful
//!    reporting is then optimal against every profile of the others, which
//!    [`mechanism::verify_epic`] and [`mechanism::verify_epir`] check defect
//!    by defect.
//! 3. **Which rule maximises revenue?** Pointwise maximisation of ironed
//!    virtual values, plus closed-form weighted-sum and must-sell common-value
//!    designs ([`design`]).
//! 4. **What does it earn?** Seeded Monte Carlo and tensor-grid quadrature
//!    revenue estimates with benchmark comparisons ([`revenue`]).
//!
//! Every capability has a runnable example; start with
//! `cargo run -p expost --example payment_synthesis` and see the `examples/`
//! directory for the full tour. The `expost` binary drives the same
//! operations from JSON experiment configs (`expost optimize --config c.json
//! --out out/`).

pub mod config;
pub mod csvio;
pub mod design;
pub mod error;
pub mod mechanism;
pub mod revenue;
pub mod runner;
pub mod signal;
pub mod value;

/// Numeric tolerances shared across the crate. Every check names the
/// tolerance it applies; reports embed the whole bundle.
pub mod tol {
    /// Absolute tolerance for comparing value readings (flatness detection).
    pub const VALUE: f64 = 1e-9;
    /// Absolute tolerance for comparing allocation probabilities.
    pub const ALLOCATION: f64 = 1e-12;
    /// Absolute tolerance for incentive and participation defects.
    pub const INCENTIVE: f64 = 1e-8;
    /// Absolute tolerance for discrete convexity checks of utility curves.
    pub const CONVEXITY: f64 = 1e-8;
    /// How far a density may miss integrating to one.
    pub const DENSITY_NORM: f64 = 1e-6;
}

pub use error::{Error, Result};
pub use mechanism::{
    check_eventual_monotonicity, synthesize_payments, verify_epic, verify_epir, AllocationRule,
    Mechanism, PaymentBaseline, PaymentRule, VerificationReport,
};
pub use signal::{default_resolution, Grid, Lattice, SignalDistribution, SignalSpace};
pub use value::{OthersShift, RegularityReport, ValueModel};
