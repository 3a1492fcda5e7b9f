//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analysing a mechanism.
#[derive(Debug, Error)]
pub enum Error {
    /// A signal space with a malformed interval.
    #[error("invalid signal space: lower {lower} must be finite and strictly below upper {upper}")]
    InvalidSpace { lower: f64, upper: f64 },

    /// A grid with fewer than two points per axis.
    #[error("invalid grid resolution {resolution}: need at least 2 points per axis")]
    InvalidResolution { resolution: usize },

    /// A distribution whose parameters fail validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A density that vanishes where a hazard rate is required.
    #[error("degenerate density: pdf vanishes at signal {at}")]
    DegenerateDensity { at: f64 },

    /// A signal or profile outside the declared signal space, or on no grid point.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value model whose parameters fail validation.
    #[error("invalid value model: {0}")]
    InvalidModel(String),

    /// Allocation or payment tables that do not match the grid or violate feasibility.
    #[error("invalid rule table: {0}")]
    InvalidRule(String),

    /// Two objects built over different grids or spaces were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Payment synthesis requires an eventually monotone allocation rule.
    #[error(
        "allocation rule is not eventually monotone (agent {agent}, profile {profile:?}, \
         drop {defect:.3e} against lower report {deviation}); no incentive-compatible \
         payments exist for it"
    )]
    NotEventuallyMonotone {
        agent: usize,
        profile: Vec<f64>,
        deviation: f64,
        defect: f64,
    },

    /// The strictly-increasing optimal construction was asked for a model with flat regions.
    #[error(
        "value model is not strictly increasing in own signal ({0}); use the general \
         virtual-surplus objective or the must-sell max construction instead"
    )]
    NotStrictlyIncreasing(String),

    /// The weighted-sum optimal construction requires a monotone hazard rate.
    #[error("distribution fails the monotone hazard requirement at grid point {at}: inverse hazard rises from {before} to {after}")]
    NotMonotoneHazard { at: f64, before: f64, after: f64 },

    /// A computation that would exceed the intended desk scale.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A malformed experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV input.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
