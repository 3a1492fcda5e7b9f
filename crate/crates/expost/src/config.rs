//! JSON experiment configurations: one file describes the environment
//! (agents, signal space, value model, distribution, grid) and one task to
//! run on it. [`crate::runner::run_experiment`] executes them.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::error::{Error, Result};
use crate::mechanism::PaymentBaseline;
use crate::signal::{default_resolution, Grid, SignalDistribution, SignalSpace};
use crate::value::{OthersShift, ValueModel};

/// A full experiment: environment plus one task.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_agents: usize,
    /// Signal interval; defaults to `[0, 1]`.
    #[serde(default)]
    pub space: Option<SpaceSpec>,
    pub model: ModelSpec,
    pub distribution: DistributionSpec,
    /// Grid points per axis; defaults to [`default_resolution`] for `n_agents`.
    #[serde(default)]
    pub resolution: Option<usize>,
    /// Base RNG seed for every sampling step; defaults to 0.
    #[serde(default)]
    pub seed: Option<u64>,
    pub task: TaskSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub lower: f64,
    pub upper: f64,
}

/// Value model families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// `v_i = s_i`.
    Private,
    /// Common value `v = sum_j weights[j] * s_j`.
    Additive { weights: Vec<f64> },
    /// Common value `v = max_j s_j`.
    Max,
    /// `v_i = own(s_i) + shift(s_-i)` with a piecewise-linear convex own curve
    /// given as `(breakpoint, slope)` pieces.
    Custom {
        pieces: Vec<(f64, f64)>,
        #[serde(default)]
        shift: Option<ShiftSpec>,
    },
}

/// Dependence of a custom value on the others' signals.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub max_coeff: f64,
    #[serde(default)]
    pub sum_coeff: f64,
}

/// Signal distributions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform,
    TruncatedExponential {
        rate: f64,
    },
    /// Piecewise-linear CDF, either inline as `(signal, cdf)` knots or read
    /// from a two-column CSV file.
    TabulatedCdf {
        #[serde(default)]
        knots: Option<Vec<(f64, f64)>>,
        #[serde(default)]
        path: Option<PathBuf>,
    },
}

/// What to do with the environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Check eventual monotonicity (and incentives, when payments are given)
    /// of imported tables.
    Verify {
        allocation_csv: PathBuf,
        #[serde(default)]
        payments_csv: Option<PathBuf>,
        #[serde(default)]
        must_sell: bool,
    },
    /// Build incentive compatible payments for an imported allocation table.
    Synthesize {
        allocation_csv: PathBuf,
        #[serde(default)]
        baseline: Option<PaymentBaseline>,
    },
    /// Construct a revenue-maximizing mechanism.
    Optimize {
        objective: ObjectiveSpec,
        /// Monte Carlo cross-check sample count; 0 disables it.
        #[serde(default)]
        n_samples: Option<usize>,
    },
    /// Estimate and compare revenue across mechanisms.
    Revenue {
        mechanisms: Vec<MechanismSpec>,
        #[serde(default)]
        n_samples: Option<usize>,
    },
    /// Posted-price benchmark against the must-sell equal-share mechanism.
    Benchmark {
        #[serde(default)]
        n_agents_list: Option<Vec<usize>>,
        #[serde(default)]
        n_samples: Option<usize>,
    },
}

impl TaskSpec {
    /// The subcommand name this task belongs to.
    pub fn kind_name(&self) -> &'static str {
        match self {
            TaskSpec::Verify { .. } => "verify",
            TaskSpec::Synthesize { .. } => "synthesize",
            TaskSpec::Optimize { .. } => "optimize",
            TaskSpec::Revenue { .. } => "revenue",
            TaskSpec::Benchmark { .. } => "benchmark",
        }
    }
}

/// Which optimal construction to run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Ironed pointwise virtual-value maximization (strictly increasing
    /// models).
    StrictlyIncreasing,
    /// Closed-form weighted construction (additive models, monotone hazard).
    Additive,
    /// Must-sell constant shares.
    MustSellShares { shares: Vec<f64> },
}

/// A mechanism entry in a revenue comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismSpec {
    pub label: String,
    pub rule: RuleSpec,
    #[serde(default)]
    pub baseline: Option<PaymentBaseline>,
}

/// Allocation rules a config can name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RuleSpec {
    ConstantShares { shares: Vec<f64> },
    EfficientHighestSignal,
    AllocationCsv { path: PathBuf },
}

impl ExperimentConfig {
    /// Parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path)
            .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        serde_json::from_reader(file).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn space(&self) -> Result<SignalSpace> {
        match self.space {
            Some(SpaceSpec { lower, upper }) => SignalSpace::new(lower, upper),
            None => Ok(SignalSpace::unit()),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
            .unwrap_or_else(|| default_resolution(self.n_agents))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::uniform(self.space()?, self.resolution())
    }

    pub fn build_model(&self) -> Result<ValueModel> {
        let space = self.space()?;
        match &self.model {
            ModelSpec::Private => ValueModel::private(space, self.n_agents),
            ModelSpec::Additive { weights } => {
                if weights.len() != self.n_agents {
                    return Err(Error::Config(format!(
                        "additive model needs {} weights, got {}",
                        self.n_agents,
                        weights.len()
                    )));
                }
                ValueModel::additive(space, weights)
            }
            ModelSpec::Max => ValueModel::max_signal(space, self.n_agents),
            ModelSpec::Custom { pieces, shift } => {
                let shift = match shift {
                    Some(s) => OthersShift {
                        constant: s.constant,
                        max_coeff: s.max_coeff,
                        sum_coeff: s.sum_coeff,
                    },
                    None => OthersShift::NONE,
                };
                ValueModel::custom(space, self.n_agents, pieces, shift)
            }
        }
    }

    /// Builds the distribution; CSV paths resolve relative to `base_dir`.
    pub fn build_distribution(&self, base_dir: &Path) -> Result<SignalDistribution> {
        let space = self.space()?;
        match &self.distribution {
            DistributionSpec::Uniform => Ok(SignalDistribution::uniform(space)),
            DistributionSpec::TruncatedExponential { rate } => {
                SignalDistribution::truncated_exponential(space, *rate)
            }
            DistributionSpec::TabulatedCdf { knots, path } => match (knots, path) {
                (Some(knots), None) => SignalDistribution::tabulated_cdf(knots),
                (None, Some(path)) => {
                    let resolved = resolve(base_dir, path);
                    let file = File::open(&resolved).map_err(|e| {
                        Error::Config(format!("cannot open {}: {e}", resolved.display()))
                    })?;
                    csvio::read_tabulated_cdf(file)
                }
                _ => Err(Error::Config(
                    "tabulated-cdf needs exactly one of `knots` or `path`".into(),
                )),
            },
        }
    }

    /// Sanity-checks the parts independent of input files.
    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::Config("n_agents must be at least 1".into()));
        }
        self.grid()?;
        self.build_model()?;
        if let TaskSpec::Optimize {
            objective: ObjectiveSpec::MustSellShares { shares },
            ..
        } = &self.task
        {
            if shares.len() != self.n_agents {
                return Err(Error::Config(format!(
                    "must-sell shares need {} entries, got {}",
                    self.n_agents,
                    shares.len()
                )));
            }
        }
        if let TaskSpec::Revenue { mechanisms, .. } = &self.task {
            if mechanisms.is_empty() {
                return Err(Error::Config(
                    "revenue task needs at least one mechanism".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Resolves a config-relative path.
pub fn resolve(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}
