//! Run configuration: a single TOML schema shared by every
//! subcommand. Unknown keys are rejected at parse time and the
//! semantic checks below run before any computation starts, so a bad
//! config never burns compute.

use crate::errors::CliError;
use ar1persist::grid::Grid;
use ar1persist::innovations::InnovationModel;
use ar1persist::kernel::{OverflowPolicy, Scheme};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed for every stochastic routine; `--seed` overrides.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory; `--out` overrides.
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub chain: ChainSection,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub spectral: Option<SpectralSection>,
    #[serde(default)]
    pub renewal: Option<RenewalSection>,
    #[serde(default)]
    pub mc: Option<McSection>,
    #[serde(default)]
    pub fv: Option<FvSection>,
    #[serde(default)]
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    /// Contraction factor, strictly between 0 and 1.
    pub a: f64,
    /// Innovation law; the inline table uses a `kind` tag, e.g.
    /// `{ kind = "gaussian", mean = 0.0, std = 1.0 }`.
    pub model: InnovationModel,
    /// Start point for the sampling pipelines.
    #[serde(default)]
    pub x0: Option<f64>,
    /// Killing barrier for the sampling pipelines; the grid pipelines
    /// always work at the zero barrier.
    #[serde(default)]
    pub barrier: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Upper edge of the discretized state space (0, cap].
    pub cap: f64,
    /// Number of uniform cells; `cap / n` is the resolution.
    pub n: usize,
    /// Split level for the excursion decomposition; must sit on a
    /// cell edge.
    pub r: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_policy")]
    pub policy: OverflowPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSection {
    #[serde(default = "default_spectral_tol")]
    pub tol: f64,
    #[serde(default = "default_spectral_max_iter")]
    pub max_iter: usize,
    /// Also estimate the subdominant eigenvalue ratio (slower).
    #[serde(default = "default_true")]
    pub estimate_gap: bool,
    /// Export the assembled kernel to `blocks.bin` for reuse.
    #[serde(default)]
    pub emit_blocks: bool,
    /// Emit `trace.csv` with the eigenvalue under grid coarsening.
    #[serde(default = "default_true")]
    pub trace: bool,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            tol: default_spectral_tol(),
            max_iter: default_spectral_max_iter(),
            estimate_gap: true,
            emit_blocks: false,
            trace: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewalSection {
    /// Bisection width on the rate.
    #[serde(default = "default_renewal_tol")]
    pub tol: f64,
    /// Reuse a kernel container exported by the spectrum command
    /// instead of assembling from `[chain]` + `[grid]`.
    #[serde(default)]
    pub blocks_path: Option<PathBuf>,
    /// Resolution of the diagnostic rate sweep in `trace.csv`.
    #[serde(default = "default_sweep_points")]
    pub sweep_points: usize,
}

impl Default for RenewalSection {
    fn default() -> Self {
        Self {
            tol: default_renewal_tol(),
            blocks_path: None,
            sweep_points: default_sweep_points(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub n_paths: u64,
    /// Longest horizon recorded on the survival curve.
    pub n_max: usize,
    /// Half-open horizon window `[n0, n1)` for the slope fit.
    pub window: (usize, usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FvSection {
    pub n_particles: usize,
    pub steps: usize,
    pub burn_in: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Allowed |excursion-root rate - eigen rate| on the shared grid.
    #[serde(default = "default_budget_renewal")]
    pub budget_renewal: f64,
    /// Allowed slope-fit deviation, in multiples of its standard
    /// error.
    #[serde(default = "default_budget_slope_sigmas")]
    pub budget_slope_sigmas: f64,
    /// Allowed relative deviation of the particle estimate.
    #[serde(default = "default_budget_fv_rel")]
    pub budget_fv_rel: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            budget_renewal: default_budget_renewal(),
            budget_slope_sigmas: default_budget_slope_sigmas(),
            budget_fv_rel: default_budget_fv_rel(),
        }
    }
}

fn default_scheme() -> Scheme {
    Scheme::MidpointExactMass
}
fn default_policy() -> OverflowPolicy {
    OverflowPolicy::Absorb
}
fn default_spectral_tol() -> f64 {
    1e-12
}
fn default_spectral_max_iter() -> usize {
    100_000
}
fn default_renewal_tol() -> f64 {
    1e-11
}
fn default_sweep_points() -> usize {
    33
}
fn default_budget_renewal() -> f64 {
    1e-6
}
fn default_budget_slope_sigmas() -> f64 {
    3.0
}
fn default_budget_fv_rel() -> f64 {
    0.05
}
fn default_true() -> bool {
    true
}

/// Loads and semantically validates a config file.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let cfg: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let c = &cfg.chain;
    if !(c.a > 0.0 && c.a < 1.0) {
        return Err(CliError::Config("a must lie in (0,1)".into()));
    }
    c.model
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if !c.barrier.is_finite() {
        return Err(CliError::Config("chain.barrier must be finite".into()));
    }
    if let Some(x0) = c.x0 {
        if !(x0.is_finite() && x0 > c.barrier) {
            return Err(CliError::Config(format!(
                "chain.x0 = {x0} must be finite and above the barrier {}",
                c.barrier
            )));
        }
    }
    if let Some(g) = &cfg.grid {
        Grid::uniform(g.cap, g.n, g.r).map_err(|e| CliError::Config(e.to_string()))?;
    }
    if let Some(s) = &cfg.spectral {
        if !(s.tol > 0.0) || s.max_iter == 0 {
            return Err(CliError::Config(
                "spectral.tol must be positive and spectral.max_iter nonzero".into(),
            ));
        }
    }
    if let Some(r) = &cfg.renewal {
        if !(r.tol > 0.0) {
            return Err(CliError::Config("renewal.tol must be positive".into()));
        }
        if r.sweep_points < 2 {
            return Err(CliError::Config("renewal.sweep_points must be at least 2".into()));
        }
    }
    if let Some(m) = &cfg.mc {
        if m.n_paths == 0 || m.n_max == 0 {
            return Err(CliError::Config("mc.n_paths and mc.n_max must be nonzero".into()));
        }
        let (n0, n1) = m.window;
        if !(n0 < n1 && n1 <= m.n_max) {
            return Err(CliError::Config(format!(
                "mc.window = [{n0}, {n1}] must satisfy n0 < n1 <= n_max = {}",
                m.n_max
            )));
        }
    }
    if let Some(f) = &cfg.fv {
        if f.n_particles < 2 {
            return Err(CliError::Config("fv.n_particles must be at least 2".into()));
        }
        if f.burn_in >= f.steps {
            return Err(CliError::Config("fv.burn_in must be below fv.steps".into()));
        }
    }
    if let Some(cmp) = &cfg.compare {
        if !(cmp.budget_renewal > 0.0
            && cmp.budget_slope_sigmas > 0.0
            && cmp.budget_fv_rel > 0.0)
        {
            return Err(CliError::Config("compare budgets must be positive".into()));
        }
    }
    Ok(())
}

/// The start point, which the sampling pipelines require explicitly.
pub fn require_x0(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.chain
        .x0
        .ok_or_else(|| CliError::Config("chain.x0 is required for this command".into()))
}

/// The grid section, which the grid pipelines require.
pub fn require_grid(cfg: &RunConfig) -> Result<&GridSection, CliError> {
    cfg.grid
        .as_ref()
        .ok_or_else(|| CliError::Config("a [grid] section is required for this command".into()))
}

/// Grid pipelines work at the zero barrier only.
pub fn require_zero_barrier(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.chain.barrier != 0.0 {
        return Err(CliError::Config(
            "the grid pipelines run at the zero barrier; set chain.barrier = 0 \
             (the sampling pipelines accept a nonzero barrier)"
                .into(),
        ));
    }
    Ok(())
}
