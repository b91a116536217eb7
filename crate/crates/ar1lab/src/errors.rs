//! CLI error taxonomy and the mapping from library errors onto exit
//! codes: 2 for configuration problems, 3 for refusals rooted in the
//! mathematics of the configured problem, 4 for iterations that did
//! not converge, 1 for everything else (I/O, failed cross-checks).

use ar1persist::chain::ChainError;
use ar1persist::estimators::EstimatorError;
use ar1persist::innovations::InnovationError;
use ar1persist::kernel::{BlockIoError, KernelError};
use ar1persist::linalg::LinalgError;
use ar1persist::oracles::OracleError;
use ar1persist::renewal::RenewalError;
use ar1persist::spectral::SpectralError;

#[derive(Debug)]
pub enum CliError {
    /// Bad or missing configuration; exit code 2.
    Config(String),
    /// The configured problem has no answer of the requested kind
    /// (divergent series, loss of mass, degenerate rate); exit code 3.
    Domain(String),
    /// An iteration hit its budget without meeting tolerance; exit
    /// code 4.
    Convergence(String),
    /// Cross-checks ran but exceeded their budgets; exit code 1.
    Comparison(String),
    /// Filesystem trouble; exit code 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Comparison(_) | CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Domain(_) => "numerical-domain",
            CliError::Convergence(_) => "non-convergence",
            CliError::Comparison(_) => "comparison",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Domain(m)
            | CliError::Convergence(m)
            | CliError::Comparison(m)
            | CliError::Io(m) => m,
        }
    }

    /// One-line machine-readable form for stderr.
    pub fn stderr_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

/// Message for innovation laws that never go negative: the chain
/// cannot die, so the grid pipelines have nothing to compute.
pub const ONE_SIDED_MSG: &str = "the innovations never take negative values, so the chain \
     survives every horizon: the killed kernel is stochastic (leading eigenvalue 1) and the \
     decay rate is 0; run the mc pipeline to see the flat survival curve";

pub fn from_kernel(e: KernelError) -> CliError {
    match e {
        KernelError::InvalidContraction { .. } => CliError::Config("a must lie in (0,1)".into()),
        KernelError::Innovation(InnovationError::OneSided) => CliError::Domain(ONE_SIDED_MSG.into()),
        KernelError::Innovation(inner) => CliError::Config(inner.to_string()),
        defect @ KernelError::MassDefect { .. } => CliError::Domain(defect.to_string()),
    }
}

fn from_linalg(e: LinalgError) -> CliError {
    CliError::Convergence(e.to_string())
}

pub fn from_spectral(e: SpectralError) -> CliError {
    match e {
        SpectralError::Linalg(inner) => from_linalg(inner),
        degenerate @ SpectralError::DegenerateRate { .. } => CliError::Domain(degenerate.to_string()),
    }
}

pub fn from_renewal(e: RenewalError) -> CliError {
    match e {
        RenewalError::Linalg(inner) => from_linalg(inner),
        solve @ RenewalError::SolveFailed => CliError::Convergence(solve.to_string()),
        other => CliError::Domain(other.to_string()),
    }
}

pub fn from_chain(e: ChainError) -> CliError {
    match e {
        ChainError::InvalidContraction { .. } => CliError::Config("a must lie in (0,1)".into()),
        start @ ChainError::InvalidStart { .. } => CliError::Config(start.to_string()),
    }
}

pub fn from_estimator(e: EstimatorError) -> CliError {
    match e {
        EstimatorError::Chain(inner) => from_chain(inner),
        EstimatorError::InvalidWindow { .. } | EstimatorError::TooFewParticles { .. } => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Domain(e.to_string()),
    }
}

pub fn from_oracle(e: OracleError) -> CliError {
    match e {
        OracleError::InvalidContraction { .. } => CliError::Config("a must lie in (0,1)".into()),
        bracket @ OracleError::NoBracket { .. } => CliError::Domain(bracket.to_string()),
    }
}

pub fn from_block_io(e: BlockIoError) -> CliError {
    match e {
        BlockIoError::Io(inner) => CliError::Io(inner.to_string()),
        other => CliError::Config(other.to_string()),
    }
}
