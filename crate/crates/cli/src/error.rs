use pairwalk_core::lattice::LatticeError;
use pairwalk_core::oracle::OracleError;
use pairwalk_core::spacetime::{SpacetimeError, TabulatedError};
use pairwalk_core::synthesis::SynthesisError;
use thiserror::Error;

/// Errors of the command-line front end, each with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Certificate(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<SpacetimeError> for CliError {
    fn from(e: SpacetimeError) -> Self {
        match e {
            SpacetimeError::Domain { .. } | SpacetimeError::HorizonDomain { .. } => CliError::Domain(e.to_string()),
            SpacetimeError::Tabulated(_) | SpacetimeError::InvalidMetric(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<TabulatedError> for CliError {
    fn from(e: TabulatedError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::OutsideDomain { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Certificate(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Synthesis { source, t, x } => match CliError::from(source) {
                CliError::Domain(m) => CliError::Domain(format!("at (t={t}, x={x}): {m}")),
                other => CliError::Certificate(format!("at (t={t}, x={x}): {other}")),
            },
            LatticeError::Certificate { .. } => CliError::Certificate(e.to_string()),
            LatticeError::PacketTruncated { .. } | LatticeError::InvalidLattice(_) | LatticeError::OddLattice(_) => {
                CliError::Config(e.to_string())
            }
            LatticeError::LatticeMismatch => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Walk(w) => w.into(),
            OracleError::GridMismatch(_) | OracleError::InvalidGrid(_) | OracleError::CflViolation { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
