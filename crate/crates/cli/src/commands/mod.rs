use std::path::{Path, PathBuf};

use pairwalk_core::lattice::Lattice;
use pairwalk_core::spacetime::{dirac_matching, DiracField, MetricSpec};

use crate::config::SimConfig;
use crate::error::CliError;

pub mod check;
pub mod converge;
pub mod geodesics;
pub mod simulate;
pub mod synthesize;

pub struct Context {
    pub config: SimConfig,
    pub out: PathBuf,
}

impl Context {
    /// Creates the output directory and returns the path of `name` inside it.
    pub fn output(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    pub fn fields(&self) -> Result<(MetricSpec, DiracField, DiracField), CliError> {
        let metric = self.config.metric()?;
        let (b1, c) = dirac_matching(&metric)?;
        Ok((metric, b1, c))
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        let d = &self.config.domain;
        Ok(Lattice::covering(d.x_min, d.x_max, self.config.lattice.eps)?)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
