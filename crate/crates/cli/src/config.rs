//! Run configuration.
//!
//! A configuration is a TOML document layered over a preset: every key the
//! file sets replaces the preset's value, everything else is inherited.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use pairwalk_core::lattice::{EnergyBranch, PacketParams};
use pairwalk_core::matrix::{SIGMA_X, SIGMA_Z};
use pairwalk_core::oracle::DEFAULT_CFL;
use pairwalk_core::spacetime::{
    rescale_for_causality, schwarzschild, Domain, MetricSpec, Representation, TabulatedDyads,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Schwarzschild ingoing packet at `ε = 1e-3`; runs in seconds.
    #[default]
    Desk,
    /// The full-resolution Schwarzschild run at `ε = 5e-5`; takes hours.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKindConfig {
    Flat,
    Schwarzschild,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub kind: MetricKindConfig,
    /// Schwarzschild mass.
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Dyad table for `kind = "tabulated"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Rescale time when `B1` has eigenvalues outside `[-1, 1]`.
    pub rescale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationConfig {
    /// `α = σz`, `β = σx`.
    Chiral,
    /// `α = σx`, `β = σz`.
    Standard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub m: f64,
    pub representation: RepresentationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub eps: f64,
    pub steps: usize,
    /// Steps between snapshots.
    pub stride: usize,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchConfig {
    Both,
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    pub branch: BranchConfig,
    pub tail_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub t_final: f64,
    pub pde_dx: f64,
    pub cfl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    /// Seeds overlaid on `simulate` runs; `geodesics --seeds` overrides them.
    pub seeds: Vec<f64>,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub preset: Preset,
    pub metric: MetricConfig,
    pub particle: ParticleConfig,
    pub domain: DomainConfig,
    pub lattice: LatticeConfig,
    pub packet: PacketConfig,
    pub converge: ConvergeConfig,
    pub geodesics: GeodesicConfig,
    pub output: OutputConfig,
}

impl SimConfig {
    pub fn preset(preset: Preset) -> Self {
        let desk = Self {
            preset,
            metric: MetricConfig { kind: MetricKindConfig::Schwarzschild, big_m: 0.5, path: None, rescale: true },
            particle: ParticleConfig { m: 5.0, representation: RepresentationConfig::Chiral },
            domain: DomainConfig { x_min: 1.1, x_max: 7.0 },
            lattice: LatticeConfig { eps: 1e-3, steps: 1500, stride: 50, boundary: Boundary::Periodic },
            packet: PacketConfig { x0: 3.0, p0: 5.0, sigma: 1.56, branch: BranchConfig::Negative, tail_tolerance: 1e-3 },
            converge: ConvergeConfig { t_final: 1.0, pde_dx: 5e-4, cfl: DEFAULT_CFL },
            geodesics: GeodesicConfig { seeds: vec![1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0], dt: 1e-3 },
            output: OutputConfig { dir: PathBuf::from("pairwalk-out") },
        };
        match preset {
            Preset::Desk => desk,
            Preset::Full => Self {
                particle: ParticleConfig { m: 50.0, ..desk.particle },
                lattice: LatticeConfig { eps: 5e-5, steps: 30_000, stride: 500, ..desk.lattice },
                packet: PacketConfig { p0: 50.0, branch: BranchConfig::Both, ..desk.packet },
                geodesics: GeodesicConfig { dt: 1e-4, ..desk.geodesics },
                ..desk
            },
        }
    }

    /// Reads `path` over a preset: `forced` if given, else the one the file
    /// names, else the desk preset.
    pub fn load(path: Option<&Path>, forced: Option<Preset>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::preset(forced.unwrap_or_default()));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::parse(&text, forced)?;
        // Relative table paths are resolved against the config file.
        if let (Some(table), Some(dir)) = (&config.metric.path, path.parent()) {
            if table.is_relative() {
                config.metric.path = Some(dir.join(table));
            }
        }
        Ok(config)
    }

    pub fn parse(text: &str, forced: Option<Preset>) -> Result<Self, CliError> {
        let file: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let named = match file.get("preset") {
            Some(v) => Some(v.clone().try_into().map_err(|e| CliError::Config(format!("preset: {e}")))?),
            None => None,
        };
        let preset = forced.or(named).unwrap_or_default();
        let mut merged = toml::Table::try_from(Self::preset(preset)).expect("presets serialize");
        merge(&mut merged, file);
        let mut config: Self = merged.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        config.preset = preset;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let numbers = [
            ("metric.M", self.metric.big_m),
            ("particle.m", self.particle.m),
            ("domain.x_min", self.domain.x_min),
            ("domain.x_max", self.domain.x_max),
            ("lattice.eps", self.lattice.eps),
            ("packet.x0", self.packet.x0),
            ("packet.p0", self.packet.p0),
            ("packet.sigma", self.packet.sigma),
            ("packet.tail_tolerance", self.packet.tail_tolerance),
            ("converge.t_final", self.converge.t_final),
            ("converge.pde_dx", self.converge.pde_dx),
            ("converge.cfl", self.converge.cfl),
            ("geodesics.dt", self.geodesics.dt),
        ];
        if let Some((name, _)) = numbers.iter().find(|(_, v)| !v.is_finite()) {
            return Err(CliError::Config(format!("{name} must be finite")));
        }
        let positive = [
            ("lattice.eps", self.lattice.eps),
            ("packet.sigma", self.packet.sigma),
            ("converge.pde_dx", self.converge.pde_dx),
            ("converge.cfl", self.converge.cfl),
            ("geodesics.dt", self.geodesics.dt),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(CliError::Config(format!("{name} must be positive, got {v}")));
        }
        if self.lattice.steps == 0 || self.lattice.stride == 0 {
            return Err(CliError::Config("lattice.steps and lattice.stride must be at least 1".into()));
        }
        if self.particle.m < 0.0 {
            return Err(CliError::Config("particle.m must be non-negative".into()));
        }
        if !(self.domain.x_min < self.domain.x_max) {
            return Err(CliError::Config("domain.x_min must be below domain.x_max".into()));
        }
        if !(self.domain.x_min < self.packet.x0 && self.packet.x0 < self.domain.x_max) {
            return Err(CliError::Config(format!("packet.x0 = {} lies outside the domain", self.packet.x0)));
        }
        if self.metric.kind == MetricKindConfig::Tabulated && self.metric.path.is_none() {
            return Err(CliError::Config("a tabulated metric needs metric.path".into()));
        }
        Ok(())
    }

    pub fn representation(&self) -> Representation {
        match self.particle.representation {
            RepresentationConfig::Chiral => Representation::CHIRAL,
            RepresentationConfig::Standard => Representation { alpha: SIGMA_X, beta: SIGMA_Z },
        }
    }

    /// The metric on the configured domain, rescaled if requested.
    pub fn metric(&self) -> Result<MetricSpec, CliError> {
        let (x_min, x_max) = (self.domain.x_min, self.domain.x_max);
        let m = self.particle.m;
        let metric = match self.metric.kind {
            MetricKindConfig::Flat => MetricSpec { domain: Domain::spatial(x_min, x_max), ..MetricSpec::flat(m) },
            MetricKindConfig::Schwarzschild => schwarzschild(self.metric.big_m, m, x_min, x_max)?,
            MetricKindConfig::Tabulated => {
                let path = self.metric.path.as_ref().expect("validated");
                let table = TabulatedDyads::from_path(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let mut metric = MetricSpec::tabulated(table, m);
                metric.domain.x_min = metric.domain.x_min.max(x_min);
                metric.domain.x_max = metric.domain.x_max.min(x_max);
                metric
            }
        };
        let metric = metric.with_representation(self.representation());
        if self.metric.rescale {
            Ok(rescale_for_causality(&metric)?.0)
        } else {
            Ok(metric)
        }
    }

    pub fn packet(&self) -> PacketParams {
        let branch = match self.packet.branch {
            BranchConfig::Both => EnergyBranch::Both,
            BranchConfig::Positive => EnergyBranch::Positive,
            BranchConfig::Negative => EnergyBranch::Negative,
        };
        PacketParams {
            tail_tolerance: self.packet.tail_tolerance,
            ..PacketParams::new(self.packet.x0, self.packet.p0, self.packet.sigma, self.particle.m)
        }
        .with_branch(branch)
    }

    pub fn metric_name(&self) -> String {
        match self.metric.kind {
            MetricKindConfig::Flat => "flat".into(),
            MetricKindConfig::Schwarzschild => format!("schwarzschild(M={})", self.metric.big_m),
            MetricKindConfig::Tabulated => {
                format!("tabulated({})", self.metric.path.as_deref().unwrap_or(Path::new("")).display())
            }
        }
    }
}

/// Recursively overwrites `base` with `over`.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}
