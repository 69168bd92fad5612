use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cases::{case_by_name, default_data_dir, CaseSetup};
use crate::error::{Error, Result};
use crate::scheme::SchemeConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssertionMode {
    /// Abort on the first property violation.
    #[default]
    Strict,
    /// Record violations and keep going.
    Log,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSection {
    pub name: String,
    #[serde(default)]
    pub level: usize,
    pub viscosity: Option<f64>,
    pub tau: Option<f64>,
    pub final_time: Option<f64>,
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_output_dir")]
    pub directory: PathBuf,
    /// Steps between VTK snapshots; 0 disables them.
    #[serde(default)]
    pub snapshot_stride: usize,
    /// Export each P2 triangle as four linear ones.
    #[serde(default)]
    pub subdivide: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_output_dir(),
            snapshot_stride: 0,
            subdivide: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSection {
    #[serde(default)]
    pub mode: AssertionMode,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub levels: Vec<usize>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self { levels: vec![0, 1, 2, 3] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestingSection {
    #[serde(default)]
    pub gamma_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub assertions: AssertionSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub testing: TestingSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("viscosity", self.case.viscosity),
            ("tau", self.case.tau),
            ("final_time", self.case.final_time),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("case.{name} must be positive, got {v}")));
                }
            }
        }
        if !self.testing.gamma_offset.is_finite() {
            return Err(Error::Config("testing.gamma_offset must be finite".into()));
        }
        Ok(())
    }

    pub fn data_dir(&self) -> PathBuf {
        self.case.data_dir.clone().unwrap_or_else(default_data_dir)
    }

    /// Builds the case at `level` with overrides applied.
    pub fn case_at(&self, level: usize) -> Result<CaseSetup> {
        let mut case = case_by_name(&self.case.name, level, self.case.viscosity, &self.data_dir())?;
        if let Some(mu) = self.case.viscosity {
            case.viscosity = mu;
        }
        if let Some(tau) = self.case.tau {
            case.tau = tau;
        }
        if let Some(t) = self.case.final_time {
            case.final_time = t;
        }
        Ok(case)
    }

    pub fn scheme_config(&self, case: &CaseSetup) -> SchemeConfig {
        let mut cfg = SchemeConfig::for_case(case);
        cfg.snapshot_stride = self.output.snapshot_stride;
        cfg.gamma_offset = self.testing.gamma_offset;
        cfg
    }
}
