//! Run configuration: a TOML file, optionally overridden by flags.

use std::path::{Path, PathBuf};

use g2flow_core::laplacian_flows::{DEFAULT_A, DEFAULT_HALTING_THRESHOLD};
use g2flow_core::presets::{self, InlinePreset, Preset};
use g2flow_core::{FlowKind, FlowSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A preset given by name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresetSource {
    Named(String),
    Inline(InlinePreset),
}

impl PresetSource {
    pub fn resolve(&self) -> Result<Preset, CliError> {
        let preset = match self {
            PresetSource::Named(name) => presets::by_name(name)?,
            PresetSource::Inline(inline) => inline.build()?,
        };
        Ok(preset)
    }

    pub fn label(&self) -> &str {
        match self {
            PresetSource::Named(name) => name,
            PresetSource::Inline(inline) => &inline.name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identity,
    Coclosed,
    LaplacianCrosscheck,
    EvolutionCrosscheck,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Identity,
        Suite::Coclosed,
        Suite::LaplacianCrosscheck,
        Suite::EvolutionCrosscheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::Coclosed => "coclosed",
            Suite::LaplacianCrosscheck => "laplacian_crosscheck",
            Suite::EvolutionCrosscheck => "evolution_crosscheck",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Suite>, CliError> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL);
                continue;
            }
            let suite = Suite::ALL
                .into_iter()
                .find(|x| x.as_str() == part)
                .ok_or_else(|| CliError::Config(format!("unknown suite '{part}'")))?;
            out.push(suite);
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Flow names accepted on the command line.
pub fn parse_flow_kind(s: &str) -> Result<FlowKind, CliError> {
    match s {
        "laplacian" => Ok(FlowKind::LaplacianFlow),
        "coflow+" => Ok(FlowKind::CoflowPlus),
        "coflow-" => Ok(FlowKind::CoflowMinus),
        "modified" => Ok(FlowKind::ModifiedCoflow),
        "dstar-d" => Ok(FlowKind::DstarDExperiment),
        other => Err(CliError::Config(format!(
            "unknown flow '{other}' (expected laplacian, coflow+, coflow-, modified or dstar-d)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: PresetSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub emit_plots: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("g2flow-out")
}

impl RunConfig {
    pub fn new(preset: PresetSource) -> Self {
        Self {
            preset,
            flow: None,
            output_dir: default_output_dir(),
            suites: Vec::new(),
            emit_plots: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<Preset, CliError> {
        if let Some(flow) = &self.flow {
            flow.validate()?;
        }
        self.preset.resolve()
    }
}

/// A list of runs executed in parallel, each in its own subdirectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub runs: Vec<RunConfig>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub flow: Option<FlowKind>,
    pub a: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub monitor_every: Option<usize>,
    pub suites: Option<Vec<Suite>>,
    pub out: Option<PathBuf>,
    pub emit_plots: bool,
}

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_MAX: f64 = 1.0;

impl Overrides {
    fn touches_flow(&self) -> bool {
        self.flow.is_some() || self.a.is_some() || self.dt.is_some() || self.t_max.is_some() || self.monitor_every.is_some()
    }

    pub fn apply(&self, mut config: RunConfig) -> Result<RunConfig, CliError> {
        if let Some(p) = &self.preset {
            config.preset = PresetSource::Named(p.clone());
        }
        if self.touches_flow() {
            let mut flow = match config.flow.take() {
                Some(f) => f,
                None => {
                    let kind = self.flow.ok_or_else(|| {
                        CliError::Config("flow parameters given without --flow or a [flow] table".into())
                    })?;
                    FlowSpec {
                        kind,
                        a: DEFAULT_A,
                        dt: DEFAULT_DT,
                        t_max: DEFAULT_T_MAX,
                        halting_threshold: DEFAULT_HALTING_THRESHOLD,
                        monitor_stride: 1,
                    }
                }
            };
            if let Some(k) = self.flow {
                flow.kind = k;
            }
            if let Some(a) = self.a {
                flow.a = a;
            }
            if let Some(dt) = self.dt {
                flow.dt = dt;
            }
            if let Some(t) = self.t_max {
                flow.t_max = t;
            }
            if let Some(m) = self.monitor_every {
                flow.monitor_stride = m;
            }
            config.flow = Some(flow);
        }
        if let Some(s) = &self.suites {
            config.suites = s.clone();
        }
        if let Some(o) = &self.out {
            config.output_dir = o.clone();
        }
        config.emit_plots |= self.emit_plots;
        Ok(config)
    }
}
