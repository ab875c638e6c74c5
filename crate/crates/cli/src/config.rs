//! Scenario files.
//!
//! A scenario is a TOML document with `walker`, `cycle`, `controller`,
//! optional `[[disturbances]]` and `run` tables. Unknown keys are rejected,
//! and every physical invariant is checked when the file is loaded.

use std::path::{Path, PathBuf};

use lipm_gait::linalg::Mat2;
use lipm_gait::{
    build_step_matrices, design_cycle, Disturbance, DisturbanceModel, GaitCycle, LqrWeights,
    PolePair, SimConfig, StepMatrices, WalkerParams,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub walker: WalkerConfig,
    pub cycle: CycleConfig,
    #[serde(default)]
    pub controller: ControllerConfig,
    #[serde(default)]
    pub disturbances: Vec<DisturbanceConfig>,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkerConfig {
    pub h: f64,
    pub g: f64,
    pub m: f64,
    pub l_max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    pub step_length: f64,
    pub step_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    #[default]
    None,
    PolePlace,
    Lqr,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugatePoles {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default)]
    pub kind: ControllerKind,
    /// Real pole pair for pole placement.
    pub poles: Option<[f64; 2]>,
    /// Complex-conjugate pole pair for pole placement.
    pub poles_conjugate: Option<ConjugatePoles>,
    pub q: Option<[[f64; 2]; 2]>,
    pub r: Option<f64>,
    /// Input weights to compare side by side (LQR only).
    #[serde(default)]
    pub compare_r: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceConfig {
    pub step_index: usize,
    pub phase: f64,
    pub force: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelConfig {
    #[default]
    Exact,
    Impulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: f64,
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub disturbance_model: ModelConfig,
}

fn default_steps() -> usize {
    20
}

fn default_rate() -> f64 {
    lipm_gait::sim::DEFAULT_SAMPLE_RATE_HZ
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Svg]
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_steps: default_steps(),
            sample_rate_hz: default_rate(),
            output_dir: None,
            formats: default_formats(),
            disturbance_model: ModelConfig::default(),
        }
    }
}

/// Feedback design requested by a scenario, already validated.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    None,
    PolePlace(PolePair),
    Lqr {
        weights: LqrWeights,
        compare: Vec<LqrWeights>,
    },
}

impl ControllerSpec {
    pub fn describe(&self) -> String {
        match self {
            ControllerSpec::None => "none (K = 0)".into(),
            ControllerSpec::PolePlace(PolePair::Real(a, b)) => format!("pole placement at ({a}, {b})"),
            ControllerSpec::PolePlace(PolePair::Conjugate { re, im }) => {
                format!("pole placement at {re} ± {im}i")
            }
            ControllerSpec::Lqr { weights, .. } => {
                let q = weights.q().0;
                format!("LQR with Q = {q:?}, R = {}", weights.r())
            }
        }
    }
}

/// A loaded scenario with every invariant checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: WalkerParams,
    pub cycle: GaitCycle,
    pub matrices: StepMatrices,
    pub controller: ControllerSpec,
    pub sim: SimConfig,
    pub output_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("invalid scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<Scenario> {
        let w = &self.walker;
        let params = WalkerParams::new(w.h, w.g, w.m, w.l_max)?;
        let cycle = design_cycle(&params, self.cycle.step_length, self.cycle.step_time)?;
        let matrices = build_step_matrices(&params, cycle.step_time)?;
        let controller = self.controller.validate(&matrices)?;

        let mut sim = SimConfig::new(self.run.n_steps)
            .with_sample_rate(self.run.sample_rate_hz)
            .with_model(match self.run.disturbance_model {
                ModelConfig::Exact => DisturbanceModel::Exact,
                ModelConfig::Impulse => DisturbanceModel::Impulse,
            });
        for d in &self.disturbances {
            sim = sim.with_disturbance(Disturbance {
                step_index: d.step_index,
                phase: d.phase,
                force: d.force,
                duration: d.duration,
            });
        }
        sim.validate(cycle.step_time)?;

        Ok(Scenario {
            params,
            cycle,
            matrices,
            controller,
            sim,
            output_dir: self.run.output_dir.clone(),
            formats: self.run.formats.clone(),
        })
    }
}

impl ControllerConfig {
    fn validate(&self, matrices: &StepMatrices) -> Result<ControllerSpec> {
        let invalid = |msg: &str| Err(CliError::Validation(msg.to_string()));
        match self.kind {
            ControllerKind::None => {
                if self.poles.is_some() || self.poles_conjugate.is_some() || self.r.is_some() {
                    return invalid("controller kind \"none\" takes no poles or weights");
                }
                Ok(ControllerSpec::None)
            }
            ControllerKind::PolePlace => {
                if self.q.is_some() || self.r.is_some() || !self.compare_r.is_empty() {
                    return invalid("pole placement takes no LQR weights");
                }
                let pair = match (self.poles, self.poles_conjugate) {
                    (Some([a, b]), None) => PolePair::Real(a, b),
                    (None, Some(c)) => PolePair::Conjugate { re: c.re, im: c.im },
                    (None, None) => PolePair::DEADBEAT,
                    (Some(_), Some(_)) => {
                        return invalid("give either poles or poles_conjugate, not both")
                    }
                };
                lipm_gait::pole_place_pair(matrices, pair)?;
                Ok(ControllerSpec::PolePlace(pair))
            }
            ControllerKind::Lqr => {
                if self.poles.is_some() || self.poles_conjugate.is_some() {
                    return invalid("LQR takes no poles");
                }
                let q = self.q.map(Mat2).unwrap_or(Mat2::IDENTITY);
                let weights = LqrWeights::new(q, self.r.unwrap_or(1.0))?;
                let compare = self
                    .compare_r
                    .iter()
                    .map(|&r| LqrWeights::new(q, r))
                    .collect::<lipm_gait::Result<Vec<_>>>()?;
                Ok(ControllerSpec::Lqr { weights, compare })
            }
        }
    }
}
