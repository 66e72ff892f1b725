//! JSON run configuration.
//!
//! Every field is optional; omitted fields take the defaults of the chosen
//! mode. Unknown fields are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swarmalator_core::harness::{DelayModel, NetConfig, NetConfigError};
use swarmalator_core::metrics::Thresholds;
use swarmalator_core::sim::{ConfigError, OmegaAssignment, SimConfig};
use swarmalator_core::{ModelMode, ModelParams};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidConfig),
}

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum InvalidConfig {
    #[error("invalid config: {0}")]
    Sim(#[from] ConfigError),
    #[error("invalid config: {0}")]
    Net(#[from] NetConfigError),
    #[error("invalid config: {0}")]
    Thresholds(String),
    #[error("no seed given; pass --seed or set \"seed\" in the config")]
    MissingSeed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Robot,
    Original,
}

impl From<ModeName> for ModelMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Robot => ModelMode::Robot,
            ModeName::Original => ModelMode::Original,
        }
    }
}

impl From<ModelMode> for ModeName {
    fn from(m: ModelMode) -> Self {
        match m {
            ModelMode::Robot => ModeName::Robot,
            ModelMode::Original => ModeName::Original,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    Scalar(f64),
    PerAgent(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DelaySpec {
    Constant(f64),
    Uniform { min: f64, max: f64 },
}

impl From<DelaySpec> for DelayModel {
    fn from(d: DelaySpec) -> Self {
        match d {
            DelaySpec::Constant(c) => DelayModel::Constant(c),
            DelaySpec::Uniform { min, max } => DelayModel::Uniform { min, max },
        }
    }
}

impl From<DelayModel> for DelaySpec {
    fn from(d: DelayModel) -> Self {
        match d {
            DelayModel::Constant(c) => DelaySpec::Constant(c),
            DelayModel::Uniform { min, max } => DelaySpec::Uniform { min, max },
        }
    }
}

/// Classifier thresholds; omitted fields keep their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sync_coherence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub async_coherence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub async_correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wave_correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stationary_speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splinter_correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splinter_circulation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_angular_speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub active_phase_speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_bins: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_empty_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_tail_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_speed: Option<f64>,
}

/// The on-disk configuration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agents: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaSpec>,

    #[serde(rename = "J", alias = "phase_attraction", skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(rename = "K", alias = "phase_coupling", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "P", alias = "alignment_strength", skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(rename = "C", alias = "alignment_speed", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(alias = "safety_radius", skip_serializing_if = "Option::is_none")]
    pub r_safe: Option<f64>,
    #[serde(alias = "max_speed", skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
    #[serde(alias = "max_turn_rate", skip_serializing_if = "Option::is_none")]
    pub theta_rate_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(alias = "min_gap", skip_serializing_if = "Option::is_none")]
    pub d_epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_backward: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub publish_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position_update_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_probability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<DelaySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_orientation: Option<bool>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdFile>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: name.clone(),
            source,
        })?;
        ConfigFile::parse(&text).map_err(|source| LoadError::Parse { path: name, source })
    }

    /// Fills every omitted field and validates the result.
    pub fn resolve(&self) -> Result<RunConfig, InvalidConfig> {
        let mode: ModelMode = self.mode.unwrap_or_default().into();
        let base = ModelParams::for_mode(
            mode,
            self.j.unwrap_or(0.1),
            self.k.unwrap_or(1.0),
            self.p.unwrap_or(0.0),
        );
        let max_speed = self.v_max.unwrap_or(base.max_speed);
        let params = ModelParams {
            max_speed,
            alignment_speed: self.c.unwrap_or(max_speed),
            safety_radius: self.r_safe.unwrap_or(base.safety_radius),
            max_turn_rate: self.theta_rate_max.unwrap_or(base.max_turn_rate),
            dt: self.dt.unwrap_or(base.dt),
            min_gap: self.d_epsilon.unwrap_or(base.min_gap),
            allow_backward: self.allow_backward.unwrap_or(base.allow_backward),
            ..base
        };
        let seed = self.seed;
        let defaults = SimConfig::new(mode, params, seed.unwrap_or(0));
        let sim = SimConfig {
            agents: self.agents.unwrap_or(defaults.agents),
            steps: self.steps.unwrap_or(defaults.steps),
            init_range: self.init_range.unwrap_or(defaults.init_range),
            sample_interval: self.sample_interval.unwrap_or(defaults.sample_interval),
            omega: match &self.omega {
                None => OmegaAssignment::UniformZero,
                Some(OmegaSpec::Scalar(w)) => OmegaAssignment::Scalar(*w),
                Some(OmegaSpec::PerAgent(ws)) => OmegaAssignment::PerAgent(ws.clone()),
            },
            ..defaults
        };
        sim.validate()?;

        let degenerate = NetConfig::degenerate(params.dt);
        let net = NetConfig {
            publish_period: self.publish_period.unwrap_or(degenerate.publish_period),
            position_update_period: self
                .position_update_period
                .unwrap_or(degenerate.position_update_period),
            loss_probability: self.loss_probability.unwrap_or(0.0),
            delay: self.delay.map(Into::into).unwrap_or(degenerate.delay),
            seed: self.net_seed.or(seed).unwrap_or(0),
            include_orientation: self.include_orientation.unwrap_or(true),
        };
        net.validate()?;

        let thresholds = resolve_thresholds(self.thresholds.as_ref().unwrap_or(&ThresholdFile::default()))?;
        Ok(RunConfig {
            sim,
            net,
            thresholds,
            seed,
        })
    }
}

fn resolve_thresholds(t: &ThresholdFile) -> Result<Thresholds, InvalidConfig> {
    let d = Thresholds::default();
    let th = Thresholds {
        sync_coherence: t.sync_coherence.unwrap_or(d.sync_coherence),
        async_coherence: t.async_coherence.unwrap_or(d.async_coherence),
        async_correlation: t.async_correlation.unwrap_or(d.async_correlation),
        wave_correlation: t.wave_correlation.unwrap_or(d.wave_correlation),
        stationary_speed: t.stationary_speed.unwrap_or(d.stationary_speed),
        splinter_correlation: t.splinter_correlation.unwrap_or(d.splinter_correlation),
        splinter_circulation: t.splinter_circulation.unwrap_or(d.splinter_circulation),
        active_angular_speed: t.active_angular_speed.unwrap_or(d.active_angular_speed),
        active_phase_speed: t.active_phase_speed.unwrap_or(d.active_phase_speed),
        cluster_bins: t.cluster_bins.unwrap_or(d.cluster_bins),
        cluster_empty_fraction: t.cluster_empty_fraction.unwrap_or(d.cluster_empty_fraction),
        cluster_block: t.cluster_block.unwrap_or(d.cluster_block),
        tail_fraction: t.tail_fraction.unwrap_or(d.tail_fraction),
        min_tail_samples: t.min_tail_samples.unwrap_or(d.min_tail_samples),
        convergence_window: t.convergence_window.unwrap_or(d.convergence_window),
        settle_speed: t.settle_speed.unwrap_or(d.settle_speed),
    };
    let bad = |msg: &str| Err(InvalidConfig::Thresholds(msg.to_string()));
    if !(th.tail_fraction > 0.0 && th.tail_fraction <= 1.0) {
        return bad("tail_fraction must lie in (0, 1]");
    }
    if th.min_tail_samples < 2 || th.convergence_window < 2 {
        return bad("min_tail_samples and convergence_window must be >= 2");
    }
    if th.cluster_bins < 2 || th.cluster_block == 0 {
        return bad("cluster_bins must be >= 2 and cluster_block >= 1");
    }
    let non_negative = [
        th.sync_coherence,
        th.async_coherence,
        th.async_correlation,
        th.wave_correlation,
        th.stationary_speed,
        th.splinter_correlation,
        th.splinter_circulation,
        th.active_angular_speed,
        th.active_phase_speed,
        th.cluster_empty_fraction,
        th.settle_speed,
    ];
    if non_negative.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return bad("threshold values must be finite and >= 0");
    }
    Ok(th)
}

/// A fully resolved, validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub net: NetConfig,
    pub thresholds: Thresholds,
    /// The seed as given; `None` when neither config nor command line set it.
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn require_seed(&self) -> Result<u64, InvalidConfig> {
        self.seed.ok_or(InvalidConfig::MissingSeed)
    }

    /// The config with every field written out.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.sim.params;
        let t = &self.thresholds;
        ConfigFile {
            mode: Some(self.sim.mode.into()),
            agents: Some(self.sim.agents),
            steps: Some(self.sim.steps),
            seed: self.seed,
            init_range: Some(self.sim.init_range),
            sample_interval: Some(self.sim.sample_interval),
            omega: match &self.sim.omega {
                OmegaAssignment::UniformZero => None,
                OmegaAssignment::Scalar(w) => Some(OmegaSpec::Scalar(*w)),
                OmegaAssignment::PerAgent(ws) => Some(OmegaSpec::PerAgent(ws.clone())),
            },
            j: Some(p.phase_attraction),
            k: Some(p.phase_coupling),
            p: Some(p.alignment_strength),
            c: Some(p.alignment_speed),
            r_safe: Some(p.safety_radius),
            v_max: Some(p.max_speed),
            theta_rate_max: Some(p.max_turn_rate),
            dt: Some(p.dt),
            d_epsilon: Some(p.min_gap),
            allow_backward: Some(p.allow_backward),
            publish_period: Some(self.net.publish_period),
            position_update_period: Some(self.net.position_update_period),
            loss_probability: Some(self.net.loss_probability),
            delay: Some(self.net.delay.into()),
            net_seed: Some(self.net.seed),
            include_orientation: Some(self.net.include_orientation),
            thresholds: Some(ThresholdFile {
                sync_coherence: Some(t.sync_coherence),
                async_coherence: Some(t.async_coherence),
                async_correlation: Some(t.async_correlation),
                wave_correlation: Some(t.wave_correlation),
                stationary_speed: Some(t.stationary_speed),
                splinter_correlation: Some(t.splinter_correlation),
                splinter_circulation: Some(t.splinter_circulation),
                active_angular_speed: Some(t.active_angular_speed),
                active_phase_speed: Some(t.active_phase_speed),
                cluster_bins: Some(t.cluster_bins),
                cluster_empty_fraction: Some(t.cluster_empty_fraction),
                cluster_block: Some(t.cluster_block),
                tail_fraction: Some(t.tail_fraction),
                min_tail_samples: Some(t.min_tail_samples),
                convergence_window: Some(t.convergence_window),
                settle_speed: Some(t.settle_speed),
            }),
        }
    }
}
