//! Lockstep integration: every agent sees every other agent's current state.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{Coincidence, InteractionField};
use crate::state::{AgentId, AgentState, ModelMode, ModelParams, ParamError, StateRates};
use crate::trace::TraceSink;
use crate::vec2::Vec2;

pub const DEFAULT_AGENTS: usize = 100;
pub const DEFAULT_STEPS: u64 = 20_000;
pub const DEFAULT_SAMPLE_INTERVAL: u64 = 10;
const PLACEMENT_ATTEMPTS: usize = 100_000;

/// How natural frequencies are assigned.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum OmegaAssignment {
    #[default]
    UniformZero,
    Scalar(f64),
    PerAgent(Vec<f64>),
}

impl OmegaAssignment {
    pub fn for_agent(&self, index: usize) -> f64 {
        match self {
            OmegaAssignment::UniformZero => 0.0,
            OmegaAssignment::Scalar(w) => *w,
            OmegaAssignment::PerAgent(ws) => ws[index],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub mode: ModelMode,
    pub agents: usize,
    pub params: ModelParams,
    pub steps: u64,
    pub seed: u64,
    /// Half-width of the square initial positions are drawn from.
    pub init_range: f64,
    pub omega: OmegaAssignment,
    /// Emit a snapshot every this many steps (the final step is always emitted).
    pub sample_interval: u64,
}

impl SimConfig {
    pub fn new(mode: ModelMode, params: ModelParams, seed: u64) -> Self {
        SimConfig {
            mode,
            agents: DEFAULT_AGENTS,
            params,
            steps: DEFAULT_STEPS,
            seed,
            init_range: 1.0,
            omega: OmegaAssignment::UniformZero,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        if self.agents == 0 {
            return Err(ConfigError::NoAgents);
        }
        if !(self.init_range > 0.0 && self.init_range.is_finite()) {
            return Err(ConfigError::InitRange(self.init_range));
        }
        if self.sample_interval == 0 {
            return Err(ConfigError::SampleInterval);
        }
        if let OmegaAssignment::PerAgent(ws) = &self.omega {
            if ws.len() != self.agents {
                return Err(ConfigError::OmegaCount {
                    expected: self.agents,
                    got: ws.len(),
                });
            }
        }
        Ok(())
    }
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig::new(ModelMode::Robot, ModelParams::default(), 0)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("agent count must be >= 1")]
    NoAgents,
    #[error("init_range must be > 0, got {0}")]
    InitRange(f64),
    #[error("sample_interval must be >= 1")]
    SampleInterval,
    #[error("per-agent natural frequencies: expected {expected}, got {got}")]
    OmegaCount { expected: usize, got: usize },
    #[error("could not place {agents} non-overlapping safety areas of radius {radius} in the initial square")]
    Placement { agents: usize, radius: f64 },
}

#[derive(Debug, thiserror::Error)]
pub enum RunError<E> {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Net(#[from] crate::harness::NetConfigError),
    #[error("trace sink failed")]
    Sink(E),
}

/// The whole swarm at one instant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SwarmSnapshot {
    pub time: f64,
    pub agents: Vec<AgentState>,
}

impl SwarmSnapshot {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn get(&self, id: AgentId) -> Option<&AgentState> {
        self.agents.iter().find(|a| a.id == id)
    }
}

/// Random initial swarm: positions uniform in the init square, phases and
/// orientations uniform on the circle. Deterministic in the seed.
///
/// When the safety radius is positive, positions are redrawn until no two
/// safety areas overlap.
pub fn init_uniform(config: &SimConfig) -> Result<SwarmSnapshot, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let half = config.init_range;
    let min_sep = match config.mode {
        ModelMode::Robot => 2.0 * config.params.safety_radius,
        ModelMode::Original => 0.0,
    };
    let mut agents: Vec<AgentState> = Vec::with_capacity(config.agents);
    for index in 0..config.agents {
        let mut attempts = 0;
        let position = loop {
            let p = Vec2::new(rng.gen_range(-half..=half), rng.gen_range(-half..=half));
            if agents.iter().all(|a| (a.position - p).norm() > min_sep) {
                break p;
            }
            attempts += 1;
            if attempts >= PLACEMENT_ATTEMPTS {
                return Err(ConfigError::Placement {
                    agents: config.agents,
                    radius: config.params.safety_radius,
                });
            }
        };
        let orientation = rng.gen_range(0.0..TAU);
        let phase = rng.gen_range(0.0..TAU);
        agents.push(
            AgentState::new(index as AgentId, position, orientation, phase)
                .with_natural_frequency(config.omega.for_agent(index)),
        );
    }
    Ok(SwarmSnapshot { time: 0.0, agents })
}

/// Rates of every agent under perfect information.
pub fn lockstep_rates(
    snapshot: &SwarmSnapshot,
    mode: ModelMode,
    params: &ModelParams,
) -> Vec<StateRates> {
    InteractionField::from_states(&snapshot.agents)
        .all_rates(mode, params, Coincidence::Offset)
        .expect("offset policy never rejects")
}

/// One explicit Euler step of the chosen model.
pub fn step(snapshot: &SwarmSnapshot, mode: ModelMode, params: &ModelParams) -> SwarmSnapshot {
    let rates = lockstep_rates(snapshot, mode, params);
    let mut next = snapshot.clone();
    for (agent, r) in next.agents.iter_mut().zip(&rates) {
        agent.advance(r, params.dt);
    }
    next.time = snapshot.time + params.dt;
    next
}

/// Original model: agents move along their desired velocity (point repulsion, no limits).
pub fn step_original(snapshot: &SwarmSnapshot, params: &ModelParams) -> SwarmSnapshot {
    step(snapshot, ModelMode::Original, params)
}

/// Robot model: heading-constrained, speed- and turn-limited motion with safety areas.
pub fn step_robot(snapshot: &SwarmSnapshot, params: &ModelParams) -> SwarmSnapshot {
    step(snapshot, ModelMode::Robot, params)
}

/// Lockstep run that can be driven one step at a time.
#[derive(Clone, Debug)]
pub struct Lockstep {
    mode: ModelMode,
    params: ModelParams,
    snapshot: SwarmSnapshot,
    steps_taken: u64,
}

impl Lockstep {
    pub fn new(config: &SimConfig) -> Result<Self, ConfigError> {
        Ok(Lockstep::from_snapshot(init_uniform(config)?, config.mode, config.params))
    }

    pub fn from_snapshot(snapshot: SwarmSnapshot, mode: ModelMode, params: ModelParams) -> Self {
        Lockstep {
            mode,
            params,
            snapshot,
            steps_taken: 0,
        }
    }

    pub fn advance(&mut self) {
        self.snapshot = step(&self.snapshot, self.mode, &self.params);
        self.steps_taken += 1;
        // avoid accumulating rounding in the clock
        self.snapshot.time = self.steps_taken as f64 * self.params.dt;
    }

    pub fn snapshot(&self) -> &SwarmSnapshot {
        &self.snapshot
    }

    pub fn into_snapshot(self) -> SwarmSnapshot {
        self.snapshot
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }
}

/// Runs `config.steps` lockstep steps, emitting the initial state, every
/// `sample_interval`-th step and the final step.
pub fn run<S: TraceSink>(config: &SimConfig, mut sink: S) -> Result<SwarmSnapshot, RunError<S::Error>> {
    let mut sim = Lockstep::new(config)?;
    sink.snapshot(sim.snapshot()).map_err(RunError::Sink)?;
    for k in 1..=config.steps {
        sim.advance();
        if k % config.sample_interval == 0 || k == config.steps {
            sink.snapshot(sim.snapshot()).map_err(RunError::Sink)?;
        }
    }
    Ok(sim.into_snapshot())
}
