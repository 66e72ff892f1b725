//! Discrete-event execution of the swarm with per-agent message caches.
//!
//! Each agent periodically broadcasts its state, keeps the freshest message
//! from every peer, and recomputes its control only when the positioning
//! service reports its position. Between updates an agent moves under its
//! last-computed rates.

mod cache;
mod queue;

pub use cache::{CacheEntry, NeighborCache, StateMessage};
pub use queue::{CausalityError, Event, EventKind, EventQueue};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{Coincidence, InteractionField};
use crate::sim::{init_uniform, RunError, SimConfig, SwarmSnapshot};
use crate::state::{AgentId, AgentState, ModelMode, ModelParams, StateRates};
use crate::trace::TraceSink;
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayModel {
    Constant(f64),
    Uniform { min: f64, max: f64 },
}

impl DelayModel {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            DelayModel::Constant(d) => d,
            DelayModel::Uniform { min, max } if min == max => min,
            DelayModel::Uniform { min, max } => rng.gen_range(min..=max),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetConfig {
    pub publish_period: f64,
    pub loss_probability: f64,
    pub delay: DelayModel,
    pub position_update_period: f64,
    pub seed: u64,
    /// Whether messages carry the sender's orientation.
    pub include_orientation: bool,
}

impl NetConfig {
    /// Instant, lossless links with every period equal to `dt`.
    pub fn degenerate(dt: f64) -> Self {
        NetConfig {
            publish_period: dt,
            loss_probability: 0.0,
            delay: DelayModel::Constant(0.0),
            position_update_period: dt,
            seed: 0,
            include_orientation: true,
        }
    }

    pub fn validate(&self) -> Result<(), NetConfigError> {
        if !(self.publish_period > 0.0 && self.publish_period.is_finite()) {
            return Err(NetConfigError::PublishPeriod(self.publish_period));
        }
        if !(self.position_update_period > 0.0 && self.position_update_period.is_finite()) {
            return Err(NetConfigError::UpdatePeriod(self.position_update_period));
        }
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return Err(NetConfigError::Loss(self.loss_probability));
        }
        let ok = match self.delay {
            DelayModel::Constant(d) => d >= 0.0 && d.is_finite(),
            DelayModel::Uniform { min, max } => min >= 0.0 && min <= max && max.is_finite(),
        };
        if !ok {
            return Err(NetConfigError::Delay(self.delay));
        }
        Ok(())
    }
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig::degenerate(crate::state::DEFAULT_DT)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum NetConfigError {
    #[error("publish_period must be positive and finite, got {0}")]
    PublishPeriod(f64),
    #[error("position_update_period must be positive and finite, got {0}")]
    UpdatePeriod(f64),
    #[error("loss_probability must lie in [0, 1], got {0}")]
    Loss(f64),
    #[error("delays must be finite and non-negative with min <= max, got {0:?}")]
    Delay(DelayModel),
    #[error("agent ids must be unique, {0} appears twice")]
    DuplicateAgent(AgentId),
}

/// Message and event counters of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HarnessStats {
    pub published: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub stale: u64,
    pub position_updates: u64,
}

#[derive(Clone, Debug)]
struct Agent {
    truth: AgentState,
    held: StateRates,
    moved_at: f64,
    cache: NeighborCache,
    publishes: u64,
    updates: u64,
}

impl Agent {
    fn advance_to(&mut self, t: f64) {
        let dt = t - self.moved_at;
        if dt > 0.0 {
            self.truth.advance(&self.held, dt);
            self.moved_at = t;
        }
    }

    fn projected(&self, t: f64) -> AgentState {
        let mut s = self.truth;
        let dt = t - self.moved_at;
        if dt > 0.0 {
            s.advance(&self.held, dt);
        }
        s
    }
}

/// Event-driven swarm. Agents see each other only through delivered messages.
#[derive(Clone, Debug)]
pub struct Harness {
    mode: ModelMode,
    params: ModelParams,
    net: NetConfig,
    agents: Vec<Agent>,
    index: BTreeMap<AgentId, usize>,
    queue: EventQueue,
    rng: ChaCha8Rng,
    field: InteractionField,
    stats: HarnessStats,
}

impl Harness {
    /// Starts a run at `initial.time` with every agent publishing, then
    /// updating, at that instant.
    pub fn new(
        initial: SwarmSnapshot,
        mode: ModelMode,
        params: ModelParams,
        net: NetConfig,
    ) -> Result<Self, NetConfigError> {
        net.validate()?;
        let mut agents = Vec::with_capacity(initial.agents.len());
        let mut index = BTreeMap::new();
        for (k, s) in initial.agents.iter().enumerate() {
            if index.insert(s.id, k).is_some() {
                return Err(NetConfigError::DuplicateAgent(s.id));
            }
            agents.push(Agent {
                truth: *s,
                held: StateRates::default(),
                moved_at: initial.time,
                cache: NeighborCache::new(),
                publishes: 0,
                updates: 0,
            });
        }
        let mut h = Harness {
            mode,
            params,
            net,
            field: InteractionField::with_capacity(agents.len()),
            agents,
            index,
            queue: EventQueue::new(),
            rng: ChaCha8Rng::seed_from_u64(net.seed),
            stats: HarnessStats::default(),
        };
        let t0 = initial.time;
        let ids: Vec<AgentId> = h.index.keys().copied().collect();
        for id in ids {
            h.schedule(t0, EventKind::Publish { agent: id });
            h.schedule(t0, EventKind::PositionUpdate { agent: id });
        }
        Ok(h)
    }

    fn schedule(&mut self, due: f64, kind: EventKind) {
        self.queue
            .schedule(due, kind)
            .expect("harness only schedules at or after the current time");
    }

    pub fn now(&self) -> f64 {
        self.queue.now()
    }

    pub fn stats(&self) -> HarnessStats {
        self.stats
    }

    pub fn net(&self) -> &NetConfig {
        &self.net
    }

    /// Events waiting in the queue, in no particular order.
    pub fn pending(&self) -> impl Iterator<Item = &Event> {
        self.queue.iter()
    }

    pub fn cache(&self, agent: AgentId) -> Option<&NeighborCache> {
        self.index.get(&agent).map(|&k| &self.agents[k].cache)
    }

    /// Rates the agent is currently executing.
    pub fn held_rates(&self, agent: AgentId) -> Option<StateRates> {
        self.index.get(&agent).map(|&k| self.agents[k].held)
    }

    /// Moves an agent instantly, bypassing the dynamics.
    pub fn teleport(&mut self, agent: AgentId, position: Vec2) {
        if let Some(&k) = self.index.get(&agent) {
            let now = self.now();
            self.agents[k].advance_to(now);
            self.agents[k].truth.position = position;
        }
    }

    /// Ground truth at time `t`, which must not precede the last processed event.
    pub fn snapshot_at(&self, t: f64) -> SwarmSnapshot {
        SwarmSnapshot {
            time: t,
            agents: self.agents.iter().map(|a| a.projected(t)).collect(),
        }
    }

    /// Processes the next event. Returns `false` when the queue is empty.
    pub fn step(&mut self) -> bool {
        let Some(event) = self.queue.pop() else {
            return false;
        };
        match event.kind {
            EventKind::Publish { agent } => {
                self.publish(agent);
            }
            EventKind::Deliver { message, recipient } => {
                self.deliver(message, recipient);
            }
            EventKind::PositionUpdate { agent } => self.positioning_update(agent),
        }
        true
    }

    /// Processes every event due at or before `t`.
    pub fn run_until(&mut self, t: f64) {
        while self.queue.peek_due().is_some_and(|due| due <= t) {
            self.step();
        }
    }

    /// Broadcasts the agent's state and schedules its next publication.
    /// Returns the number of deliveries scheduled.
    pub fn publish(&mut self, agent: AgentId) -> usize {
        let Some(&k) = self.index.get(&agent) else {
            return 0;
        };
        let now = self.now();
        let a = &mut self.agents[k];
        a.advance_to(now);
        let message = StateMessage {
            sender: agent,
            phase: a.truth.phase(),
            position: a.truth.position,
            orientation: self.net.include_orientation.then(|| a.truth.orientation()),
            publish_time: now,
        };
        a.publishes += 1;
        let next = a.publishes as f64 * self.net.publish_period;
        self.stats.published += 1;

        let mut sent = 0;
        for k2 in 0..self.agents.len() {
            if k2 == k {
                continue;
            }
            let recipient = self.agents[k2].truth.id;
            if self.rng.gen::<f64>() < self.net.loss_probability {
                self.stats.dropped += 1;
                continue;
            }
            let delay = self.net.delay.sample(&mut self.rng);
            self.schedule(now + delay, EventKind::Deliver { message, recipient });
            sent += 1;
        }
        self.schedule(next.max(now), EventKind::Publish { agent });
        sent
    }

    /// Hands a message to its recipient's cache. Returns whether the cache changed.
    pub fn deliver(&mut self, message: StateMessage, recipient: AgentId) -> bool {
        let Some(&k) = self.index.get(&recipient) else {
            return false;
        };
        let now = self.now();
        let fresh = self.agents[k].cache.deliver(message, now);
        if fresh {
            self.stats.delivered += 1;
        } else {
            self.stats.stale += 1;
        }
        fresh
    }

    /// Moves the agent to the present, then recomputes its rates from its
    /// own position and its cache alone.
    pub fn positioning_update(&mut self, agent: AgentId) {
        let Some(&k) = self.index.get(&agent) else {
            return;
        };
        let now = self.now();
        self.agents[k].advance_to(now);
        self.agents[k].held = self.control(k);
        self.agents[k].updates += 1;
        self.stats.position_updates += 1;
        let next = self.agents[k].updates as f64 * self.net.position_update_period;
        self.schedule(next.max(now), EventKind::PositionUpdate { agent });
    }

    fn control(&mut self, k: usize) -> StateRates {
        let me = &self.agents[k];
        let own = me.truth;
        self.field.clear();
        let mut own_slot = None;
        for e in me.cache.iter() {
            if own_slot.is_none() && e.message.sender > own.id {
                own_slot = Some(self.field.len());
                push_own(&mut self.field, &own);
            }
            let m = &e.message;
            self.field.push(m.sender, m.position, m.phase, m.orientation, 0.0);
        }
        let own_slot = own_slot.unwrap_or_else(|| {
            push_own(&mut self.field, &own);
            self.field.len() - 1
        });
        self.field
            .rates(own_slot, self.mode, &self.params, Coincidence::Offset)
            .expect("offset policy never rejects")
    }
}

fn push_own(field: &mut InteractionField, s: &AgentState) {
    field.push(
        s.id,
        s.position,
        s.phase(),
        Some(s.orientation()),
        s.natural_frequency,
    );
}

/// Runs `config.steps · dt` time units under `net`, emitting ground truth at
/// the same instants as the lockstep runner.
pub fn run_distributed<S: TraceSink>(
    config: &SimConfig,
    net: &NetConfig,
    mut sink: S,
) -> Result<SwarmSnapshot, RunError<S::Error>> {
    let initial = init_uniform(config)?;
    let mut h = Harness::new(initial, config.mode, config.params, *net)?;
    let dt = config.params.dt;
    for k in 0..=config.steps {
        let t = k as f64 * dt;
        h.run_until(t);
        if k % config.sample_interval == 0 || k == config.steps {
            sink.snapshot(&h.snapshot_at(t)).map_err(RunError::Sink)?;
        }
    }
    Ok(h.snapshot_at(config.steps as f64 * dt))
}
