//! Trace records and sinks.

use alloc::vec::Vec;
use core::convert::Infallible;

use crate::sim::SwarmSnapshot;
use crate::state::{AgentId, AgentState};
use crate::vec2::Vec2;

/// One sampled agent state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub agent_id: AgentId,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub phi: f64,
}

impl TraceRecord {
    pub fn of(time: f64, agent: &AgentState) -> Self {
        TraceRecord {
            time,
            agent_id: agent.id,
            x: agent.position.x,
            y: agent.position.y,
            theta: agent.orientation(),
            phi: agent.phase(),
        }
    }

    /// Rebuilds the agent state; the natural frequency is not traced and comes back as 0.
    pub fn to_state(&self) -> AgentState {
        AgentState::new(self.agent_id, Vec2::new(self.x, self.y), self.theta, self.phi)
    }
}

/// Destination for trace records emitted by a run.
pub trait TraceSink {
    type Error;

    fn record(&mut self, record: &TraceRecord) -> Result<(), Self::Error>;

    fn snapshot(&mut self, snapshot: &SwarmSnapshot) -> Result<(), Self::Error> {
        for agent in &snapshot.agents {
            self.record(&TraceRecord::of(snapshot.time, agent))?;
        }
        Ok(())
    }
}

impl TraceSink for Vec<TraceRecord> {
    type Error = Infallible;

    fn record(&mut self, record: &TraceRecord) -> Result<(), Infallible> {
        self.push(*record);
        Ok(())
    }
}

impl<S: TraceSink + ?Sized> TraceSink for &mut S {
    type Error = S::Error;

    fn record(&mut self, record: &TraceRecord) -> Result<(), Self::Error> {
        (**self).record(record)
    }

    fn snapshot(&mut self, snapshot: &SwarmSnapshot) -> Result<(), Self::Error> {
        (**self).snapshot(snapshot)
    }
}

/// Discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullSink;

impl TraceSink for NullSink {
    type Error = Infallible;

    fn record(&mut self, _: &TraceRecord) -> Result<(), Infallible> {
        Ok(())
    }
}

/// Keeps whole snapshots instead of flat records.
#[derive(Clone, Debug, Default)]
pub struct SnapshotCollector {
    pub snapshots: Vec<SwarmSnapshot>,
}

impl TraceSink for SnapshotCollector {
    type Error = Infallible;

    fn record(&mut self, record: &TraceRecord) -> Result<(), Infallible> {
        let state = record.to_state();
        match self.snapshots.last_mut() {
            Some(last)
                if last.time == record.time
                    && last.agents.iter().all(|a| a.id != record.agent_id) =>
            {
                last.agents.push(state)
            }
            _ => self.snapshots.push(SwarmSnapshot {
                time: record.time,
                agents: alloc::vec![state],
            }),
        }
        Ok(())
    }

    fn snapshot(&mut self, snapshot: &SwarmSnapshot) -> Result<(), Infallible> {
        self.snapshots.push(snapshot.clone());
        Ok(())
    }
}

/// Groups a flat record sequence into snapshots, one per distinct timestamp run.
pub fn group_snapshots(records: &[TraceRecord]) -> Vec<SwarmSnapshot> {
    let mut collector = SnapshotCollector::default();
    for r in records {
        let _ = collector.record(r);
    }
    collector.snapshots
}
