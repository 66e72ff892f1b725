use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

use super::cache::StateMessage;
use crate::state::AgentId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    Publish { agent: AgentId },
    Deliver { message: StateMessage, recipient: AgentId },
    PositionUpdate { agent: AgentId },
}

impl EventKind {
    /// Order among events due at the same instant: every publication, then
    /// every delivery, then control updates.
    pub fn rank(&self) -> u8 {
        match self {
            EventKind::Publish { .. } => 0,
            EventKind::Deliver { .. } => 1,
            EventKind::PositionUpdate { .. } => 2,
        }
    }

    pub fn agent(&self) -> AgentId {
        match *self {
            EventKind::Publish { agent } | EventKind::PositionUpdate { agent } => agent,
            EventKind::Deliver { recipient, .. } => recipient,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub due: f64,
    pub kind: EventKind,
    pub seq: u64,
}

impl Event {
    fn key(&self) -> (f64, u8, AgentId, u64) {
        (self.due, self.kind.rank(), self.kind.agent(), self.seq)
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
#[error("event due at {due} scheduled while the clock reads {now}")]
pub struct CausalityError {
    pub due: f64,
    pub now: f64,
}

/// Min-queue of events ordered by (due time, kind rank, agent id, insertion sequence).
#[derive(Clone, Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
    now: f64,
}

impl EventQueue {
    pub fn new() -> Self {
        EventQueue::default()
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn schedule(&mut self, due: f64, kind: EventKind) -> Result<(), CausalityError> {
        if due < self.now || due.is_nan() {
            return Err(CausalityError { due, now: self.now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Event { due, kind, seq }));
        Ok(())
    }

    pub fn peek_due(&self) -> Option<f64> {
        self.heap.peek().map(|Reverse(e)| e.due)
    }

    /// Removes the next event and moves the clock to its due time.
    pub fn pop(&mut self) -> Option<Event> {
        let Reverse(e) = self.heap.pop()?;
        self.now = e.due;
        Some(e)
    }

    /// Pending events in no particular order.
    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.heap.iter().map(|Reverse(e)| e)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
