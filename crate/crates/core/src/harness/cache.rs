use alloc::collections::BTreeMap;

use crate::state::AgentId;
use crate::vec2::Vec2;

/// What an agent broadcasts about itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateMessage {
    pub sender: AgentId,
    pub phase: f64,
    pub position: Vec2,
    /// `None` when orientation is stripped from the wire format.
    pub orientation: Option<f64>,
    pub publish_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacheEntry {
    pub message: StateMessage,
    pub received_at: f64,
}

/// Last message received from each sender.
///
/// An entry is only replaced by a message published strictly later, so
/// reordered or duplicated deliveries never roll a neighbour back.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NeighborCache {
    entries: BTreeMap<AgentId, CacheEntry>,
}

impl NeighborCache {
    pub fn new() -> Self {
        NeighborCache::default()
    }

    /// Stores `message` if it is fresher than what is held for its sender.
    /// Returns whether the cache changed.
    pub fn deliver(&mut self, message: StateMessage, now: f64) -> bool {
        match self.entries.get(&message.sender) {
            Some(held) if held.message.publish_time >= message.publish_time => false,
            _ => {
                self.entries.insert(
                    message.sender,
                    CacheEntry {
                        message,
                        received_at: now,
                    },
                );
                true
            }
        }
    }

    pub fn get(&self, sender: AgentId) -> Option<&CacheEntry> {
        self.entries.get(&sender)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending sender order.
    pub fn iter(&self) -> impl Iterator<Item = &CacheEntry> {
        self.entries.values()
    }
}
