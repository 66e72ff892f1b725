//! Swarmalator dynamics for free point entities and for unicycle robots.
//!
//! The crate is `no_std` (with `alloc`). It contains the interaction kernels,
//! a lockstep Euler integrator, an event-driven harness that replays the same
//! dynamics over lossy delayed messaging, and the order parameters used to
//! recognise the emergent space-time patterns.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod angle;
pub mod dynamics;
pub mod harness;
pub mod kernels;
pub mod metrics;
pub mod sim;
pub mod state;
pub mod trace;
mod vec2;

pub use dynamics::{Coincidence, InteractionField, Repulsion};
pub use kernels::KernelError;
pub use state::{AgentId, AgentState, DesiredVelocity, ModelMode, ModelParams, ParamError, StateRates};
pub use vec2::Vec2;
pub use sim::{SimConfig, SwarmSnapshot};
pub use trace::{TraceRecord, TraceSink};
