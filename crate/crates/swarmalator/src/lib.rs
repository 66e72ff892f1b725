//! Files and command-line plumbing around [`swarmalator_core`]: JSON run
//! configs, CSV traces, SVG renders, metrics reports and run manifests.

pub mod config;
pub mod manifest;
pub mod render;
pub mod report;
pub mod runner;
pub mod trace_io;

pub use swarmalator_core;
