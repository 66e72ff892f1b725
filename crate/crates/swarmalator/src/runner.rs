//! Running, analysing and comparing whole simulations.

use std::convert::Infallible;

use swarmalator_core::angle;
use swarmalator_core::harness::run_distributed;
use swarmalator_core::metrics::{
    classify, convergence_time, min_safety_gap, Classification, Convergence, MetricsError, Thresholds,
};
use swarmalator_core::sim::{run, RunError, SwarmSnapshot};
use swarmalator_core::trace::SnapshotCollector;
use swarmalator_core::ModelMode;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Every agent sees every other agent's current state.
    Lockstep,
    /// Event-driven run under the configured network.
    Distributed,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Lockstep => "simulate",
            Engine::Distributed => "simulate-dist",
        }
    }
}

/// Runs the configuration and returns every sampled snapshot.
pub fn simulate(rc: &RunConfig, engine: Engine) -> Result<Vec<SwarmSnapshot>, RunError<Infallible>> {
    let mut col = SnapshotCollector::default();
    match engine {
        Engine::Lockstep => run(&rc.sim, &mut col)?,
        Engine::Distributed => run_distributed(&rc.sim, &rc.net, &mut col)?,
    };
    Ok(col.snapshots)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Analysis {
    pub classification: Classification,
    pub convergence: Option<Convergence>,
    /// Smallest gap between safety areas over all samples; robot mode only.
    pub min_gap: Option<f64>,
}

pub fn analyse(
    trace: &[SwarmSnapshot],
    th: &Thresholds,
    safety: Option<f64>,
) -> Result<Analysis, MetricsError> {
    Ok(Analysis {
        classification: classify(trace, th)?,
        convergence: convergence_time(trace, th, 1)?,
        min_gap: safety.map(|r| {
            trace
                .iter()
                .map(|s| min_safety_gap(s, r))
                .fold(f64::INFINITY, f64::min)
        }),
    })
}

/// Safety radius to audit for a run, if the mode has one.
pub fn audited_radius(rc: &RunConfig) -> Option<f64> {
    (rc.sim.mode == ModelMode::Robot).then_some(rc.sim.params.safety_radius)
}

/// Largest per-component gap between two traces sampled at the same instants.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Deviation {
    pub position: f64,
    pub orientation: f64,
    pub phase: f64,
    pub samples: usize,
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.position.max(self.orientation).max(self.phase)
    }
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
#[error("traces differ in shape at sample {0}")]
pub struct ShapeMismatch(pub usize);

pub fn deviation(a: &[SwarmSnapshot], b: &[SwarmSnapshot]) -> Result<Deviation, ShapeMismatch> {
    if a.len() != b.len() {
        return Err(ShapeMismatch(a.len().min(b.len())));
    }
    let mut d = Deviation {
        samples: a.len(),
        ..Deviation::default()
    };
    for (k, (sa, sb)) in a.iter().zip(b).enumerate() {
        if sa.time != sb.time || sa.len() != sb.len() {
            return Err(ShapeMismatch(k));
        }
        for (x, y) in sa.agents.iter().zip(&sb.agents) {
            if x.id != y.id {
                return Err(ShapeMismatch(k));
            }
            d.position = d
                .position
                .max((x.position.x - y.position.x).abs())
                .max((x.position.y - y.position.y).abs());
            d.orientation = d
                .orientation
                .max(angle::principal(x.orientation() - y.orientation()).abs());
            d.phase = d.phase.max(angle::principal(x.phase() - y.phase()).abs());
        }
    }
    Ok(d)
}

/// Runs both engines on the same configuration and measures how far apart they end up.
pub fn compare(rc: &RunConfig) -> Result<Deviation, RunError<Infallible>> {
    let lock = simulate(rc, Engine::Lockstep)?;
    let dist = simulate(rc, Engine::Distributed)?;
    Ok(deviation(&lock, &dist).expect("both engines sample the same instants"))
}
