//! State and parameter types shared by every simulation mode.

use core::f64::consts::PI;

use crate::angle;
use crate::vec2::Vec2;

/// Identifier of one agent. Unique within a swarm.
pub type AgentId = u32;

/// Full state of one agent.
///
/// Phase and orientation are kept wrapped into `[0, 2π)`; use the setters to
/// change them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub position: Vec2,
    orientation: f64,
    phase: f64,
    pub natural_frequency: f64,
}

impl AgentState {
    pub fn new(id: AgentId, position: Vec2, orientation: f64, phase: f64) -> Self {
        AgentState {
            id,
            position,
            orientation: angle::wrap(orientation),
            phase: angle::wrap(phase),
            natural_frequency: 0.0,
        }
    }

    pub fn with_natural_frequency(mut self, omega: f64) -> Self {
        self.natural_frequency = omega;
        self
    }

    #[inline]
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    #[inline]
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn set_orientation(&mut self, theta: f64) {
        self.orientation = angle::wrap(theta);
    }

    pub fn set_phase(&mut self, phi: f64) {
        self.phase = angle::wrap(phi);
    }

    /// Unit vector along the current orientation.
    pub fn heading(&self) -> Vec2 {
        Vec2::from_angle(self.orientation)
    }

    /// Advances the state by `dt` under constant `rates` (explicit Euler step).
    pub fn advance(&mut self, rates: &StateRates, dt: f64) {
        self.position += rates.velocity * dt;
        self.set_orientation(self.orientation + rates.orientation_rate * dt);
        self.set_phase(self.phase + rates.phase_rate * dt);
    }

    pub fn is_valid(&self) -> bool {
        let in_range = |a: f64| (0.0..core::f64::consts::TAU).contains(&a);
        self.position.is_finite() && in_range(self.orientation) && in_range(self.phase)
    }
}

/// Which set of equations drives the swarm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelMode {
    /// Point entities moving freely along their desired velocity.
    Original,
    /// Unicycle-constrained entities with safety areas and speed limits.
    Robot,
}

impl ModelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelMode::Original => "original",
            ModelMode::Robot => "robot",
        }
    }
}

/// Coupling and constraint constants.
///
/// The swarm is always planar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// How strongly phase similarity modulates spatial attraction, in `[-1, 1]`.
    pub phase_attraction: f64,
    /// Phase coupling strength; positive pulls phases together.
    pub phase_coupling: f64,
    /// Orientation alignment strength, `>= 0`. Zero disables alignment.
    pub alignment_strength: f64,
    /// Speed constant of the alignment gate (threshold speed is strength × this).
    pub alignment_speed: f64,
    /// Radius of each agent's circular safety area.
    pub safety_radius: f64,
    /// Linear speed cap.
    pub max_speed: f64,
    /// Angular rate cap.
    pub max_turn_rate: f64,
    /// Integration time step.
    pub dt: f64,
    /// Lower bound on the gap between safety areas used by robot repulsion.
    pub min_gap: f64,
    /// Whether a robot may drive backwards when its desired velocity points behind it.
    pub allow_backward: bool,
}

pub const DEFAULT_MAX_SPEED: f64 = 0.15;
pub const DEFAULT_MAX_TURN_RATE: f64 = PI;
pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_SAFETY_RADIUS: f64 = 0.05;
pub const DEFAULT_MIN_GAP: f64 = 1e-3;

impl ModelParams {
    /// Defaults for the robot model: alignment speed equals the speed cap.
    pub fn robot(phase_attraction: f64, phase_coupling: f64, alignment_strength: f64) -> Self {
        ModelParams {
            phase_attraction,
            phase_coupling,
            alignment_strength,
            alignment_speed: DEFAULT_MAX_SPEED,
            safety_radius: DEFAULT_SAFETY_RADIUS,
            max_speed: DEFAULT_MAX_SPEED,
            max_turn_rate: DEFAULT_MAX_TURN_RATE,
            dt: DEFAULT_DT,
            min_gap: DEFAULT_MIN_GAP,
            allow_backward: true,
        }
    }

    /// Defaults for the original model: point entities, no safety area.
    pub fn original(phase_attraction: f64, phase_coupling: f64) -> Self {
        ModelParams {
            safety_radius: 0.0,
            ..ModelParams::robot(phase_attraction, phase_coupling, 0.0)
        }
    }

    pub fn for_mode(mode: ModelMode, j: f64, k: f64, p: f64) -> Self {
        match mode {
            ModelMode::Original => ModelParams::original(j, k),
            ModelMode::Robot => ModelParams::robot(j, k, p),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let checks: [(bool, ParamError); 9] = [
            (
                (-1.0..=1.0).contains(&self.phase_attraction),
                ParamError::PhaseAttraction(self.phase_attraction),
            ),
            (
                self.phase_coupling.is_finite(),
                ParamError::PhaseCoupling(self.phase_coupling),
            ),
            (
                self.alignment_strength >= 0.0 && self.alignment_strength.is_finite(),
                ParamError::AlignmentStrength(self.alignment_strength),
            ),
            (
                self.alignment_speed > 0.0 && self.alignment_speed.is_finite(),
                ParamError::AlignmentSpeed(self.alignment_speed),
            ),
            (
                self.safety_radius >= 0.0 && self.safety_radius.is_finite(),
                ParamError::SafetyRadius(self.safety_radius),
            ),
            (self.max_speed > 0.0, ParamError::MaxSpeed(self.max_speed)),
            (
                self.max_turn_rate > 0.0,
                ParamError::MaxTurnRate(self.max_turn_rate),
            ),
            (
                self.dt > 0.0 && self.dt.is_finite(),
                ParamError::TimeStep(self.dt),
            ),
            (
                self.min_gap > 0.0 && self.min_gap.is_finite(),
                ParamError::MinGap(self.min_gap),
            ),
        ];
        for (ok, err) in checks {
            if !ok {
                return Err(err);
            }
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::robot(0.1, 1.0, 0.0)
    }
}

/// A parameter outside its admissible domain. The message names the violated bound.
#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("phase_attraction (J) must lie in [-1, 1], got {0}")]
    PhaseAttraction(f64),
    #[error("phase_coupling (K) must be finite, got {0}")]
    PhaseCoupling(f64),
    #[error("alignment_strength (P) must be >= 0, got {0}")]
    AlignmentStrength(f64),
    #[error("alignment_speed (C) must be > 0, got {0}")]
    AlignmentSpeed(f64),
    #[error("safety_radius must be >= 0, got {0}")]
    SafetyRadius(f64),
    #[error("max_speed must be > 0, got {0}")]
    MaxSpeed(f64),
    #[error("max_turn_rate must be > 0, got {0}")]
    MaxTurnRate(f64),
    #[error("dt must be > 0, got {0}")]
    TimeStep(f64),
    #[error("min_gap must be > 0, got {0}")]
    MinGap(f64),
}

/// Unconstrained movement command of one agent.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DesiredVelocity(pub Vec2);

/// Time derivatives of one agent's state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateRates {
    pub velocity: Vec2,
    pub orientation_rate: f64,
    pub phase_rate: f64,
}
