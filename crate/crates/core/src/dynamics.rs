//! Per-agent rate equations for both model variants.
//!
//! [`InteractionField`] holds the states one agent can see (itself included)
//! with their phase and heading phasors precomputed, so that a full sweep over
//! all agents costs no trigonometry per pair. The free functions at the bottom
//! are thin single-agent entry points over the same code path.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::kernels::{self, KernelError};
use crate::state::{AgentId, AgentState, DesiredVelocity, ModelMode, ModelParams, StateRates};
use crate::vec2::Vec2;

/// What to do when two agents occupy exactly the same point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coincidence {
    /// Surface [`KernelError::CoincidentPositions`].
    Reject,
    /// Replace the displacement by [`coincident_offset`].
    Offset,
}

/// Which repulsion kernel the movement sum uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Repulsion {
    /// `x / |x|²`
    Point,
    /// `x / d²` with `d` the floored gap between safety areas.
    SafetyArea { radius: f64, min_gap: f64 },
}

impl Repulsion {
    pub fn for_mode(mode: ModelMode, params: &ModelParams) -> Self {
        match mode {
            ModelMode::Original => Repulsion::Point,
            ModelMode::Robot => Repulsion::SafetyArea {
                radius: params.safety_radius,
                min_gap: params.min_gap,
            },
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Substitute displacement from `i` to `j` for coincident agents.
///
/// Length `magnitude`, direction hashed from the unordered id pair, and
/// antisymmetric: `offset(i, j) == -offset(j, i)`.
pub fn coincident_offset(i: AgentId, j: AgentId, magnitude: f64) -> Vec2 {
    let (lo, hi, sign) = if i <= j { (i, j, 1.0) } else { (j, i, -1.0) };
    let h = splitmix64((u64::from(lo) << 32) | u64::from(hi));
    let unit = (h >> 11) as f64 / (1u64 << 53) as f64;
    Vec2::from_angle(TAU * unit) * (sign * magnitude)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Phasor {
    cos: f64,
    sin: f64,
}

impl Phasor {
    fn of(angle: f64) -> Self {
        Phasor {
            cos: libm::cos(angle),
            sin: libm::sin(angle),
        }
    }

    /// `(cos(b - a), sin(b - a))` for `a = self`.
    #[inline]
    fn towards(self, b: Phasor) -> (f64, f64) {
        (
            b.cos * self.cos + b.sin * self.sin,
            b.sin * self.cos - b.cos * self.sin,
        )
    }
}

/// The three neighbour sums every rate equation is built from.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairSums {
    /// `Σ I1(x_ij) F(φ_ij) - I2(x_ij)`
    pub movement: Vec2,
    /// `Σ R(θ_ij) Gθ(x_ij)`
    pub alignment: f64,
    /// `Σ H(φ_ij) Gφ(x_ij)`
    pub synchrony: f64,
}

/// Agents visible to a computation, with cached phasors.
#[derive(Clone, Debug, Default)]
pub struct InteractionField {
    ids: Vec<AgentId>,
    positions: Vec<Vec2>,
    phases: Vec<Phasor>,
    headings: Vec<Phasor>,
    orientations: Vec<f64>,
    natural_frequencies: Vec<f64>,
}

impl InteractionField {
    pub fn with_capacity(n: usize) -> Self {
        InteractionField {
            ids: Vec::with_capacity(n),
            positions: Vec::with_capacity(n),
            phases: Vec::with_capacity(n),
            headings: Vec::with_capacity(n),
            orientations: Vec::with_capacity(n),
            natural_frequencies: Vec::with_capacity(n),
        }
    }

    pub fn from_states(states: &[AgentState]) -> Self {
        let mut field = InteractionField::with_capacity(states.len());
        for s in states {
            field.push(s.id, s.position, s.phase(), Some(s.orientation()), s.natural_frequency);
        }
        field
    }

    /// Adds one agent. An unknown orientation contributes nothing to alignment.
    pub fn push(
        &mut self,
        id: AgentId,
        position: Vec2,
        phase: f64,
        orientation: Option<f64>,
        natural_frequency: f64,
    ) {
        self.ids.push(id);
        self.positions.push(position);
        self.phases.push(Phasor::of(phase));
        self.headings.push(orientation.map(Phasor::of).unwrap_or_default());
        self.orientations.push(orientation.unwrap_or(0.0));
        self.natural_frequencies.push(natural_frequency);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn clear(&mut self) {
        self.ids.clear();
        self.positions.clear();
        self.phases.clear();
        self.headings.clear();
        self.orientations.clear();
        self.natural_frequencies.clear();
    }

    #[inline]
    fn pair_terms(
        &self,
        i: usize,
        j: usize,
        phase_attraction: f64,
        repulsion: Repulsion,
        coincidence: Coincidence,
    ) -> Result<PairSums, KernelError> {
        let mut x_ij = self.positions[j] - self.positions[i];
        let mut r2 = x_ij.norm_squared();
        if r2 == 0.0 {
            match coincidence {
                Coincidence::Reject => return Err(KernelError::CoincidentPositions),
                Coincidence::Offset => {
                    let magnitude = match repulsion {
                        Repulsion::SafetyArea { min_gap, .. } => min_gap,
                        Repulsion::Point => crate::state::DEFAULT_MIN_GAP,
                    };
                    x_ij = coincident_offset(self.ids[i], self.ids[j], magnitude);
                    r2 = x_ij.norm_squared();
                }
            }
        }
        let r = libm::sqrt(r2);
        let inv_r = 1.0 / r;
        let (cos_phi, sin_phi) = self.phases[i].towards(self.phases[j]);
        let (_, sin_theta) = self.headings[i].towards(self.headings[j]);
        let repel_scale = match repulsion {
            Repulsion::Point => inv_r * inv_r,
            Repulsion::SafetyArea { radius, min_gap } => {
                let inv_d = 1.0 / f64::max(r - 2.0 * radius, min_gap);
                inv_d * inv_d
            }
        };
        Ok(PairSums {
            movement: x_ij * (inv_r * (1.0 + phase_attraction * cos_phi) - repel_scale),
            alignment: sin_theta * inv_r,
            synchrony: sin_phi * inv_r,
        })
    }

    /// Neighbour sums for agent `i` over every other entry in the field, in index order.
    pub fn pair_sums(
        &self,
        i: usize,
        phase_attraction: f64,
        repulsion: Repulsion,
        coincidence: Coincidence,
    ) -> Result<PairSums, KernelError> {
        let mut sums = PairSums::default();
        for j in 0..self.len() {
            if j == i {
                continue;
            }
            let t = self.pair_terms(i, j, phase_attraction, repulsion, coincidence)?;
            sums.movement += t.movement;
            sums.alignment += t.alignment;
            sums.synchrony += t.synchrony;
        }
        Ok(sums)
    }

    /// Neighbour sums for every agent at once, visiting each unordered pair once.
    ///
    /// All three pair terms are antisymmetric, so the `(j, i)` contribution is
    /// the negated `(i, j)` one. Agrees with [`pair_sums`](Self::pair_sums) up
    /// to summation order.
    pub fn all_pair_sums(
        &self,
        phase_attraction: f64,
        repulsion: Repulsion,
        coincidence: Coincidence,
    ) -> Result<Vec<PairSums>, KernelError> {
        let n = self.len();
        let mut sums = alloc::vec![PairSums::default(); n];
        for i in 0..n {
            for j in i + 1..n {
                let t = self.pair_terms(i, j, phase_attraction, repulsion, coincidence)?;
                sums[i].movement += t.movement;
                sums[i].alignment += t.alignment;
                sums[i].synchrony += t.synchrony;
                sums[j].movement -= t.movement;
                sums[j].alignment -= t.alignment;
                sums[j].synchrony -= t.synchrony;
            }
        }
        Ok(sums)
    }

    /// Desired velocity of agent `i`, normalised by the number of agents in the field.
    pub fn desired_velocity(
        &self,
        i: usize,
        mode: ModelMode,
        params: &ModelParams,
        coincidence: Coincidence,
    ) -> Result<DesiredVelocity, KernelError> {
        let sums = self.pair_sums(
            i,
            params.phase_attraction,
            Repulsion::for_mode(mode, params),
            coincidence,
        )?;
        Ok(DesiredVelocity(sums.movement / self.len() as f64))
    }

    /// Rates of agent `i`. Robot-mode rates are clamped to the speed and turn limits.
    pub fn rates(
        &self,
        i: usize,
        mode: ModelMode,
        params: &ModelParams,
        coincidence: Coincidence,
    ) -> Result<StateRates, KernelError> {
        let sums = self.pair_sums(
            i,
            params.phase_attraction,
            Repulsion::for_mode(mode, params),
            coincidence,
        )?;
        Ok(self.rates_from_sums(i, &sums, mode, params))
    }

    /// Rates of every agent, using the pair-once sweep.
    pub fn all_rates(
        &self,
        mode: ModelMode,
        params: &ModelParams,
        coincidence: Coincidence,
    ) -> Result<Vec<StateRates>, KernelError> {
        let sums = self.all_pair_sums(
            params.phase_attraction,
            Repulsion::for_mode(mode, params),
            coincidence,
        )?;
        Ok(sums
            .iter()
            .enumerate()
            .map(|(i, s)| self.rates_from_sums(i, s, mode, params))
            .collect())
    }

    fn rates_from_sums(
        &self,
        i: usize,
        sums: &PairSums,
        mode: ModelMode,
        params: &ModelParams,
    ) -> StateRates {
        let n = self.len() as f64;
        let desired = sums.movement / n;
        let phase_rate = self.natural_frequencies[i] + params.phase_coupling * sums.synchrony / n;
        match mode {
            ModelMode::Original => StateRates {
                velocity: desired,
                orientation_rate: 0.0,
                phase_rate,
            },
            ModelMode::Robot => {
                let heading = Vec2::new(self.headings[i].cos, self.headings[i].sin);
                let gate =
                    kernels::alignment_gate(desired, params.alignment_strength, params.alignment_speed);
                let speed = desired.norm();
                // sin(∠v_d - θ) as a cross product
                let tracking = if speed > 0.0 {
                    heading.cross(desired) / speed
                } else {
                    0.0
                };
                let turn = (1.0 - gate) * sums.alignment / n + gate * tracking;
                StateRates {
                    velocity: heading * clamp_speed(desired.dot(heading), params),
                    orientation_rate: turn.clamp(-params.max_turn_rate, params.max_turn_rate),
                    phase_rate,
                }
            }
        }
    }

    pub fn id(&self, i: usize) -> AgentId {
        self.ids[i]
    }

    pub fn orientation(&self, i: usize) -> f64 {
        self.orientations[i]
    }
}

/// Signed speed along the heading after the backward switch and speed cap.
pub fn clamp_speed(projection: f64, params: &ModelParams) -> f64 {
    let s = if params.allow_backward {
        projection
    } else {
        projection.max(0.0)
    };
    s.clamp(-params.max_speed, params.max_speed)
}

/// Desired velocity of `states[i]` under the robot repulsion kernel.
///
/// The normalisation counts every entry of `states`, `i` included.
pub fn desired_velocity(
    i: usize,
    states: &[AgentState],
    params: &ModelParams,
) -> Result<DesiredVelocity, KernelError> {
    InteractionField::from_states(states).desired_velocity(i, ModelMode::Robot, params, Coincidence::Reject)
}

/// Unclamped turn rate: λ-blend of neighbour alignment and tracking of `desired`.
pub fn orientation_rate(
    i: usize,
    states: &[AgentState],
    desired: DesiredVelocity,
    params: &ModelParams,
) -> Result<f64, KernelError> {
    let field = InteractionField::from_states(states);
    let sums = field.pair_sums(
        i,
        params.phase_attraction,
        Repulsion::for_mode(ModelMode::Robot, params),
        Coincidence::Reject,
    )?;
    let gate = kernels::alignment_gate(desired.0, params.alignment_strength, params.alignment_speed);
    let tracking = kernels::heading_tracking(states[i].orientation(), desired.0);
    Ok((1.0 - gate) * sums.alignment / states.len() as f64 + gate * tracking)
}

/// `ω_i + K/N Σ H(φ_ij) Gφ(x_ij)`.
pub fn phase_rate(i: usize, states: &[AgentState], params: &ModelParams) -> Result<f64, KernelError> {
    let field = InteractionField::from_states(states);
    let sums = field.pair_sums(i, params.phase_attraction, Repulsion::Point, Coincidence::Reject)?;
    Ok(states[i].natural_frequency + params.phase_coupling * sums.synchrony / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle;
    use core::f64::consts::{FRAC_PI_2, PI};
    use proptest::prelude::*;

    fn agent(id: AgentId, x: f64, y: f64, theta: f64, phi: f64) -> AgentState {
        AgentState::new(id, Vec2::new(x, y), theta, phi)
    }

    /// Brute-force sums straight from the scalar kernels.
    fn oracle_sums(i: usize, states: &[AgentState], params: &ModelParams, robot: bool) -> PairSums {
        let me = &states[i];
        let mut out = PairSums::default();
        for (j, other) in states.iter().enumerate() {
            if j == i {
                continue;
            }
            let x_ij = other.position - me.position;
            let phi_ij = angle::difference(other.phase(), me.phase());
            let theta_ij = angle::difference(other.orientation(), me.orientation());
            let rep = if robot {
                kernels::spatial_repulsion_robot(x_ij, params.safety_radius, params.min_gap).unwrap()
            } else {
                kernels::spatial_repulsion_original(x_ij).unwrap()
            };
            out.movement += kernels::spatial_attraction(x_ij).unwrap()
                * kernels::phase_modulation(phi_ij, params.phase_attraction)
                - rep;
            out.alignment += kernels::orientation_coupling(theta_ij)
                * kernels::orientation_spatial_kernel(x_ij).unwrap();
            out.synchrony +=
                kernels::phase_coupling(phi_ij) * kernels::phase_spatial_kernel(x_ij).unwrap();
        }
        out
    }

    #[test]
    fn two_agent_desired_velocity() {
        let mut p = ModelParams::robot(0.1, 1.0, 0.0);
        p.safety_radius = 0.05;
        let states = [agent(0, 0.0, 0.0, 0.0, 1.0), agent(1, 1.0, 0.0, 0.0, 1.0)];
        let v = desired_velocity(0, &states, &p).unwrap().0;
        // d = 0.9, (1/2)(1.1 - 1/0.81)
        let expected = 0.5 * (1.1 - 1.0 / 0.81);
        assert!((v.x - expected).abs() < 1e-9);
        assert!((v.x - (-0.067_283_950_617_283_95)).abs() < 1e-9);
        assert_eq!(v.y, 0.0);
    }

    #[test]
    fn lone_agent_has_no_desired_velocity() {
        let states = [agent(7, 0.3, 0.3, 1.0, 2.0)];
        let p = ModelParams::default();
        assert_eq!(desired_velocity(0, &states, &p).unwrap().0, Vec2::ZERO);
        assert_eq!(phase_rate(0, &states, &p).unwrap(), 0.0);
        let states = [states[0].with_natural_frequency(0.25)];
        assert_eq!(phase_rate(0, &states, &p).unwrap(), 0.25);
    }

    #[test]
    fn equilibrium_spacing_with_safety_area() {
        // |I2| = |x|/d² with |x| = d + 2r, so balance with J = 0 needs d² = d + 2r:
        // d = (1 + sqrt(1 + 8r)) / 2
        let r = 0.05;
        let mut p = ModelParams::robot(0.0, 1.0, 0.0);
        p.safety_radius = r;
        let gap = (1.0 + libm::sqrt(1.0 + 8.0 * r)) / 2.0;
        let centre = gap + 2.0 * r;
        assert!((centre - 1.191_607_978_309_961_6).abs() < 1e-12);
        let states = [agent(0, 0.0, 0.0, 0.0, 0.4), agent(1, centre, 0.0, 0.0, 0.4)];
        let v = desired_velocity(0, &states, &p).unwrap().0;
        assert!(v.norm() < 1e-12, "{v:?}");
        let states = [agent(0, 0.0, 0.0, 0.0, 0.4), agent(1, centre + 0.05, 0.0, 0.0, 0.4)];
        assert!(desired_velocity(0, &states, &p).unwrap().0.x > 0.0);
        let states = [agent(0, 0.0, 0.0, 0.0, 0.4), agent(1, centre - 0.05, 0.0, 0.0, 0.4)];
        assert!(desired_velocity(0, &states, &p).unwrap().0.x < 0.0);
    }

    #[test]
    fn orientation_rate_cases() {
        // λ = 1 ignores neighbours
        let p = ModelParams::robot(0.1, 1.0, 0.0);
        let states = [agent(0, 0.0, 0.0, 0.3, 0.0), agent(1, 1.0, 0.5, 2.5, 1.0)];
        let vd = desired_velocity(0, &states, &p).unwrap();
        let rate = orientation_rate(0, &states, vd, &p).unwrap();
        assert_eq!(rate, kernels::heading_tracking(0.3, vd.0));

        // λ = 0 (zero desired velocity, P > 0)
        let p = ModelParams::robot(0.1, 1.0, 0.1);
        let aligned = [agent(0, 0.0, 0.0, 1.0, 0.0), agent(1, 1.0, 0.0, 1.0, 0.0)];
        assert_eq!(orientation_rate(0, &aligned, DesiredVelocity::default(), &p).unwrap(), 0.0);
        let crossed = [agent(0, 0.0, 0.0, 0.0, 0.0), agent(1, 1.0, 0.0, FRAC_PI_2, 0.0)];
        let r = orientation_rate(0, &crossed, DesiredVelocity::default(), &p).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
    }

    #[test]
    fn phase_rate_cases() {
        let p = ModelParams::robot(0.1, 1.0, 0.0);
        let states = [agent(0, 0.0, 0.0, 0.0, 0.0), agent(1, 1.0, 0.0, 0.0, FRAC_PI_2)];
        assert!((phase_rate(0, &states, &p).unwrap() - 0.5).abs() < 1e-9);
        let same = [agent(0, 0.0, 0.0, 0.0, 2.0), agent(1, 0.4, 0.3, 1.0, 2.0), agent(2, -1.0, 0.2, 0.0, 2.0)];
        for i in 0..3 {
            assert_eq!(phase_rate(i, &same, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn coincident_positions() {
        let p = ModelParams::default();
        let states = [agent(0, 0.5, 0.5, 0.0, 0.0), agent(1, 0.5, 0.5, 0.0, 1.0)];
        assert_eq!(desired_velocity(0, &states, &p), Err(KernelError::CoincidentPositions));
        let field = InteractionField::from_states(&states);
        let a = field.rates(0, ModelMode::Robot, &p, Coincidence::Offset).unwrap();
        let b = field.rates(1, ModelMode::Robot, &p, Coincidence::Offset).unwrap();
        assert!(a.velocity.is_finite() && b.velocity.is_finite());
        let off = coincident_offset(0, 1, 1e-3);
        assert_eq!(off, -coincident_offset(1, 0, 1e-3));
        assert!((off.norm() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn robot_rates_respect_limits() {
        let p = ModelParams::robot(0.1, 1.0, 0.0);
        // far apart: desired speed well above the cap
        let states = [agent(0, 0.0, 0.0, 0.0, 0.0), agent(1, 0.12, 0.0, 0.0, 0.0)];
        let field = InteractionField::from_states(&states);
        let r = field.rates(0, ModelMode::Robot, &p, Coincidence::Reject).unwrap();
        assert!((r.velocity.norm() - p.max_speed).abs() < 1e-15);
        assert!(r.velocity.x < 0.0, "backward away from the close neighbour");
        assert!(r.orientation_rate.abs() <= p.max_turn_rate);

        let mut forward_only = p;
        forward_only.allow_backward = false;
        let r = field.rates(0, ModelMode::Robot, &forward_only, Coincidence::Reject).unwrap();
        assert_eq!(r.velocity, Vec2::ZERO);
    }

    #[test]
    fn aligned_heading_does_not_turn() {
        let p = ModelParams::robot(0.1, 1.0, 0.0);
        let mut states = [agent(0, 0.0, 0.0, 0.0, 0.0), agent(1, 2.0, 1.0, 0.0, 0.0)];
        let vd = desired_velocity(0, &states, &p).unwrap().0;
        states[0].set_orientation(vd.angle());
        let field = InteractionField::from_states(&states);
        let r = field.rates(0, ModelMode::Robot, &p, Coincidence::Reject).unwrap();
        assert!(r.orientation_rate.abs() < 1e-12);
    }

    #[test]
    fn robot_repulsion_without_safety_area_matches_point_repulsion() {
        let states = [
            agent(0, 0.1, 0.2, 0.0, 0.3),
            agent(1, -0.7, 0.4, 0.0, 2.3),
            agent(2, 0.9, -0.6, 0.0, 5.1),
        ];
        let field = InteractionField::from_states(&states);
        for i in 0..3 {
            let a = field.pair_sums(i, 0.5, Repulsion::Point, Coincidence::Reject).unwrap();
            let b = field
                .pair_sums(i, 0.5, Repulsion::SafetyArea { radius: 0.0, min_gap: 1e-300 }, Coincidence::Reject)
                .unwrap();
            assert!((a.movement - b.movement).norm() < 1e-12);
            assert_eq!(a.synchrony, b.synchrony);
        }
    }

    fn swarm_strategy(max: usize) -> impl Strategy<Value = Vec<AgentState>> {
        proptest::collection::vec(
            (-2.0f64..2.0, -2.0f64..2.0, 0.0f64..TAU, 0.0f64..TAU),
            2..max,
        )
        .prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(k, (x, y, t, f))| agent(k as AgentId, x, y, t, f))
                .collect()
        })
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (-1.0f64..=1.0, -2.0f64..2.0, 0.0f64..1.0, 0.0f64..0.1).prop_map(|(j, k, p, r)| {
            let mut m = ModelParams::robot(j, k, p);
            m.safety_radius = r;
            m
        })
    }

    fn spread_out(states: &[AgentState]) -> bool {
        states.iter().enumerate().all(|(a, s)| {
            states[a + 1..]
                .iter()
                .all(|o| (o.position - s.position).norm() > 1e-3)
        })
    }

    proptest! {
        #[test]
        fn phasor_sums_match_kernel_oracle(states in swarm_strategy(8), params in params_strategy()) {
            prop_assume!(spread_out(&states));
            let field = InteractionField::from_states(&states);
            for robot in [false, true] {
                let rep = if robot {
                    Repulsion::SafetyArea { radius: params.safety_radius, min_gap: params.min_gap }
                } else {
                    Repulsion::Point
                };
                for i in 0..states.len() {
                    let fast = field.pair_sums(i, params.phase_attraction, rep, Coincidence::Reject).unwrap();
                    let slow = oracle_sums(i, &states, &params, robot);
                    let scale = 1.0 + slow.movement.norm();
                    prop_assert!((fast.movement - slow.movement).norm() <= 1e-12 * scale);
                    prop_assert!((fast.alignment - slow.alignment).abs() <= 1e-12 * (1.0 + slow.alignment.abs()));
                    prop_assert!((fast.synchrony - slow.synchrony).abs() <= 1e-12 * (1.0 + slow.synchrony.abs()));
                }
            }
        }

        #[test]
        fn pair_once_sweep_matches_per_agent_sums(states in swarm_strategy(10), params in params_strategy()) {
            prop_assume!(spread_out(&states));
            let field = InteractionField::from_states(&states);
            for mode in [ModelMode::Original, ModelMode::Robot] {
                let all = field.all_rates(mode, &params, Coincidence::Reject).unwrap();
                for (i, fast) in all.iter().enumerate() {
                    let one = field.rates(i, mode, &params, Coincidence::Reject).unwrap();
                    let tol = 1e-12 * (1.0 + one.velocity.norm());
                    prop_assert!((fast.velocity - one.velocity).norm() <= tol);
                    prop_assert!((fast.phase_rate - one.phase_rate).abs() <= 1e-12 * (1.0 + one.phase_rate.abs()));
                    prop_assert!((fast.orientation_rate - one.orientation_rate).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn clamped_turn_matches_unclamped_oracle(states in swarm_strategy(6), params in params_strategy()) {
            prop_assume!(spread_out(&states));
            let field = InteractionField::from_states(&states);
            for i in 0..states.len() {
                let rates = field.rates(i, ModelMode::Robot, &params, Coincidence::Reject).unwrap();
                let vd = desired_velocity(i, &states, &params).unwrap();
                let raw = orientation_rate(i, &states, vd, &params).unwrap();
                let expected = raw.clamp(-params.max_turn_rate, params.max_turn_rate);
                prop_assert!((rates.orientation_rate - expected).abs() <= 1e-9 * (1.0 + raw.abs()));
                prop_assert!(rates.velocity.norm() <= params.max_speed + 1e-15);
                prop_assert!(rates.velocity.norm() <= vd.0.norm() + 1e-12);
            }
        }

        #[test]
        fn pair_antisymmetry(phi in -10.0f64..10.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            prop_assume!(x.abs() + y.abs() > 1e-6);
            let v = Vec2::new(x, y);
            prop_assert_eq!(kernels::phase_coupling(phi), -kernels::phase_coupling(-phi));
            prop_assert_eq!(kernels::spatial_attraction(v).unwrap(), -kernels::spatial_attraction(-v).unwrap());
        }

        #[test]
        fn two_agent_phase_rates_cancel(states in swarm_strategy(3), k in -2.0f64..2.0) {
            prop_assume!(states.len() == 2 && spread_out(&states));
            let p = ModelParams::robot(0.3, k, 0.0);
            let a = phase_rate(0, &states, &p).unwrap();
            let b = phase_rate(1, &states, &p).unwrap();
            prop_assert!((a + b).abs() < 1e-12);
        }

        #[test]
        fn gate_is_bounded_and_monotone(s1 in 0.0f64..2.0, s2 in 0.0f64..2.0, p in 0.0f64..3.0, c in 0.01f64..1.0) {
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let a = kernels::alignment_gate(Vec2::new(lo, 0.0), p, c);
            let b = kernels::alignment_gate(Vec2::new(0.0, hi), p, c);
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
            prop_assert!(a <= b);
            prop_assert!(kernels::alignment_gate(Vec2::new(lo, 0.0), p * 2.0, c) <= a);
        }

        #[test]
        fn robot_repulsion_decreases_with_distance(r1 in 0.0f64..3.0, r2 in 0.0f64..3.0, rs in 0.0f64..0.2) {
            let eps = 1e-3;
            let floor = 2.0 * rs + eps;
            let (a, b) = (floor + r1.min(r2) + 1e-9, floor + r1.max(r2) + 1e-6);
            let fa = kernels::spatial_repulsion_robot(Vec2::new(a, 0.0), rs, eps).unwrap().norm();
            let fb = kernels::spatial_repulsion_robot(Vec2::new(b, 0.0), rs, eps).unwrap().norm();
            prop_assert!(fa > fb);
        }

        #[test]
        fn projection_never_exceeds_desired(theta in 0.0f64..TAU, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let v = Vec2::new(x, y);
            prop_assert!(kernels::projected_velocity(theta, v).norm() <= v.norm() + 1e-12);
        }

        #[test]
        fn kernels_are_wrap_independent(phi in -PI..PI, turns in -5i32..5) {
            let shifted = phi + f64::from(turns) * TAU;
            prop_assert!((kernels::phase_coupling(phi) - kernels::phase_coupling(shifted)).abs() < 1e-9);
            prop_assert!((kernels::phase_modulation(phi, 0.7) - kernels::phase_modulation(shifted, 0.7)).abs() < 1e-9);
        }
    }

    #[test]
    fn near_contact_repulsion_dominates_attraction() {
        let (rs, eps, j) = (0.05, 1e-3, 1.0);
        // 1/d² > 1 + |J| once d < 1/sqrt(2)
        let x = Vec2::new(2.0 * rs + 0.5, 0.0);
        let att = kernels::spatial_attraction(x).unwrap() * kernels::phase_modulation(0.0, j);
        let rep = kernels::spatial_repulsion_robot(x, rs, eps).unwrap();
        assert!(rep.norm() > att.norm());
    }
}
