//! Pairwise interaction functions.
//!
//! `x_ij` is always the displacement from agent `i` to agent `j` and angle
//! arguments are differences `j - i`. Any real angle is accepted.

use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("coincident positions: pair displacement has zero length")]
    CoincidentPositions,
}

#[inline]
fn nonzero_norm(x_ij: Vec2) -> Result<f64, KernelError> {
    let n = x_ij.norm();
    if n > 0.0 {
        Ok(n)
    } else {
        Err(KernelError::CoincidentPositions)
    }
}

/// Unit vector towards the other agent.
pub fn spatial_attraction(x_ij: Vec2) -> Result<Vec2, KernelError> {
    Ok(x_ij / nonzero_norm(x_ij)?)
}

/// `1 + J cos φ_ij`.
pub fn phase_modulation(phi_ij: f64, phase_attraction: f64) -> f64 {
    1.0 + phase_attraction * libm::cos(phi_ij)
}

/// Inverse-distance repulsion of point entities: `x_ij / |x_ij|²`.
pub fn spatial_repulsion_original(x_ij: Vec2) -> Result<Vec2, KernelError> {
    let n = nonzero_norm(x_ij)?;
    Ok(x_ij / (n * n))
}

/// Gap between two circular safety areas, floored at `min_gap`.
pub fn safety_distance(x_ij: Vec2, safety_radius: f64, min_gap: f64) -> f64 {
    f64::max(x_ij.norm() - 2.0 * safety_radius, min_gap)
}

/// Repulsion between robots measured against the gap of their safety areas: `x_ij / d_ij²`.
pub fn spatial_repulsion_robot(
    x_ij: Vec2,
    safety_radius: f64,
    min_gap: f64,
) -> Result<Vec2, KernelError> {
    nonzero_norm(x_ij)?;
    let d = safety_distance(x_ij, safety_radius, min_gap);
    Ok(x_ij / (d * d))
}

/// `sin φ_ij`.
pub fn phase_coupling(phi_ij: f64) -> f64 {
    libm::sin(phi_ij)
}

/// `1 / |x_ij|`.
pub fn phase_spatial_kernel(x_ij: Vec2) -> Result<f64, KernelError> {
    Ok(1.0 / nonzero_norm(x_ij)?)
}

/// `sin θ_ij`; same shape as the phase coupling.
pub fn orientation_coupling(theta_ij: f64) -> f64 {
    libm::sin(theta_ij)
}

/// `1 / |x_ij|`; same shape as the phase kernel.
pub fn orientation_spatial_kernel(x_ij: Vec2) -> Result<f64, KernelError> {
    phase_spatial_kernel(x_ij)
}

/// Turning tendency towards the desired velocity: `sin(∠v_d - θ)`.
///
/// A zero desired velocity has no direction and yields 0.
pub fn heading_tracking(theta: f64, desired: Vec2) -> f64 {
    if desired.norm_squared() == 0.0 {
        return 0.0;
    }
    libm::sin(desired.angle() - theta)
}

/// Blend factor between neighbour alignment (0) and heading tracking (1).
///
/// `min(1, |v_d| / (strength · speed))`, defined as 1 when `strength == 0`.
pub fn alignment_gate(desired: Vec2, strength: f64, speed: f64) -> f64 {
    let threshold = strength * speed;
    if threshold <= 0.0 {
        return 1.0;
    }
    f64::min(1.0, desired.norm() / threshold)
}

/// Component of `desired` along the heading `theta`, as a vector along that heading.
///
/// Negative projections (driving backwards) are kept.
pub fn projected_velocity(theta: f64, desired: Vec2) -> Vec2 {
    let heading = Vec2::from_angle(theta);
    heading * desired.dot(heading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const EXACT: f64 = 1e-12;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol
    }

    #[test]
    fn attraction_normalizes() {
        assert!(close(spatial_attraction(Vec2::new(3.0, 4.0)).unwrap(), Vec2::new(0.6, 0.8), EXACT));
        assert!(close(spatial_attraction(Vec2::new(-1.0, 0.0)).unwrap(), Vec2::new(-1.0, 0.0), EXACT));
        assert!(close(spatial_attraction(Vec2::new(0.001, 0.0)).unwrap(), Vec2::new(1.0, 0.0), EXACT));
        assert_eq!(spatial_attraction(Vec2::ZERO), Err(KernelError::CoincidentPositions));
    }

    #[test]
    fn modulation_values() {
        assert!((phase_modulation(0.0, 0.1) - 1.1).abs() < EXACT);
        assert!(phase_modulation(PI, 1.0).abs() < EXACT);
        assert!((phase_modulation(FRAC_PI_2, 0.7) - 1.0).abs() < EXACT);
    }

    #[test]
    fn original_repulsion() {
        assert!(close(spatial_repulsion_original(Vec2::new(2.0, 0.0)).unwrap(), Vec2::new(0.5, 0.0), EXACT));
        assert!(close(spatial_repulsion_original(Vec2::new(0.0, 0.5)).unwrap(), Vec2::new(0.0, 2.0), EXACT));
        assert!(close(spatial_repulsion_original(Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(1.0, 0.0), EXACT));
        assert!(spatial_repulsion_original(Vec2::ZERO).is_err());
    }

    #[test]
    fn safety_gap() {
        assert!((safety_distance(Vec2::new(1.0, 0.0), 0.1, 1e-3) - 0.8).abs() < EXACT);
        assert!((safety_distance(Vec2::new(0.2, 0.0), 0.1, 1e-3) - 1e-3).abs() < EXACT);
        assert!((safety_distance(Vec2::new(0.0, 1.0), 0.0, 1e-3) - 1.0).abs() < EXACT);
    }

    #[test]
    fn robot_repulsion() {
        // d = 1 - 0.3 = 0.7
        let r = spatial_repulsion_robot(Vec2::new(1.0, 0.0), 0.15, 1e-3).unwrap();
        assert!(close(r, Vec2::new(1.0 / 0.49, 0.0), 1e-9));
        let r = spatial_repulsion_robot(Vec2::new(1.0, 0.0), 0.0, 1e-3).unwrap();
        assert!(close(r, Vec2::new(1.0, 0.0), EXACT));
        // gap 0.01 is still above the floor: 0.31 / 1e-4
        let r = spatial_repulsion_robot(Vec2::new(0.31, 0.0), 0.15, 1e-3).unwrap();
        assert!((r.x - 3100.0).abs() / 3100.0 < 1e-9 && r.y == 0.0);
        // gap 5e-4 is floored to 1e-3: 0.3005 / 1e-6
        let r = spatial_repulsion_robot(Vec2::new(0.3005, 0.0), 0.15, 1e-3).unwrap();
        assert!((r.x - 3.005e5).abs() / 3.005e5 < 1e-9 && r.y == 0.0);
        // overlapping circles still push apart
        let r = spatial_repulsion_robot(Vec2::new(0.0, -0.2), 0.15, 1e-3).unwrap();
        assert!((r.y + 2e5).abs() / 2e5 < 1e-9);
        assert!(spatial_repulsion_robot(Vec2::ZERO, 0.1, 1e-3).is_err());
    }

    #[test]
    fn couplings() {
        assert_eq!(phase_coupling(0.0), 0.0);
        assert!((phase_coupling(FRAC_PI_2) - 1.0).abs() < EXACT);
        assert!((phase_coupling(-FRAC_PI_2) + 1.0).abs() < EXACT);
        assert_eq!(orientation_coupling(0.0), 0.0);
        assert!((orientation_coupling(FRAC_PI_2) - 1.0).abs() < EXACT);
        assert!(orientation_coupling(PI).abs() < EXACT);
    }

    #[test]
    fn spatial_kernels() {
        assert!((phase_spatial_kernel(Vec2::new(1.0, 0.0)).unwrap() - 1.0).abs() < EXACT);
        assert!((phase_spatial_kernel(Vec2::new(0.0, 2.0)).unwrap() - 0.5).abs() < EXACT);
        assert!((phase_spatial_kernel(Vec2::new(3.0, 4.0)).unwrap() - 0.2).abs() < EXACT);
        assert!((orientation_spatial_kernel(Vec2::new(1.0, 0.0)).unwrap() - 1.0).abs() < EXACT);
        assert!((orientation_spatial_kernel(Vec2::new(0.0, 0.25)).unwrap() - 4.0).abs() < EXACT);
        assert!((orientation_spatial_kernel(Vec2::new(0.0, -2.0)).unwrap() - 0.5).abs() < EXACT);
        assert!(phase_spatial_kernel(Vec2::ZERO).is_err());
        assert!(orientation_spatial_kernel(Vec2::ZERO).is_err());
    }

    #[test]
    fn heading() {
        assert!((heading_tracking(0.0, Vec2::new(0.0, 1.0)) - 1.0).abs() < EXACT);
        assert!(heading_tracking(FRAC_PI_4, Vec2::new(1.0, 1.0)).abs() < EXACT);
        assert_eq!(heading_tracking(0.0, Vec2::ZERO), 0.0);
    }

    #[test]
    fn gate() {
        assert_eq!(alignment_gate(Vec2::new(0.3, 0.0), 0.0, 0.15), 1.0);
        assert_eq!(alignment_gate(Vec2::ZERO, 0.0, 0.15), 1.0);
        assert_eq!(alignment_gate(Vec2::ZERO, 0.1, 0.15), 0.0);
        assert!((alignment_gate(Vec2::new(0.0, 0.05), 1.0, 0.1) - 0.5).abs() < EXACT);
        assert_eq!(alignment_gate(Vec2::new(5.0, 0.0), 1.0, 0.1), 1.0);
    }

    #[test]
    fn projection() {
        assert!(close(projected_velocity(0.0, Vec2::new(0.3, 0.4)), Vec2::new(0.3, 0.0), EXACT));
        assert!(close(projected_velocity(FRAC_PI_2, Vec2::new(0.3, 0.0)), Vec2::ZERO, EXACT));
        assert!(close(projected_velocity(0.0, Vec2::new(-0.2, 0.1)), Vec2::new(-0.2, 0.0), EXACT));
    }
}
