//! Angle conventions.
//!
//! Stored angles (phase, orientation) live in `[0, 2π)`. Differences handed to
//! coupling functions are principal values in `(-π, π]`.

use core::f64::consts::{PI, TAU};

/// Wraps any finite angle into `[0, 2π)`.
pub fn wrap(angle: f64) -> f64 {
    let mut r = libm::fmod(angle, TAU);
    if r < 0.0 {
        r += TAU;
    }
    // fmod + TAU can round up to exactly TAU; -0.0 must become 0.0
    if r >= TAU || r == 0.0 {
        r = 0.0;
    }
    r
}

/// Principal value in `(-π, π]`, computed from the angle's sine and cosine.
pub fn principal(angle: f64) -> f64 {
    let p = libm::atan2(libm::sin(angle), libm::cos(angle));
    if p <= -PI {
        PI
    } else {
        p
    }
}

/// Principal value of `to - from`.
pub fn difference(to: f64, from: f64) -> f64 {
    principal(to - from)
}
