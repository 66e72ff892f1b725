use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarmalator_core::metrics::*;
use swarmalator_core::sim::SwarmSnapshot;
use swarmalator_core::{AgentState, Vec2};

fn snap(time: f64, agents: &[(f64, f64, f64)]) -> SwarmSnapshot {
    SwarmSnapshot {
        time,
        agents: agents
            .iter()
            .enumerate()
            .map(|(i, &(x, y, phi))| AgentState::new(i as u32, Vec2::new(x, y), 0.0, phi))
            .collect(),
    }
}

fn ring(n: usize, radius: f64, phase_of: impl Fn(f64) -> f64) -> Vec<(f64, f64, f64)> {
    (0..n)
        .map(|i| {
            let psi = TAU * i as f64 / n as f64;
            (radius * psi.cos(), radius * psi.sin(), phase_of(psi))
        })
        .collect()
}

#[test]
fn coherence_extremes() {
    assert!((phase_coherence(&snap(0.0, &[(0.0, 0.0, 1.0); 5])) - 1.0).abs() < 1e-12);
    assert!(phase_coherence(&snap(0.0, &ring(8, 1.0, |psi| psi))) < 1e-12);
    assert!(phase_coherence(&snap(0.0, &[(0.0, 0.0, 0.0), (1.0, 0.0, PI)])) < 1e-12);
}

#[test]
fn correlation_picks_the_handedness() {
    let (plus, minus) = phase_space_correlation(&snap(0.0, &ring(12, 1.0, |psi| psi)));
    assert!((minus - 1.0).abs() < 1e-12);
    assert!(plus < 1e-12);
    let (plus, minus) = phase_space_correlation(&snap(0.0, &ring(12, 1.0, |psi| -psi)));
    assert!((plus - 1.0).abs() < 1e-12);
    assert!(minus < 1e-12);
}

#[test]
fn independent_phases_are_uncorrelated() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let agents: Vec<_> = (0..1000)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU)))
        .collect();
    let (plus, minus) = phase_space_correlation(&snap(0.0, &agents));
    assert!(plus < 0.1 && minus < 0.1, "{plus} {minus}");
}

#[test]
fn drift_of_frozen_and_translating_swarms() {
    let a = [(0.0, 0.0, 0.0), (1.0, 2.0, 1.0), (-3.0, 0.5, 2.0)];
    let frozen = [snap(0.0, &a), snap(1.0, &a), snap(2.0, &a)];
    assert_eq!(stationarity(&frozen).unwrap(), 0.0);
    assert_eq!(positional_jitter(&frozen).unwrap(), 0.0);

    let v = 0.3;
    let moving: Vec<_> = (0..5)
        .map(|k| {
            let t = k as f64;
            let shifted: Vec<_> = a.iter().map(|&(x, y, p)| (x + v * t * 0.6, y + v * t * 0.8, p)).collect();
            snap(t, &shifted)
        })
        .collect();
    assert!((stationarity(&moving).unwrap() - v).abs() < 1e-12);
    assert!((mean_speed(&moving).unwrap() - v).abs() < 1e-12);
}

#[test]
fn window_errors() {
    let one = [snap(0.0, &[(0.0, 0.0, 0.0)])];
    assert!(matches!(stationarity(&one), Err(MetricsError::WindowTooShort { .. })));
    let same_time = [snap(1.0, &[(0.0, 0.0, 0.0)]), snap(1.0, &[(0.0, 0.0, 0.0)])];
    assert!(matches!(stationarity(&same_time), Err(MetricsError::ZeroDuration)));
    let mismatch = [snap(0.0, &[(0.0, 0.0, 0.0)]), snap(1.0, &[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)])];
    assert!(matches!(stationarity(&mismatch), Err(MetricsError::AgentMismatch)));
}

#[test]
fn safety_gap_cases() {
    let s = snap(0.0, &[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
    assert!((min_safety_gap(&s, 0.1) - 0.8).abs() < 1e-12);
    let touching = snap(0.0, &[(0.0, 0.0, 0.0), (0.1, 0.0, 0.0)]);
    assert!(min_safety_gap(&touching, 0.05).abs() < 1e-12);
    assert_eq!(min_safety_gap(&snap(0.0, &[(0.0, 0.0, 0.0)]), 0.05), f64::INFINITY);
}

#[test]
fn connected_ring_is_one_cluster() {
    let s = snap(0.0, &ring(100, 1.0, |psi| psi));
    assert_eq!(cluster_count(&[s], 72, 0.15), 1);
}

#[test]
fn separated_groups_are_counted() {
    let mut agents = Vec::new();
    for g in 0..4 {
        let centre = TAU * g as f64 / 4.0;
        for k in 0..10 {
            let psi = centre + 0.02 * (k as f64 - 4.5);
            agents.push((psi.cos(), psi.sin(), centre));
        }
    }
    assert_eq!(cluster_count(&[snap(0.0, &agents)], 72, 0.15), 4);
    assert_eq!(cluster_count(&[], 72, 0.15), 1);
}

fn still_trace(agents: &[(f64, f64, f64)], samples: usize) -> Vec<SwarmSnapshot> {
    (0..samples).map(|k| snap(k as f64 * 0.5, agents)).collect()
}

#[test]
fn static_patterns_are_labelled() {
    let th = Thresholds::default();
    let sync = still_trace(&ring(50, 0.5, |_| 1.0), 250);
    assert_eq!(classify(&sync, &th).unwrap().label, PatternLabel::StaticSync);
    let wave = still_trace(&ring(50, 0.5, |psi| psi), 250);
    assert_eq!(classify(&wave, &th).unwrap().label, PatternLabel::StaticPhaseWave);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let scattered: Vec<_> = (0..400)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU)))
        .collect();
    let async_trace = still_trace(&scattered, 250);
    assert_eq!(classify(&async_trace, &th).unwrap().label, PatternLabel::StaticAsync);
}

#[test]
fn rotating_ring_is_active() {
    let th = Thresholds::default();
    let trace: Vec<_> = (0..250)
        .map(|k| {
            let t = k as f64 * 0.5;
            let spin = 0.05 * t;
            snap(t, &ring(60, 1.0, |psi| psi).iter().enumerate().map(|(i, _)| {
                let psi = TAU * i as f64 / 60.0 + spin;
                (psi.cos(), psi.sin(), psi)
            }).collect::<Vec<_>>())
        })
        .collect();
    let c = classify(&trace, &th).unwrap();
    assert_eq!(c.label, PatternLabel::ActivePhaseWave, "{:?}", c.report);
}

#[test]
fn short_traces_are_refused() {
    let th = Thresholds::default();
    let trace = still_trace(&ring(5, 1.0, |_| 0.0), 10);
    assert!(matches!(classify(&trace, &th), Err(MetricsError::WindowTooShort { .. })));
}

#[test]
fn convergence_waits_for_the_swarm_to_stop() {
    let th = Thresholds::default();
    // collapses radially, then holds still from t = 50
    let trace: Vec<_> = (0..300)
        .map(|k| {
            let t = k as f64 * 0.5;
            let r = 0.5 + 0.5 * (1.0 - t / 50.0).max(0.0);
            snap(t, &ring(30, r, |_| 2.0))
        })
        .collect();
    let c = convergence_time(&trace, &th, 1).unwrap().unwrap();
    assert_eq!(c.label(), PatternLabel::StaticSync);
    let t = c.time().unwrap();
    assert!((50.0..=60.0).contains(&t), "{t}");
}

#[test]
fn still_moving_trace_is_unsettled() {
    let th = Thresholds::default();
    let trace: Vec<_> = (0..100)
        .map(|k| {
            let t = k as f64 * 0.5;
            snap(t, &ring(30, 0.5 + 1e-3 * t, |_| 2.0))
        })
        .collect();
    let c = convergence_time(&trace, &th, 1).unwrap().unwrap();
    assert_eq!(c, Convergence::Unsettled { label: PatternLabel::StaticSync });
    assert_eq!(convergence_time(&trace[..5], &th, 1).unwrap(), None);
}

#[test]
fn labels_round_trip_through_text() {
    for l in PatternLabel::ALL {
        assert_eq!(PatternLabel::parse(l.as_str()), Some(l));
    }
    assert_eq!(PatternLabel::parse("static sync"), None);
}

fn arb_window() -> impl Strategy<Value = Vec<SwarmSnapshot>> {
    (3usize..12, 2usize..6, any::<u64>()).prop_map(|(n, m, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut agents: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..TAU)))
            .collect();
        (0..m)
            .map(|k| {
                let s = snap(k as f64 * 0.5, &agents);
                for a in agents.iter_mut() {
                    a.0 += rng.gen_range(-0.05..0.05);
                    a.1 += rng.gen_range(-0.05..0.05);
                    a.2 += rng.gen_range(-0.2..0.2);
                }
                s
            })
            .collect()
    })
}

fn transform(window: &[SwarmSnapshot], shift: Vec2, rot: f64, dphi: f64) -> Vec<SwarmSnapshot> {
    window
        .iter()
        .map(|s| SwarmSnapshot {
            time: s.time,
            agents: s
                .agents
                .iter()
                .map(|a| {
                    let mut b = *a;
                    b.position = a.position.rotated(rot) + shift;
                    b.set_phase(a.phase() + dphi);
                    b
                })
                .collect(),
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn metrics_ignore_translation(w in arb_window(), dx in -50.0..50.0f64, dy in -50.0..50.0f64) {
        let moved = transform(&w, Vec2::new(dx, dy), 0.0, 0.0);
        for (a, b) in w.iter().zip(&moved) {
            prop_assert!(close(phase_coherence(a), phase_coherence(b)));
            let (p, m) = phase_space_correlation(a);
            let (p2, m2) = phase_space_correlation(b);
            prop_assert!(close(p, p2) && close(m, m2));
            prop_assert!(close(radial_spread(a), radial_spread(b)));
            prop_assert!(close(min_safety_gap(a, 0.05), min_safety_gap(b, 0.05)));
        }
        prop_assert!(close(stationarity(&w).unwrap(), stationarity(&moved).unwrap()));
        prop_assert!(close(mean_speed(&w).unwrap(), mean_speed(&moved).unwrap()));
        prop_assert!(close(positional_jitter(&w).unwrap(), positional_jitter(&moved).unwrap()));
        let (a1, n1) = angular_motion(&w).unwrap();
        let (a2, n2) = angular_motion(&moved).unwrap();
        prop_assert!(close(a1, a2) && close(n1, n2));
        prop_assert!(close(mean_phase_speed(&w).unwrap(), mean_phase_speed(&moved).unwrap()));
    }

    #[test]
    fn coherence_ignores_global_phase_shift(w in arb_window(), dphi in -10.0..10.0f64) {
        let shifted = transform(&w, Vec2::ZERO, 0.0, dphi);
        for (a, b) in w.iter().zip(&shifted) {
            prop_assert!(close(phase_coherence(a), phase_coherence(b)));
        }
    }

    #[test]
    fn correlation_survives_rotation_with_matching_phase_shift(w in arb_window(), rot in -PI..PI) {
        // psi - phi is unchanged by rotating by `rot` and shifting phases by `rot`;
        // psi + phi by rotating by `rot` and shifting by `-rot`.
        let same = transform(&w, Vec2::ZERO, rot, rot);
        let mirror = transform(&w, Vec2::ZERO, rot, -rot);
        for ((a, b), c) in w.iter().zip(&same).zip(&mirror) {
            let (p, m) = phase_space_correlation(a);
            prop_assert!(close(m, phase_space_correlation(b).1));
            prop_assert!(close(p, phase_space_correlation(c).0));
        }
    }

    #[test]
    fn motion_metrics_ignore_rotation(w in arb_window(), rot in -PI..PI) {
        let turned = transform(&w, Vec2::ZERO, rot, 0.0);
        prop_assert!(close(stationarity(&w).unwrap(), stationarity(&turned).unwrap()));
        prop_assert!(close(mean_speed(&w).unwrap(), mean_speed(&turned).unwrap()));
        prop_assert!(close(positional_jitter(&w).unwrap(), positional_jitter(&turned).unwrap()));
        prop_assert!(close(radial_spread(&w[0]), radial_spread(&turned[0])));
    }
}
