//! Flat `key=value` metrics reports, one metric per line.

use std::fmt::Write;

use swarmalator_core::metrics::{Classification, Convergence};

pub fn format_report(c: &Classification, convergence: Option<Convergence>, min_gap: Option<f64>) -> String {
    let r = &c.report;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k}={v}");
    };
    kv("label", c.label.to_string());
    kv("phase_coherence", format!("{:?}", r.phase_coherence));
    kv("s_plus", format!("{:?}", r.s_plus));
    kv("s_minus", format!("{:?}", r.s_minus));
    kv("radial_spread", format!("{:?}", r.radial_spread));
    kv("mean_angular_speed", format!("{:?}", r.mean_angular_speed));
    kv("net_circulation", format!("{:?}", r.net_circulation));
    kv("positional_drift", format!("{:?}", r.positional_drift));
    kv("mean_speed", format!("{:?}", r.mean_speed));
    kv("positional_jitter", format!("{:?}", r.positional_jitter));
    kv("mean_phase_speed", format!("{:?}", r.mean_phase_speed));
    kv("cluster_count", r.cluster_count.to_string());
    kv("tail_samples", r.samples.to_string());
    kv("tail_duration", format!("{:?}", r.duration));
    if let Some(c) = convergence {
        kv(
            "convergence_time",
            c.time().map_or_else(|| "unsettled".to_string(), |t| format!("{t:?}")),
        );
    }
    if let Some(g) = min_gap {
        kv("min_safety_gap", format!("{g:?}"));
    }
    out
}

/// Parses a report back into ordered pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}
