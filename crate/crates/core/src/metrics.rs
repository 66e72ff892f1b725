//! Order parameters and the rule-based pattern classifier.
//!
//! Windowed metrics match agents across snapshots by position in the agent
//! list; every snapshot in a window must list the same ids in the same order.

use alloc::vec::Vec;
use core::fmt;

use crate::angle;
use crate::sim::SwarmSnapshot;
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("window needs at least {needed} snapshots, got {got}")]
    WindowTooShort { needed: usize, got: usize },
    #[error("window has zero duration")]
    ZeroDuration,
    #[error("snapshots in the window do not list the same agents")]
    AgentMismatch,
    #[error("empty swarm")]
    Empty,
}

/// The five emergent patterns, plus `Unknown` when no rule fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternLabel {
    StaticSync,
    StaticAsync,
    StaticPhaseWave,
    SplinteredPhaseWave,
    ActivePhaseWave,
    Unknown,
}

impl PatternLabel {
    pub const ALL: [PatternLabel; 6] = [
        PatternLabel::StaticSync,
        PatternLabel::StaticAsync,
        PatternLabel::StaticPhaseWave,
        PatternLabel::SplinteredPhaseWave,
        PatternLabel::ActivePhaseWave,
        PatternLabel::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternLabel::StaticSync => "StaticSync",
            PatternLabel::StaticAsync => "StaticAsync",
            PatternLabel::StaticPhaseWave => "StaticPhaseWave",
            PatternLabel::SplinteredPhaseWave => "SplinteredPhaseWave",
            PatternLabel::ActivePhaseWave => "ActivePhaseWave",
            PatternLabel::Unknown => "Unknown",
        }
    }

    pub fn is_static(self) -> bool {
        matches!(
            self,
            PatternLabel::StaticSync | PatternLabel::StaticAsync | PatternLabel::StaticPhaseWave
        )
    }

    pub fn parse(s: &str) -> Option<Self> {
        PatternLabel::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn centroid(snapshot: &SwarmSnapshot) -> Vec2 {
    let mut c = Vec2::ZERO;
    for a in &snapshot.agents {
        c += a.position;
    }
    c / snapshot.len().max(1) as f64
}

fn mean_phasor(angles: impl Iterator<Item = f64>) -> f64 {
    let (mut c, mut s, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        c += libm::cos(a);
        s += libm::sin(a);
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    libm::sqrt(c * c + s * s) / n as f64
}

/// Kuramoto order parameter `|⟨e^{iφ}⟩|`.
pub fn phase_coherence(snapshot: &SwarmSnapshot) -> f64 {
    mean_phasor(snapshot.agents.iter().map(|a| a.phase()))
}

/// Spatial angle of every agent around the centroid; agents sitting on the centroid get `None`.
fn spatial_angles(snapshot: &SwarmSnapshot) -> Vec<Option<f64>> {
    let c = centroid(snapshot);
    snapshot
        .agents
        .iter()
        .map(|a| {
            let d = a.position - c;
            (d.norm() > 1e-12).then(|| d.angle())
        })
        .collect()
}

/// `(S+, S-)`: moduli of the mean phasors of `ψ + φ` and `ψ - φ`.
pub fn phase_space_correlation(snapshot: &SwarmSnapshot) -> (f64, f64) {
    let psi = spatial_angles(snapshot);
    let pairs = || {
        snapshot
            .agents
            .iter()
            .zip(&psi)
            .filter_map(|(a, p)| p.map(|p| (p, a.phase())))
    };
    (
        mean_phasor(pairs().map(|(p, f)| p + f)),
        mean_phasor(pairs().map(|(p, f)| p - f)),
    )
}

/// Spread of distances from the centroid relative to their mean.
///
/// About 0.35 for a uniformly filled disc, near 0 for a thin ring.
pub fn radial_spread(snapshot: &SwarmSnapshot) -> f64 {
    let c = centroid(snapshot);
    let n = snapshot.len();
    if n == 0 {
        return 0.0;
    }
    let radii: Vec<f64> = snapshot.agents.iter().map(|a| (a.position - c).norm()).collect();
    let mean = radii.iter().sum::<f64>() / n as f64;
    if mean <= 0.0 {
        return 0.0;
    }
    let var = radii.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n as f64;
    libm::sqrt(var) / mean
}

/// Smallest gap between two safety areas; `+∞` with fewer than two agents.
pub fn min_safety_gap(snapshot: &SwarmSnapshot, safety_radius: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in snapshot.agents.iter().enumerate() {
        for b in &snapshot.agents[i + 1..] {
            best = best.min((a.position - b.position).norm() - 2.0 * safety_radius);
        }
    }
    best
}

/// Number of angular sectors the swarm occupies over a window.
///
/// Spatial angles around each snapshot's centroid are pooled over the window
/// into `bins` equal sectors; a sector holding less than `empty_fraction` of
/// the mean sector count separates groups. Returns the number of circular runs
/// of occupied sectors, at least 1.
pub fn cluster_count(window: &[SwarmSnapshot], bins: usize, empty_fraction: f64) -> usize {
    let bins = bins.max(2);
    let mut counts = alloc::vec![0usize; bins];
    let mut total = 0usize;
    for s in window {
        for psi in spatial_angles(s).into_iter().flatten() {
            let unit = angle::wrap(psi) / core::f64::consts::TAU;
            let b = ((unit * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return 1;
    }
    let limit = empty_fraction * total as f64 / bins as f64;
    let occupied: Vec<bool> = counts.iter().map(|&c| c as f64 >= limit).collect();
    let runs = (0..bins)
        .filter(|&b| occupied[b] && !occupied[(b + bins - 1) % bins])
        .count();
    runs.max(1)
}

fn check_window(window: &[SwarmSnapshot]) -> Result<f64, MetricsError> {
    if window.len() < 2 {
        return Err(MetricsError::WindowTooShort {
            needed: 2,
            got: window.len(),
        });
    }
    let first = &window[0];
    if first.is_empty() {
        return Err(MetricsError::Empty);
    }
    for s in &window[1..] {
        if s.len() != first.len() || s.agents.iter().zip(&first.agents).any(|(a, b)| a.id != b.id) {
            return Err(MetricsError::AgentMismatch);
        }
    }
    let duration = window[window.len() - 1].time - first.time;
    if duration <= 0.0 {
        return Err(MetricsError::ZeroDuration);
    }
    Ok(duration)
}

/// Mean net displacement between the window's endpoints per unit time.
pub fn stationarity(window: &[SwarmSnapshot]) -> Result<f64, MetricsError> {
    let duration = check_window(window)?;
    let (first, last) = (&window[0], &window[window.len() - 1]);
    let total: f64 = first
        .agents
        .iter()
        .zip(&last.agents)
        .map(|(a, b)| (b.position - a.position).norm())
        .sum();
    Ok(total / first.len() as f64 / duration)
}

/// Mean path length per unit time, summed over consecutive samples.
pub fn mean_speed(window: &[SwarmSnapshot]) -> Result<f64, MetricsError> {
    let duration = check_window(window)?;
    let mut total = 0.0;
    for pair in window.windows(2) {
        for (a, b) in pair[0].agents.iter().zip(&pair[1].agents) {
            total += (b.position - a.position).norm();
        }
    }
    Ok(total / window[0].len() as f64 / duration)
}

/// RMS distance of agents from their own mean position over the window.
pub fn positional_jitter(window: &[SwarmSnapshot]) -> Result<f64, MetricsError> {
    check_window(window)?;
    let n = window[0].len();
    let m = window.len() as f64;
    let mut sum_sq = 0.0;
    for i in 0..n {
        let mean = window.iter().fold(Vec2::ZERO, |acc, s| acc + s.agents[i].position) / m;
        sum_sq += window
            .iter()
            .map(|s| (s.agents[i].position - mean).norm_squared())
            .sum::<f64>();
    }
    Ok(libm::sqrt(sum_sq / (n as f64 * m)))
}

/// Angular travel around the centroid: `(mean |Δψ|/T, |mean Δψ|/T)` with `Δψ`
/// the unwrapped net change of each agent's spatial angle over the window.
pub fn angular_motion(window: &[SwarmSnapshot]) -> Result<(f64, f64), MetricsError> {
    let duration = check_window(window)?;
    let n = window[0].len();
    let mut travel = alloc::vec![0.0f64; n];
    let mut prev = spatial_angles(&window[0]);
    for s in &window[1..] {
        let cur = spatial_angles(s);
        for i in 0..n {
            if let (Some(a), Some(b)) = (prev[i], cur[i]) {
                travel[i] += angle::difference(b, a);
            }
        }
        prev = cur;
    }
    let abs_mean = travel.iter().map(|t| t.abs()).sum::<f64>() / n as f64;
    let net = (travel.iter().sum::<f64>() / n as f64).abs();
    Ok((abs_mean / duration, net / duration))
}

/// Mean absolute phase rate over the window, from unwrapped phase differences.
pub fn mean_phase_speed(window: &[SwarmSnapshot]) -> Result<f64, MetricsError> {
    let duration = check_window(window)?;
    let mut total = 0.0;
    for pair in window.windows(2) {
        for (a, b) in pair[0].agents.iter().zip(&pair[1].agents) {
            total += angle::difference(b.phase(), a.phase()).abs();
        }
    }
    Ok(total / window[0].len() as f64 / duration)
}

/// Classifier thresholds. Every field can be overridden from configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// Coherence above which a static swarm is synchronised.
    pub sync_coherence: f64,
    /// Coherence below which a static swarm can be asynchronous.
    pub async_coherence: f64,
    /// Phase-space correlation below which a static swarm can be asynchronous.
    pub async_correlation: f64,
    /// Phase-space correlation above which a static swarm is a phase wave.
    pub wave_correlation: f64,
    /// Mean path speed below which the swarm counts as stationary.
    pub stationary_speed: f64,
    /// Minimum phase-space correlation of a splintered wave.
    pub splinter_correlation: f64,
    /// Maximum net circulation of a splintered wave.
    pub splinter_circulation: f64,
    /// Minimum mean angular speed around the centroid of an active wave.
    pub active_angular_speed: f64,
    /// Minimum mean phase speed of an active wave.
    pub active_phase_speed: f64,
    /// Angular sectors used for cluster counting.
    pub cluster_bins: usize,
    /// Occupancy (relative to the mean) below which a sector is empty.
    pub cluster_empty_fraction: f64,
    /// Samples per block for cluster counting; the median over blocks is reported.
    pub cluster_block: usize,
    /// Fraction of the trace forming the tail window.
    pub tail_fraction: f64,
    /// Minimum samples in the tail window.
    pub min_tail_samples: usize,
    /// Samples per window when locating the convergence time.
    pub convergence_window: usize,
    /// Mean path speed a static pattern must stay under to count as formed.
    pub settle_speed: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sync_coherence: 0.95,
            async_coherence: 0.3,
            async_correlation: 0.3,
            wave_correlation: 0.9,
            stationary_speed: 0.02 * crate::state::DEFAULT_MAX_SPEED,
            splinter_correlation: 0.5,
            splinter_circulation: 2e-3,
            active_angular_speed: 4e-3,
            active_phase_speed: 2e-3,
            cluster_bins: 72,
            cluster_empty_fraction: 0.15,
            cluster_block: 50,
            tail_fraction: 0.2,
            min_tail_samples: 200,
            convergence_window: 20,
            settle_speed: 1e-3 * crate::state::DEFAULT_MAX_SPEED,
        }
    }
}

/// Everything the classifier looks at, measured over one window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    /// Window mean of the Kuramoto order parameter.
    pub phase_coherence: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub radial_spread: f64,
    /// Mean over agents of |net angular travel| around the centroid per unit time.
    pub mean_angular_speed: f64,
    /// |mean signed angular travel| per unit time.
    pub net_circulation: f64,
    /// Mean net displacement over the window per unit time.
    pub positional_drift: f64,
    /// Mean path speed.
    pub mean_speed: f64,
    pub positional_jitter: f64,
    pub mean_phase_speed: f64,
    pub cluster_count: usize,
    pub samples: usize,
    pub duration: f64,
}

impl MetricsReport {
    pub fn correlation(&self) -> f64 {
        self.s_plus.max(self.s_minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub label: PatternLabel,
    pub report: MetricsReport,
}

/// Measures a window of snapshots.
pub fn measure(window: &[SwarmSnapshot], th: &Thresholds) -> Result<MetricsReport, MetricsError> {
    let duration = check_window(window)?;
    let m = window.len() as f64;
    let (mut r, mut sp, mut sm, mut spread) = (0.0, 0.0, 0.0, 0.0);
    for s in window {
        r += phase_coherence(s);
        let (p, q) = phase_space_correlation(s);
        sp += p;
        sm += q;
        spread += radial_spread(s);
    }
    let (angular, net) = angular_motion(window)?;
    let block = th.cluster_block.max(1);
    let mut clusters: Vec<usize> = window
        .chunks(block)
        .filter(|c| c.len() * 2 >= block || window.len() < block)
        .map(|c| cluster_count(c, th.cluster_bins, th.cluster_empty_fraction))
        .collect();
    clusters.sort_unstable();
    Ok(MetricsReport {
        phase_coherence: r / m,
        s_plus: sp / m,
        s_minus: sm / m,
        radial_spread: spread / m,
        mean_angular_speed: angular,
        net_circulation: net,
        positional_drift: stationarity(window)?,
        mean_speed: mean_speed(window)?,
        positional_jitter: positional_jitter(window)?,
        mean_phase_speed: mean_phase_speed(window)?,
        cluster_count: clusters[clusters.len() / 2],
        samples: window.len(),
        duration,
    })
}

/// Applies the decision rules to a report.
pub fn label(report: &MetricsReport, th: &Thresholds) -> PatternLabel {
    let corr = report.correlation();
    if report.mean_speed < th.stationary_speed {
        if report.phase_coherence > th.sync_coherence {
            PatternLabel::StaticSync
        } else if corr > th.wave_correlation {
            PatternLabel::StaticPhaseWave
        } else if report.phase_coherence < th.async_coherence && corr < th.async_correlation {
            PatternLabel::StaticAsync
        } else {
            PatternLabel::Unknown
        }
    } else if corr > th.splinter_correlation
        && report.cluster_count > 1
        && report.net_circulation < th.splinter_circulation
    {
        PatternLabel::SplinteredPhaseWave
    } else if report.mean_angular_speed > th.active_angular_speed
        && report.mean_phase_speed > th.active_phase_speed
    {
        PatternLabel::ActivePhaseWave
    } else {
        PatternLabel::Unknown
    }
}

pub fn classify_window(window: &[SwarmSnapshot], th: &Thresholds) -> Result<Classification, MetricsError> {
    let report = measure(window, th)?;
    Ok(Classification {
        label: label(&report, th),
        report,
    })
}

/// Number of trailing samples forming the tail window of a trace of `len` samples.
pub fn tail_len(len: usize, th: &Thresholds) -> usize {
    let frac = libm::ceil(th.tail_fraction * len as f64) as usize;
    frac.max(th.min_tail_samples).min(len)
}

/// Classifies the tail window of a trace.
pub fn classify(trace: &[SwarmSnapshot], th: &Thresholds) -> Result<Classification, MetricsError> {
    let needed = th.min_tail_samples.max(2);
    if trace.len() < needed {
        return Err(MetricsError::WindowTooShort {
            needed,
            got: trace.len(),
        });
    }
    classify_window(&trace[trace.len() - tail_len(trace.len(), th)..], th)
}

/// When a trace first settles into its final pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convergence {
    /// Every window ending at or after `time` carries `label` and, for static
    /// labels, moves slower than `Thresholds::settle_speed`.
    Settled { time: f64, label: PatternLabel },
    /// The final window itself has not settled.
    Unsettled { label: PatternLabel },
}

impl Convergence {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Convergence::Settled { time, .. } => Some(time),
            Convergence::Unsettled { .. } => None,
        }
    }

    pub fn label(&self) -> PatternLabel {
        match *self {
            Convergence::Settled { label, .. } | Convergence::Unsettled { label } => label,
        }
    }
}

/// Locates the convergence time of a trace.
///
/// Windows of `th.convergence_window` samples end at every `stride`-th sample.
/// `None` if the trace is shorter than one window.
pub fn convergence_time(
    trace: &[SwarmSnapshot],
    th: &Thresholds,
    stride: usize,
) -> Result<Option<Convergence>, MetricsError> {
    let w = th.convergence_window.max(2);
    if trace.len() < w {
        return Ok(None);
    }
    let stride = stride.max(1);
    let last_end = trace.len();
    let mut ends: Vec<usize> = (w..=last_end).step_by(stride).collect();
    if ends.last() != Some(&last_end) {
        ends.push(last_end);
    }
    let settled_window = |end: usize, want: Option<PatternLabel>| {
        let c = classify_window(&trace[end - w..end], th)?;
        let still = !c.label.is_static() || c.report.mean_speed < th.settle_speed;
        let ok = still && want.map_or(true, |l| l == c.label);
        Ok::<_, MetricsError>((ok, c.label))
    };
    let (ok, label) = settled_window(last_end, None)?;
    if !ok {
        return Ok(Some(Convergence::Unsettled { label }));
    }
    let mut settled = last_end;
    for &end in ends.iter().rev().skip(1) {
        if !settled_window(end, Some(label))?.0 {
            break;
        }
        settled = end;
    }
    Ok(Some(Convergence::Settled {
        time: trace[settled - 1].time,
        label,
    }))
}
