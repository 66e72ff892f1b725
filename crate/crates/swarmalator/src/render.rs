//! SVG renders: agents as discs coloured by phase with an arrow along their
//! heading, and fading trails of earlier positions.

use std::f64::consts::TAU;
use std::fmt::Write;

use swarmalator_core::sim::SwarmSnapshot;
use swarmalator_core::AgentState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Style {
    /// Width and height of the image in pixels.
    pub size: f64,
    /// Half-width of the square world window; `None` fits the data.
    pub extent: Option<f64>,
    pub agent_radius: f64,
    pub arrow_length: f64,
    /// Older trail samples are thinned to at most this many per agent.
    pub trail_samples: usize,
    pub trail_radius: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            size: 600.0,
            extent: None,
            agent_radius: 5.0,
            arrow_length: 12.0,
            trail_samples: 200,
            trail_radius: 1.5,
        }
    }
}

/// Full-saturation, full-value colour at hue `phase / 2π`.
pub fn phase_colour(phase: f64) -> [u8; 3] {
    let h = (phase / TAU).rem_euclid(1.0) * 6.0;
    let sector = (h.floor() as i32).rem_euclid(6);
    let f = h - h.floor();
    let (r, g, b) = match sector {
        0 => (1.0, f, 0.0),
        1 => (1.0 - f, 1.0, 0.0),
        2 => (0.0, 1.0, f),
        3 => (0.0, 1.0 - f, 1.0),
        4 => (f, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - f),
    };
    let q = |c: f64| (c * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

fn hex([r, g, b]: [u8; 3]) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
    half: f64,
}

impl Frame {
    fn fit<'a>(states: impl Iterator<Item = &'a AgentState>, style: &Style) -> Frame {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for s in states {
            lo_x = lo_x.min(s.position.x);
            hi_x = hi_x.max(s.position.x);
            lo_y = lo_y.min(s.position.y);
            hi_y = hi_y.max(s.position.y);
        }
        let (cx, cy, fitted) = if lo_x.is_finite() {
            (
                0.5 * (lo_x + hi_x),
                0.5 * (lo_y + hi_y),
                0.55 * (hi_x - lo_x).max(hi_y - lo_y),
            )
        } else {
            (0.0, 0.0, 1.0)
        };
        let half = style.extent.unwrap_or(if fitted > 0.0 { fitted } else { 1.0 });
        let (cx, cy) = if style.extent.is_some() { (0.0, 0.0) } else { (cx, cy) };
        Frame {
            cx,
            cy,
            scale: style.size / (2.0 * half),
            half: style.size / 2.0,
        }
    }

    /// World to pixel coordinates, y pointing up.
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.half + (x - self.cx) * self.scale,
            self.half - (y - self.cy) * self.scale,
        )
    }
}

fn open(out: &mut String, style: &Style, title: &str) {
    let s = style.size;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s:.0}" height="{s:.0}" viewBox="0 0 {s:.0} {s:.0}">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
}

fn glyphs(out: &mut String, snapshot: &SwarmSnapshot, frame: &Frame, style: &Style) {
    out.push_str("<g stroke=\"#000000\" stroke-width=\"1\">\n");
    for a in &snapshot.agents {
        let (x, y) = frame.px(a.position.x, a.position.y);
        let h = a.heading();
        let (tx, ty) = (x + style.arrow_length * h.x, y - style.arrow_length * h.y);
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{}"/><line x1="{x:.3}" y1="{y:.3}" x2="{tx:.3}" y2="{ty:.3}"/>"#,
            style.agent_radius,
            hex(phase_colour(a.phase())),
        );
    }
    out.push_str("</g>\n");
}

/// One disc per agent, hue from its phase, arrow along its heading.
pub fn render_snapshot(snapshot: &SwarmSnapshot, style: &Style) -> String {
    render_trail(std::slice::from_ref(snapshot), style)
}

/// Earlier positions as dots fading towards the past, then the final snapshot.
pub fn render_trail(trace: &[SwarmSnapshot], style: &Style) -> String {
    let mut out = String::new();
    let Some(last) = trace.last() else {
        open(&mut out, style, "empty trace");
        out.push_str("</svg>\n");
        return out;
    };
    let frame = Frame::fit(trace.iter().flat_map(|s| s.agents.iter()), style);
    open(&mut out, style, &format!("t = {}", last.time));

    let older = &trace[..trace.len() - 1];
    if !older.is_empty() {
        let keep = style.trail_samples.max(1).min(older.len());
        out.push_str("<g stroke=\"none\">\n");
        for k in 0..keep {
            // evenly thinned, always ending at the newest older sample
            let idx = if keep == 1 {
                older.len() - 1
            } else {
                k * (older.len() - 1) / (keep - 1)
            };
            let opacity = (k + 1) as f64 / (keep + 1) as f64;
            for a in &older[idx].agents {
                let (x, y) = frame.px(a.position.x, a.position.y);
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{}" fill-opacity="{opacity:.4}"/>"#,
                    style.trail_radius,
                    hex(phase_colour(a.phase())),
                );
            }
        }
        out.push_str("</g>\n");
    }
    glyphs(&mut out, last, &frame, style);
    out.push_str("</svg>\n");
    out
}
