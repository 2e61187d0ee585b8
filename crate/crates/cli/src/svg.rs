//! Static SVG plots of a computed trajectory.

use std::fmt::Write;

use trajkit::{DiscretizedPath, SpeedProfile};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Maps `[lo, hi]` onto `[MARGIN, SIZE - MARGIN]`, flipping when asked.
struct Axis {
    lo: f64,
    scale: f64,
    flip: bool,
}

impl Axis {
    fn new(lo: f64, hi: f64, span: f64, flip: bool) -> Self {
        let width = (hi - lo).max(1e-12);
        Self {
            lo,
            scale: span / width,
            flip,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let u = (v - self.lo) * self.scale;
        if self.flip {
            SIZE - MARGIN - u
        } else {
            MARGIN + u
        }
    }
}

/// Blue at rest, red at the top speed.
fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * t).round() as u8;
    let b = (255.0 * (1.0 - t)).round() as u8;
    format!("#{r:02x}40{b:02x}")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{title}</text>"#);
}

/// Configurations as a polyline, each step stroked by its mean velocity.
pub fn path_plot(path: &DiscretizedPath, profile: &SpeedProfile) -> String {
    let configs = path.configs();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in configs {
        x0 = x0.min(c.x());
        x1 = x1.max(c.x());
        y0 = y0.min(c.y());
        y1 = y1.max(c.y());
    }
    // Equal scales on both axes keep the geometry undistorted.
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let ax = Axis::new(x0, x0 + span, SIZE - 2.0 * MARGIN, false);
    let ay = Axis::new(y0, y0 + span, SIZE - 2.0 * MARGIN, true);
    let z_max = profile.z.iter().copied().fold(0.0, f64::max).max(1e-12);

    let mut out = String::new();
    header(&mut out, &format!("path, colored by velocity (max z = {z_max:.3})"));
    let _ = writeln!(out, r#"<g stroke-width="3" stroke-linecap="round">"#);
    for (i, w) in configs.windows(2).enumerate() {
        let z = 0.5 * (profile.z[i] + profile.z[i + 1]);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}"/>"#,
            ax.map(w[0].x()),
            ay.map(w[0].y()),
            ax.map(w[1].x()),
            ay.map(w[1].y()),
            color(z / z_max)
        );
    }
    out += "</g>\n</svg>\n";
    out
}

/// Velocity parameter and its caps against arc length.
pub fn speed_plot(path: &DiscretizedPath, profile: &SpeedProfile) -> String {
    let s = path.arc_lengths();
    let total = s.last().copied().unwrap_or(0.0);
    let finite_caps = profile.caps.iter().copied().filter(|c| c.is_finite());
    let top = profile.z.iter().copied().chain(finite_caps).fold(0.0, f64::max).max(1e-12);
    let ax = Axis::new(0.0, total, SIZE - 2.0 * MARGIN, false);
    let ay = Axis::new(0.0, 1.05 * top, SIZE - 2.0 * MARGIN, true);
    let polyline = |vals: &[f64]| {
        s.iter()
            .zip(vals)
            .map(|(&si, &v)| format!("{:.2},{:.2}", ax.map(si), ay.map(v.min(1.05 * top))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut out = String::new();
    header(&mut out, "velocity parameter z against arc length s");
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{m}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{m}" y1="{b}" x2="{m}" y2="{m}"/></g>"#,
        m = MARGIN,
        b = SIZE - MARGIN,
        r = SIZE - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="12">s = {total:.3} m</text>"#,
        SIZE - MARGIN - 80.0,
        SIZE - MARGIN + 20.0
    );
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#bbbbbb" stroke-dasharray="4 3" points="{}"/>"##,
        polyline(&profile.caps)
    );
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#c0392b" stroke-width="2" points="{}"/>"##,
        polyline(&profile.z)
    );
    out += "</svg>\n";
    out
}
