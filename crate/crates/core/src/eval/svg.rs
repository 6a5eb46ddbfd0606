//! SVG frame overlays: detections in red, tracks in per-id colours.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

use super::mot::PixelBox;

pub const DETECTION_COLOR: &str = "#ff0000";
const BACKGROUND: &str = "#1e1e1e";

/// Deterministic colour for a track id. Hues stay clear of red.
pub fn track_color(id: i64) -> String {
    // Golden-angle steps spread consecutive ids around the wheel.
    let hue = 30.0 + (id.unsigned_abs() as f64 * 137.507_764_050_037_85).rem_euclid(300.0);
    let (s, l) = (0.85, 0.55);
    let c = (1.0 - (2.0 * l - 1.0_f64).abs()) * s;
    let hp = hue / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", to(r), to(g), to(b))
}

pub fn render_svg(width: u32, height: u32, detections: &[PixelBox], tracks: &[(i64, PixelBox)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="{BACKGROUND}"/>"#);
    for b in detections {
        let _ = writeln!(
            s,
            r#"<rect class="detection" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{DETECTION_COLOR}" stroke-width="1"/>"#,
            b[0], b[1], b[2], b[3]
        );
    }
    for (id, b) in tracks {
        let color = track_color(*id);
        let _ = writeln!(
            s,
            r#"<rect class="track" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            b[0], b[1], b[2], b[3]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}" font-family="monospace" font-size="12">{id}</text>"#,
            b[0],
            (b[1] - 3.0).max(12.0)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(path: &Path, width: u32, height: u32, detections: &[PixelBox], tracks: &[(i64, PixelBox)]) -> Result<()> {
    fs::write(path, render_svg(width, height, detections, tracks))?;
    Ok(())
}
