//! Static SVG swarm plot: one horizontal swarm per group, stacked top to
//! bottom in partition order. The x-axis is the contribution in model units,
//! hue encodes the normalized group value (blue low, red high).
//!
//! Vertical jitter is a hash of `(seed, row_id, group)`, so the output is a
//! pure function of the points, the options and the seed.

use std::fmt::Write as _;

use crate::aggregate::SwarmPoint;
use crate::error::{Error, Result};
use crate::partition::FeaturePartition;

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmOptions {
    pub width: f64,
    pub row_height: f64,
    pub point_radius: f64,
    pub seed: u64,
    pub title: Option<String>,
    /// Label of the x-axis, e.g. the model's output unit.
    pub x_label: String,
}

impl Default for SwarmOptions {
    fn default() -> Self {
        Self {
            width: 900.0,
            row_height: 48.0,
            point_radius: 3.0,
            seed: 42,
            title: None,
            x_label: "grouped Shapley value".into(),
        }
    }
}

const LEFT: f64 = 170.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 80.0;
const LOW: (f64, f64, f64) = (30.0, 136.0, 229.0);
const HIGH: (f64, f64, f64) = (255.0, 13.0, 87.0);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Jitter in `[-0.5, 0.5)`.
fn jitter(seed: u64, row_id: &str, group: usize) -> f64 {
    let h = splitmix64(seed ^ splitmix64(fnv1a(row_id.as_bytes()) ^ splitmix64(group as u64)));
    (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Blue-to-red ramp over `[0, 1]`.
pub fn color(value: f64) -> String {
    let t = value.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW.0, HIGH.0),
        mix(LOW.1, HIGH.1),
        mix(LOW.2, HIGH.2)
    )
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0".into()
    } else {
        s
    }
}

/// Renders the swarm plot for `points`, whose `group` indices refer to
/// `partition`. Groups without points still get an (empty) row.
pub fn render_swarm_svg(
    points: &[SwarmPoint],
    partition: &FeaturePartition,
    options: &SwarmOptions,
) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let groups = partition.group_count();
    if let Some(p) = points.iter().find(|p| p.group >= groups) {
        return Err(Error::IndexOutOfRange {
            index: p.group,
            len: groups,
        });
    }
    let extent = points.iter().map(|p| p.gsv.abs()).fold(0.0, f64::max);
    let extent = if extent > 0.0 && extent.is_finite() {
        extent
    } else {
        1.0
    };
    let plot_width = options.width - LEFT - RIGHT;
    let x_of = |v: f64| LEFT + (v + extent) / (2.0 * extent) * plot_width;
    let height = TOP + groups as f64 * options.row_height + BOTTOM;
    let plot_bottom = TOP + groups as f64 * options.row_height;

    let mut svg = String::new();
    let w = &mut svg;
    // Writing into a String cannot fail.
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        num(options.width),
        num(height),
        num(options.width),
        num(height)
    );
    let _ = writeln!(
        w,
        r#"<defs><linearGradient id="hue" x1="0" x2="1" y1="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        color(0.0),
        color(1.0)
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(title) = &options.title {
        let _ = writeln!(
            w,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            num(options.width / 2.0),
            escape(title)
        );
    }

    // row separators
    for g in 0..=groups {
        let y = TOP + g as f64 * options.row_height;
        let _ = writeln!(
            w,
            r##"<line class="grid" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#e6e6e6"/>"##,
            num(LEFT),
            num(y),
            num(LEFT + plot_width),
            num(y)
        );
    }
    let zero = x_of(0.0);
    let _ = writeln!(
        w,
        r##"<line class="zero" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888"/>"##,
        num(zero),
        num(TOP),
        num(zero),
        num(plot_bottom)
    );

    let mut by_group: Vec<Vec<&SwarmPoint>> = vec![Vec::new(); groups];
    for p in points {
        by_group[p.group].push(p);
    }
    for (g, members) in by_group.iter().enumerate() {
        let name = &partition.groups()[g].name;
        let center = TOP + (g as f64 + 0.5) * options.row_height;
        let _ = writeln!(w, r#"<g class="swarm" data-group="{}">"#, escape(name));
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            num(LEFT - 8.0),
            num(center),
            escape(name)
        );
        for p in members {
            let y = center + jitter(options.seed, &p.row_id, p.group) * options.row_height * 0.7;
            let _ = writeln!(
                w,
                r#"<circle cx="{}" cy="{}" r="{}" fill="{}" fill-opacity="0.85"/>"#,
                num(x_of(p.gsv)),
                num(y),
                num(options.point_radius),
                color(p.color_value)
            );
        }
        let _ = writeln!(w, "</g>");
    }

    // x-axis
    let _ = writeln!(
        w,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        num(LEFT),
        num(plot_bottom),
        num(LEFT + plot_width),
        num(plot_bottom)
    );
    for step in -2..=2 {
        let v = extent * f64::from(step) / 2.0;
        let x = x_of(v);
        let _ = writeln!(
            w,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(x),
            num(plot_bottom),
            num(x),
            num(plot_bottom + 5.0),
            num(x),
            num(plot_bottom + 18.0),
            tick_label(v)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        num(LEFT + plot_width / 2.0),
        num(plot_bottom + 38.0),
        escape(&options.x_label)
    );

    // color legend
    let legend_y = plot_bottom + 52.0;
    let legend_x = LEFT + plot_width - 160.0;
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="end">low</text><rect x="{}" y="{}" width="120" height="10" fill="url(#hue)"/><text x="{}" y="{}">high</text>"#,
        num(legend_x - 4.0),
        num(legend_y + 9.0),
        num(legend_x),
        num(legend_y),
        num(legend_x + 124.0),
        num(legend_y + 9.0)
    );
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}
