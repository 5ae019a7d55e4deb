//! Log-log line charts of the ratio column, one series per (τ, θ).

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Family, ReportRow};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    /// Abscissa drawn from the grid point.
    pub axis: Axis,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    T,
}

impl PlotSpec {
    pub fn for_family(family: Family) -> Self {
        let axis = match family {
            Family::Lemma4 | Family::Lemma9 | Family::Iint => Axis::T,
            _ => Axis::X,
        };
        PlotSpec {
            title: format!("{}: computed / reference", family.tag()),
            axis,
            width: 640.0,
            height: 400.0,
        }
    }
}

const MARGIN: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// Padded log10 range of positive values.
fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// An SVG 1.1 document. Rows without a positive ratio or abscissa are left
/// out of the chart.
pub fn emit_svg(rows: &[ReportRow], spec: &PlotSpec) -> String {
    let abscissa = |r: &ReportRow| match spec.axis {
        Axis::X => r.point.x,
        Axis::T => r.point.t,
    };
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let (Some(ratio), a) = (r.ratio, abscissa(r)) else { continue };
        if ratio > 0.0 && a > 0.0 && ratio.is_finite() && a.is_finite() {
            let key = match r.point.theta {
                Some(theta) => format!("tau={} theta={}", r.point.tau, theta),
                None => format!("tau={}", r.point.tau),
            };
            series.entry(key).or_default().push((a, ratio));
        }
    }
    for pts in series.values_mut() {
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    let (x0, x1) = log_range(series.values().flatten().map(|p| p.0));
    let (y0, y1) = log_range(series.values().flatten().map(|p| p.1));
    let (w, h) = (spec.width, spec.height);
    let px = |v: f64| MARGIN + (v.log10() - x0) / (x1 - x0) * (w - 2.0 * MARGIN);
    let py = |v: f64| h - MARGIN - (v.log10() - y0) / (y1 - y0) * (h - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M {m} {m} L {m} {b} L {r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = h - MARGIN,
        r = w - MARGIN
    );
    // Decade ticks.
    for d in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = px(10f64.powi(d));
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">1e{d}</text>"#,
            h - MARGIN + 16.0
        );
    }
    for d in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" text-anchor="end">1e{d}</text>"#,
            MARGIN - 6.0
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = py(1.0);
        let _ = writeln!(
            out,
            r#"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            w - MARGIN
        );
    }
    let axis_name = match spec.axis {
        Axis::X => "X",
        Axis::T => "T",
    };
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{axis_name}</text>"#,
        w / 2.0,
        h - 12.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(k, &(a, r))| format!("{} {:.2} {:.2}", if k == 0 { "M" } else { "L" }, px(a), py(r)))
            .collect();
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        for &(a, r) in pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(a), py(r));
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="{color}">{}</text>"#,
            w - MARGIN - 120.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{GridPoint, Status};

    fn row(x: f64, ratio: f64) -> ReportRow {
        let p = GridPoint {
            x,
            t: 100.0,
            tau: 0.5,
            theta: None,
        };
        ReportRow::new(Family::S, p, ratio, 1.0, None, Status::Monitored)
    }

    #[test]
    fn well_formed_document() {
        let rows = vec![row(1e2, 0.9), row(1e4, 1.1), row(1e6, 0.99)];
        let svg = emit_svg(&rows, &PlotSpec::for_family(Family::S));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1""#));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        let opens = svg.matches("<text").count();
        assert_eq!(opens, svg.matches("</text>").count());
    }

    #[test]
    fn empty_chart_is_still_valid() {
        let svg = emit_svg(&[], &PlotSpec::for_family(Family::J));
        assert!(svg.contains("</svg>"));
        assert!(!svg.contains("NaN"));
    }
}
