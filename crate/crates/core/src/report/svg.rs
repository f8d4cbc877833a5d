//! Self-contained SVG box plots: one panel per variety group, one box per
//! model. Whiskers run to the minimum and maximum; no outliers are trimmed.
//! Output depends only on the input values (no timestamps, fixed ordering).

use std::collections::BTreeSet;
use std::fmt::Write;

use super::distribution::DistributionExport;
use crate::scoring::Metric;
use crate::valence::VarietyGroup;

const PALETTE: [&str; 8] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
];

const MARGIN_LEFT: f64 = 56.0;
const PANEL_GAP: f64 = 24.0;
const PLOT_TOP: f64 = 64.0;
const PLOT_HEIGHT: f64 = 300.0;
const SLOT_WIDTH: f64 = 64.0;
const BOX_WIDTH: f64 = 36.0;

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn ticks(metric: Metric) -> Vec<f64> {
    match metric {
        Metric::Beta => vec![-1.0, -0.5, 0.0, 0.5, 1.0],
        Metric::Delta => vec![0.0, 0.25, 0.5, 0.75, 1.0],
    }
}

fn title(metric: Metric) -> &'static str {
    match metric {
        Metric::Beta => "Bias (beta) by variety group",
        Metric::Delta => "Domain adequacy (delta) by variety group",
    }
}

/// Draws the box plot of `metric` over the three variety groups.
pub fn box_plot(export: &DistributionExport, metric: Metric) -> String {
    let models: Vec<&str> = export
        .metric(metric)
        .map(|e| e.summary.model_id.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (lo, hi) = metric.range();
    let slots = models.len().max(1) as f64;
    let panel_width = (slots * SLOT_WIDTH + 24.0).max(180.0);
    let width = MARGIN_LEFT + 3.0 * panel_width + 2.0 * PANEL_GAP + 16.0;
    let legend_top = PLOT_TOP + PLOT_HEIGHT + 40.0;
    let height = legend_top + 18.0 * (models.len() as f64 + 1.0) + 16.0;
    let y = |v: f64| PLOT_TOP + (hi - v.clamp(lo, hi)) / (hi - lo) * PLOT_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", title(metric));
    let _ = writeln!(
        s,
        "<desc>Boxes span Q1 to Q3 (median-of-halves) with a line at the median; whiskers reach the minimum and maximum with no outlier trimming; the diamond marks the mean. Axis range [{lo}, {hi}].</desc>"
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        width / 2.0,
        title(metric)
    );

    // shared value axis
    let _ = writeln!(s, r#"<g class="axis" data-metric="{metric}">"#);
    for t in ticks(metric) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{t}</text>"#,
            MARGIN_LEFT - 8.0,
            y(t)
        );
    }
    let _ = writeln!(s, "</g>");

    for (p, group) in VarietyGroup::ALL.into_iter().enumerate() {
        let left = MARGIN_LEFT + p as f64 * (panel_width + PANEL_GAP);
        let _ = writeln!(s, r#"<g class="panel" data-group="{group}">"#);
        let _ = writeln!(
            s,
            r##"<rect x="{left:.2}" y="{PLOT_TOP:.2}" width="{panel_width:.2}" height="{PLOT_HEIGHT:.2}" fill="#f7f7f7" stroke="#444"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{group}</text>"#,
            left + panel_width / 2.0,
            PLOT_TOP - 10.0
        );
        for t in ticks(metric) {
            let _ = writeln!(
                s,
                r##"<line x1="{left:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="#ddd"/>"##,
                left + panel_width,
                y(t),
                y(t)
            );
        }
        for (slot, model) in models.iter().enumerate() {
            let Some(entry) = export
                .metric(metric)
                .find(|e| e.summary.group == group && e.summary.model_id == *model)
            else {
                continue;
            };
            let st = &entry.summary.stats;
            let color = PALETTE[slot % PALETTE.len()];
            let cx = left + 12.0 + SLOT_WIDTH * (slot as f64 + 0.5);
            let x0 = cx - BOX_WIDTH / 2.0;
            let x1 = cx + BOX_WIDTH / 2.0;
            let _ = writeln!(
                s,
                r#"<g class="box" data-model="{}" data-count="{}">"#,
                escape(model),
                entry.summary.count
            );
            let _ = writeln!(
                s,
                r##"<line class="whisker" x1="{cx:.2}" x2="{cx:.2}" y1="{:.2}" y2="{:.2}" stroke="#222"/>"##,
                y(st.min),
                y(st.max)
            );
            for v in [st.min, st.max] {
                let _ = writeln!(
                    s,
                    r##"<line class="cap" x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="#222"/>"##,
                    cx - BOX_WIDTH / 4.0,
                    cx + BOX_WIDTH / 4.0,
                    y(v),
                    y(v)
                );
            }
            if st.q3 > st.q1 {
                let _ = writeln!(
                    s,
                    r##"<rect class="iqr" x="{x0:.2}" y="{:.2}" width="{BOX_WIDTH:.2}" height="{:.2}" fill="{color}" fill-opacity="0.8" stroke="#222"/>"##,
                    y(st.q3),
                    y(st.q1) - y(st.q3)
                );
            } else {
                // zero IQR collapses to a line
                let _ = writeln!(
                    s,
                    r#"<line class="iqr" x1="{x0:.2}" x2="{x1:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="3"/>"#,
                    y(st.q1),
                    y(st.q1)
                );
            }
            let _ = writeln!(
                s,
                r##"<line class="median" x1="{x0:.2}" x2="{x1:.2}" y1="{:.2}" y2="{:.2}" stroke="#000" stroke-width="2"/>"##,
                y(st.median),
                y(st.median)
            );
            let my = y(st.mean);
            let _ = writeln!(
                s,
                r##"<path class="mean" d="M {cx:.2} {:.2} L {:.2} {my:.2} L {cx:.2} {:.2} L {:.2} {my:.2} Z" fill="white" stroke="#000"/>"##,
                my - 4.0,
                cx + 4.0,
                my + 4.0,
                cx - 4.0
            );
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (slot, model) in models.iter().enumerate() {
        let ly = legend_top + 18.0 * slot as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT:.2}" y="{:.2}" width="12" height="12" fill="{}"/>"#,
            ly - 10.0,
            PALETTE[slot % PALETTE.len()]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            MARGIN_LEFT + 18.0,
            escape(model)
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="{MARGIN_LEFT:.2}" y="{:.2}" fill="#555">whiskers: min to max (no outlier trimming); box: Q1 to Q3; line: median; diamond: mean</text>"##,
        legend_top + 18.0 * models.len() as f64
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
