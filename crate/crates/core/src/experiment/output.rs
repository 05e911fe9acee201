use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::run::ExperimentReport;
use crate::error::{Error, Result};

/// Files written by [`write_outputs`], in write order.
pub const OUTPUT_FILES: [&str; 5] = ["report.json", "pairs.csv", "negativity.svg", "fidelity.svg", "comparison.svg"];

/// Columns: pair, negativity, mean_fidelity, std_error. Pairs print as `b-c`.
pub fn pairs_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("pair,negativity,mean_fidelity,std_error\n");
    for row in report.pairs() {
        let (b, c) = row.pair;
        writeln!(out, "{b}-{c},{},{},{}", row.negativity, row.mean_fidelity, row.std_error).unwrap();
    }
    out
}

/// A vertical bar chart with optional error bars.
#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub errors: Option<Vec<f64>>,
    pub y_max: f64,
    pub highlight: Option<usize>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn bar_chart_svg(chart: &BarChart) -> String {
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 70.0);
    let slot = 48.0;
    let plot_w = slot * chart.values.len().max(1) as f64;
    let plot_h = 260.0;
    let width = left + plot_w + right;
    let height = top + plot_h + bottom;
    let y = |v: f64| top + plot_h * (1.0 - (v / chart.y_max).clamp(0.0, 1.0));

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(svg, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, escape(&chart.title))
        .unwrap();
    for i in 0..=5 {
        let v = chart.y_max * i as f64 / 5.0;
        let py = y(v);
        writeln!(svg, r##"<line x1="{left}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#ddd"/>"##, left + plot_w).unwrap();
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, left - 6.0, py + 4.0).unwrap();
    }
    writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape(&chart.y_label)
    )
    .unwrap();
    for (i, (&v, label)) in chart.values.iter().zip(&chart.labels).enumerate() {
        let x = left + slot * i as f64 + slot * 0.15;
        let w = slot * 0.7;
        let fill = if chart.highlight == Some(i) { "#d95f02" } else { "#1b9e77" };
        writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="{w:.1}" height="{:.1}" fill="{fill}"><title>{}: {v:.6}</title></rect>"#,
            y(v),
            top + plot_h - y(v),
            escape(label)
        )
        .unwrap();
        if let Some(err) = chart.errors.as_ref().and_then(|e| e.get(i)).filter(|e| **e > 0.0) {
            let cx = x + w / 2.0;
            writeln!(svg, r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#, y(v + err), y(v - err))
                .unwrap();
        }
        let lx = x + w / 2.0;
        let ly = top + plot_h + 14.0;
        writeln!(
            svg,
            r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="end" transform="rotate(-45 {lx:.1} {ly:.1})">{}</text>"#,
            escape(label)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<line x1="{left}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn charts(report: &ExperimentReport) -> [String; 3] {
    let rows = report.pairs();
    let labels: Vec<String> = rows.iter().map(|r| format!("({}, {})", r.pair.0, r.pair.1)).collect();
    let selected = rows.iter().position(|r| r.pair == report.selected_pair);
    let negativity = BarChart {
        title: format!("Negativity per pair, {}", report.topology),
        y_label: "negativity".into(),
        labels: labels.clone(),
        values: rows.iter().map(|r| r.negativity).collect(),
        errors: None,
        y_max: 0.5,
        highlight: selected,
    };
    let fidelity = BarChart {
        title: format!("Protocol fidelity per pair, {}", report.topology),
        y_label: "fidelity (error bars: std error)".into(),
        labels,
        values: rows.iter().map(|r| r.mean_fidelity).collect(),
        errors: Some(rows.iter().map(|r| r.std_error).collect()),
        y_max: 1.0,
        highlight: selected,
    };
    let chosen = report.fidelities.iter().find(|f| f.pair == report.selected_pair).expect("selected pair is measured");
    let comparison = BarChart {
        title: format!("Random selection vs max negativity ({:+.1}%)", report.improvement_percent),
        y_label: "fidelity (error bars: std error)".into(),
        labels: vec!["average case".into(), format!("({}, {})", report.selected_pair.0, report.selected_pair.1)],
        values: vec![report.random_baseline.mean_fidelity, chosen.mean_fidelity],
        errors: Some(vec![report.random_baseline.std_error, chosen.std_error]),
        y_max: 1.0,
        highlight: Some(1),
    };
    [bar_chart_svg(&negativity), bar_chart_svg(&fidelity), bar_chart_svg(&comparison)]
}

/// Writes every file of [`OUTPUT_FILES`] into `dir`, creating it if needed.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let [negativity, fidelity, comparison] = charts(report);
    let contents = [report.to_json() + "\n", pairs_csv(report), negativity, fidelity, comparison];
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for (name, body) in OUTPUT_FILES.iter().zip(contents) {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
