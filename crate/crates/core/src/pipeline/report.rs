use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::summary::{CorpusSummary, MetricSummary};
use super::NoteStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
    Csv,
    Svg,
}

pub fn render_report(summary: &CorpusSummary, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Text => {
            let mut s = format!("notes: {}\n", summary.n);
            for (name, m) in summary.metrics() {
                writeln!(s, "{name}: {:.1} ± {:.1}", m.mean, m.sd).unwrap();
            }
            s.push('\n');
            for (name, m) in summary.metrics() {
                writeln!(s, "{name} range: {} to {}", m.min, m.max).unwrap();
            }
            s.into_bytes()
        }
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(summary).expect("serializable");
            v.push(b'\n');
            v
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["metric", "n", "mean", "sd", "min", "max"]).unwrap();
            for (name, m) in summary.metrics() {
                w.write_record([
                    name.to_string(),
                    summary.n.to_string(),
                    m.mean.to_string(),
                    m.sd.to_string(),
                    m.min.to_string(),
                    m.max.to_string(),
                ])
                .unwrap();
            }
            w.into_inner().expect("in-memory writer")
        }
        ReportFormat::Svg => {
            let panels: Vec<String> = summary.metrics().iter().map(|(n, m)| histogram_svg(n, m)).collect();
            let (w, h) = (PANEL_W, PANEL_H * panels.len() as f64);
            let mut s = format!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
            );
            for (i, p) in panels.iter().enumerate() {
                writeln!(s, "<g transform=\"translate(0,{})\">", i as f64 * PANEL_H).unwrap();
                s.push_str(&p[p.find('\n').unwrap() + 1..p.rfind("</svg>").unwrap()]);
                s.push_str("</g>\n");
            }
            s.push_str("</svg>\n");
            s.into_bytes()
        }
    }
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 360.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A standalone bar chart of one metric's histogram.
pub fn histogram_svg(name: &str, m: &MetricSummary) -> String {
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 50.0);
    let plot_w = PANEL_W - left - right;
    let plot_h = PANEL_H - top - bottom;
    let h = &m.histogram;
    let peak = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bar_w = plot_w / h.counts.len().max(1) as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" viewBox=\"0 0 {PANEL_W} {PANEL_H}\">\n"
    );
    writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{} (mean {:.1} ± {:.1})</text>",
        PANEL_W / 2.0,
        escape(name),
        m.mean,
        m.sd
    )
    .unwrap();
    for (i, &c) in h.counts.iter().enumerate() {
        let bh = plot_h * c as f64 / peak;
        writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#4a78a8\" stroke=\"#ffffff\"><title>[{}, {}): {}</title></rect>",
            left + i as f64 * bar_w,
            top + plot_h - bh,
            bar_w,
            bh,
            h.bin_edges[i],
            h.bin_edges[i + 1],
            c
        )
        .unwrap();
    }
    let axis_y = top + plot_h;
    writeln!(s, "<line x1=\"{left}\" y1=\"{axis_y}\" x2=\"{}\" y2=\"{axis_y}\" stroke=\"#000\"/>", left + plot_w).unwrap();
    writeln!(s, "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{axis_y}\" stroke=\"#000\"/>").unwrap();
    let label = |x: f64, v: f64| {
        format!(
            "<text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            axis_y + 16.0,
            trim_number(v)
        )
    };
    s.push_str(&label(left, h.bin_edges[0]));
    s.push_str(&label(left + plot_w, *h.bin_edges.last().unwrap()));
    writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
        left - 6.0,
        top + 4.0,
        peak
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">notes per bin</text>",
        left / 2.0,
        top - 10.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

fn trim_number(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// One row per note, header first.
pub fn write_stats_csv(stats: &[NoteStats], sink: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for s in stats {
        w.serialize(s)?;
    }
    if stats.is_empty() {
        w.write_record([
            "accession_num",
            "source_chars",
            "standardized_chars",
            "grammatical_errors",
            "spelling_errors",
            "abbreviations_expanded",
            "non_standard_terms",
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::aggregate;

    fn summary() -> CorpusSummary {
        let stats: Vec<NoteStats> = (0..30)
            .map(|i| NoteStats {
                accession_num: i.to_string(),
                source_chars: 2000 + 97 * i,
                standardized_chars: 2100 + 90 * i,
                grammatical_errors: i % 7,
                spelling_errors: i % 3,
                abbreviations_expanded: 5 + i % 11,
                non_standard_terms: i % 4,
            })
            .collect();
        aggregate(&stats, 20).unwrap()
    }

    #[test]
    fn text_has_mean_sd_lines() {
        let mut s = summary();
        s.abbreviations_expanded.mean = 15.8;
        s.abbreviations_expanded.sd = 9.1;
        let text = String::from_utf8(render_report(&s, ReportFormat::Text)).unwrap();
        assert!(text.lines().any(|l| l == "abbreviations_expanded: 15.8 ± 9.1"), "{text}");
    }

    #[test]
    fn json_round_trips() {
        let s = summary();
        let back: CorpusSummary = serde_json::from_slice(&render_report(&s, ReportFormat::Json)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_and_svg_shapes() {
        let s = summary();
        let csv = String::from_utf8(render_report(&s, ReportFormat::Csv)).unwrap();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.starts_with("metric,n,mean,sd,min,max\n"));
        let svg = String::from_utf8(render_report(&s, ReportFormat::Svg)).unwrap();
        assert_eq!(svg.matches("<g transform").count(), 6);
        assert_eq!(svg.matches("<rect").count(), 6 * 20);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn stats_csv_has_header() {
        let mut out = Vec::new();
        write_stats_csv(&[], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("accession_num,source_chars"));
    }
}
