//! Static SVG line charts and the null-model count table, built from the
//! simulation CSV outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::methods::MethodKind;
use crate::simstudy::{read_summary_csv, SummaryRow, HISTOGRAM_BINS, HISTOGRAM_COLUMNS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Ier,
    Eer,
    Ap,
    Jp,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Ier, Metric::Eer, Metric::Ap, Metric::Jp];

    pub fn key(self) -> &'static str {
        match self {
            Metric::Ier => "ier",
            Metric::Eer => "eer",
            Metric::Ap => "ap",
            Metric::Jp => "jp",
        }
    }

    pub fn value(self, row: &SummaryRow) -> Option<f64> {
        match self {
            Metric::Ier => Some(row.ier),
            Metric::Eer => Some(row.eer),
            Metric::Ap => row.ap,
            Metric::Jp => row.jp,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;

fn color(m: MethodKind) -> &'static str {
    match m {
        MethodKind::Len89 => "#1f77b4",
        MethodKind::Bm86 => "#2ca02c",
        MethodKind::Bp91 => "#ff7f0e",
        MethodKind::Ln97 => "#d62728",
    }
}

fn fmt_delta(d: f64) -> String {
    if d.fract() == 0.0 {
        format!("{d:.0}")
    } else {
        format!("{d}")
    }
}

/// Line chart of `metric` against Δ for one scenario family. Δ values sit at
/// equally spaced positions in increasing order; returns None when no row of
/// the family carries the metric.
pub fn metric_chart(rows: &[SummaryRow], family: &str, metric: Metric) -> Option<String> {
    let mut series: BTreeMap<MethodKind, Vec<(f64, f64)>> = BTreeMap::new();
    let mut deltas: Vec<f64> = Vec::new();
    for r in rows.iter().filter(|r| r.family() == family) {
        if let Some(v) = metric.value(r) {
            series.entry(r.method).or_default().push((r.delta, v));
            deltas.push(r.delta);
        }
    }
    if series.is_empty() {
        return None;
    }
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let ymax = series
        .values()
        .flatten()
        .fold(0.0_f64, |a, &(_, v)| a.max(v));
    let ymax = ((ymax * 1.1 / 0.05).ceil() * 0.05).clamp(0.05, 1.0);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let xpos = |d: f64| {
        let i = deltas.iter().position(|&x| x == d).unwrap_or(0);
        if deltas.len() == 1 {
            LEFT + pw / 2.0
        } else {
            LEFT + pw * i as f64 / (deltas.len() - 1) as f64
        }
    };
    let ypos = |v: f64| TOP + ph * (1.0 - v / ymax);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{} vs Δ, {family}</text>"#,
        LEFT + pw / 2.0,
        metric.key().to_uppercase()
    );
    for t in 0..=5 {
        let v = ymax * t as f64 / 5.0;
        let y = ypos(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for &d in &deltas {
        let x = xpos(d);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            fmt_delta(d)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw,
        TOP + ph,
        TOP + ph
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Δ</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0
    );
    for (i, (method, pts)) in series.iter_mut().enumerate() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|&(d, v)| format!("{:.1},{:.1}", xpos(d), ypos(v))).collect();
        let c = color(*method);
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#, path.join(" "));
        for &(d, v) in pts.iter() {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{c}"/>"#, xpos(d), ypos(v));
        }
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{method}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Per-method count proportions of the null-model row of `histogram.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramRow {
    pub method: MethodKind,
    pub scenario: String,
    pub histogram: [f64; HISTOGRAM_BINS],
    pub ier: f64,
    pub eer: f64,
}

pub fn read_histogram_csv(path: &Path) -> Result<Vec<HistogramRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HISTOGRAM_COLUMNS {
        return Err(Error::Parse(format!("{}: unexpected histogram header {header:?}", path.display())));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| Error::Parse(format!("bad number '{}' in histogram.csv", &rec[i])))
        };
        let mut histogram = [0.0; HISTOGRAM_BINS];
        for (b, h) in histogram.iter_mut().enumerate() {
            *h = num(2 + b)?;
        }
        out.push(HistogramRow {
            method: rec[0].parse()?,
            scenario: rec[1].to_string(),
            histogram,
            ier: num(2 + HISTOGRAM_BINS)?,
            eer: num(3 + HISTOGRAM_BINS)?,
        });
    }
    Ok(out)
}

/// The fully null scenario: no location effects and Δ = 1. Prefers a scenario
/// without dispersion effects when several qualify.
fn null_scenario(rows: &[HistogramRow]) -> Option<&str> {
    let is_null = |id: &str| id.contains("_l0_") && id.ends_with("_x1");
    rows.iter()
        .map(|r| r.scenario.as_str())
        .filter(|id| is_null(id))
        .min_by_key(|id| (!id.starts_with("d0_"), *id))
}

/// Count-of-declared-effects table for the null scenario, methods in table order.
pub fn format_table2(rows: &[HistogramRow]) -> Result<String> {
    let id = null_scenario(rows)
        .ok_or_else(|| Error::Validation("histogram has no null scenario (no location effects, delta 1)".into()))?;
    let mut s = String::new();
    let _ = writeln!(s, "Declared active effects under the null model ({id})");
    let _ = write!(s, "{:<8}", "Method");
    for b in 0..HISTOGRAM_BINS {
        let label = if b + 1 == HISTOGRAM_BINS { format!(">={b}") } else { b.to_string() };
        let _ = write!(s, "{label:>7}");
    }
    let _ = writeln!(s, "{:>8}{:>8}", "IER", "EER");
    for m in MethodKind::ALL {
        let Some(r) = rows.iter().find(|r| r.method == m && r.scenario == id) else {
            continue;
        };
        let _ = write!(s, "{:<8}", m.name());
        for h in r.histogram {
            let _ = write!(s, "{h:>7.3}");
        }
        let _ = writeln!(s, "{:>8.3}{:>8.3}", r.ier, r.eer);
    }
    Ok(s)
}

/// Writes `<metric>_<family>.svg` for every metric and family with data, and
/// `table2.txt` when `histogram.csv` sits next to the summary. Returns the
/// files written, sorted.
pub fn write_report(summary: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_summary_csv(summary)?;
    fs::create_dir_all(out)?;
    let mut families: Vec<&str> = rows.iter().map(SummaryRow::family).collect();
    families.sort();
    families.dedup();
    let mut written = Vec::new();
    for family in families {
        for metric in Metric::ALL {
            if let Some(svg) = metric_chart(&rows, family, metric) {
                let p = out.join(format!("{}_{family}.svg", metric.key()));
                fs::write(&p, svg)?;
                written.push(p);
            }
        }
    }
    let hist = summary.with_file_name("histogram.csv");
    if hist.exists() {
        let rows = read_histogram_csv(&hist)?;
        if null_scenario(&rows).is_some() {
            let p = out.join("table2.txt");
            fs::write(&p, format_table2(&rows)?)?;
            written.push(p);
        }
    }
    written.sort();
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrate::EPowerLevel;

    fn row(method: MethodKind, delta: f64, ier: f64) -> SummaryRow {
        SummaryRow {
            method,
            scenario: format!("dA_l0_x{delta}"),
            delta,
            epower: EPowerLevel::Medium,
            ier,
            eer: 0.3,
            ap: None,
            jp: None,
        }
    }

    #[test]
    fn chart_spaces_deltas_evenly() {
        let rows: Vec<SummaryRow> = [1.0, 4.0, 2500.0]
            .iter()
            .flat_map(|&d| [row(MethodKind::Len89, d, 0.05), row(MethodKind::Ln97, d, 0.1)])
            .collect();
        let svg = metric_chart(&rows, "dA_l0", Metric::Ier).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">2500</text>"));
        // three ticks at LEFT, LEFT + pw/2, LEFT + pw
        assert!(svg.contains(r#"x1="64.0" y1="364.0""#));
        assert!(svg.contains(r#"x1="292.0" y1="364.0""#));
        assert!(svg.contains(r#"x1="520.0" y1="364.0""#));
        assert!(metric_chart(&rows, "dA_l0", Metric::Ap).is_none());
    }

    #[test]
    fn table_lists_methods_in_order() {
        let h = |m| HistogramRow {
            method: m,
            scenario: "dA_l0_x1".into(),
            histogram: [0.5, 0.2, 0.1, 0.1, 0.05, 0.03, 0.01, 0.01],
            ier: 0.05,
            eer: 0.5,
        };
        let rows = vec![h(MethodKind::Ln97), h(MethodKind::Len89)];
        let t = format_table2(&rows).unwrap();
        let len = t.find("LEN89").unwrap();
        let ln = t.find("LN97").unwrap();
        assert!(len < ln);
        assert!(t.contains(">=7"));
        assert!(format_table2(&[]).is_err());
    }
}
