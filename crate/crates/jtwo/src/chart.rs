//! Chart output: TSV, SVG 1.1 and a markdown report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::detection::{BRecord, BVerdict, DetectionRecord, ProductVerdict, Verdict};
use crate::graded::{GradedGroup, Order, Summand};
use crate::j2::{provenance, Provenance};
use crate::label::Label;

pub const TSV_HEADER: &str = "stem\tfiltration\tlabel\torder\tcolor";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorMode {
    /// Blue for sphere and ker-lift classes, red for boundary classes.
    Provenance,
    /// Orange for classes in the Hurewicz image, black otherwise.
    Hurewicz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Glyph {
    Square,
    /// `Z/3^{n+1}` is a dot with `n` concentric circles.
    Dot { circles: u32 },
}

impl Glyph {
    pub fn of(o: Order) -> Glyph {
        match o {
            Order::Free => Glyph::Square,
            Order::Cyclic(k) => Glyph::Dot { circles: k.saturating_sub(1) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEntry {
    pub stem: i64,
    pub filtration: u32,
    pub label: String,
    pub order: Order,
    pub color: &'static str,
}

pub fn color_of(s: &Summand, mode: ColorMode, detected: &BTreeSet<Label>) -> &'static str {
    match mode {
        ColorMode::Provenance => match provenance(s) {
            Provenance::Boundary => "red",
            _ => "blue",
        },
        ColorMode::Hurewicz if detected.contains(&s.label) => "orange",
        ColorMode::Hurewicz => "black",
    }
}

/// Entries for stems `lo..=hi`, sorted by stem, filtration and label.
pub fn entries(
    g: &GradedGroup,
    lo: i64,
    hi: i64,
    mode: ColorMode,
    detected: &BTreeSet<Label>,
) -> Vec<ChartEntry> {
    let mut v: Vec<ChartEntry> = (lo..=hi.min(g.max_degree))
        .flat_map(|d| g.get(d).iter())
        .map(|s| ChartEntry {
            stem: s.degree,
            filtration: s.filtration,
            label: s.label.to_string(),
            order: s.order,
            color: color_of(s, mode, detected),
        })
        .collect();
    v.sort_by(|a, b| (a.stem, a.filtration, &a.label).cmp(&(b.stem, b.filtration, &b.label)));
    v
}

pub fn to_tsv(entries: &[ChartEntry]) -> String {
    let mut s = String::from(TSV_HEADER);
    s.push('\n');
    for e in entries {
        let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", e.stem, e.filtration, e.label, e.order, e.color);
    }
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn to_svg(entries: &[ChartEntry]) -> String {
    const CELL: i64 = 24;
    const PAD: i64 = 40;
    let max_stem = entries.iter().map(|e| e.stem).max().unwrap_or(0);
    let min_stem = entries.iter().map(|e| e.stem).min().unwrap_or(0);
    let max_f = entries.iter().map(|e| e.filtration as i64).max().unwrap_or(0);
    let w = (max_stem - min_stem + 2) * CELL + 2 * PAD;
    let h = (max_f + 2) * CELL + 2 * PAD;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for stem in min_stem..=max_stem {
        let x = PAD + (stem - min_stem + 1) * CELL;
        if stem % 4 == 0 {
            let _ = writeln!(s, r##"<line x1="{x}" y1="{PAD}" x2="{x}" y2="{}" stroke="#ddd"/>"##, h - PAD);
            let _ = writeln!(s, r#"<text x="{x}" y="{}" font-size="10" text-anchor="middle">{stem}</text>"#, h - PAD / 3);
        }
    }
    // Several classes at one spot are offset sideways.
    let mut seen: Vec<(i64, u32)> = Vec::new();
    for e in entries {
        let k = seen.iter().filter(|p| **p == (e.stem, e.filtration)).count() as i64;
        seen.push((e.stem, e.filtration));
        let x = PAD + (e.stem - min_stem + 1) * CELL + 6 * k;
        let y = h - PAD - (e.filtration as i64 + 1) * CELL;
        let _ = writeln!(s, "<g><title>{}</title>", xml_escape(&e.label));
        match Glyph::of(e.order) {
            Glyph::Square => {
                let _ = writeln!(s, r#"<rect x="{}" y="{}" width="8" height="8" fill="{}"/>"#, x - 4, y - 4, e.color);
            }
            Glyph::Dot { circles } => {
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{}"/>"#, e.color);
                for c in 1..=circles {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{x}" cy="{y}" r="{}" fill="none" stroke="{}"/>"#,
                        3 + 2 * c,
                        e.color
                    );
                }
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn to_markdown(title: &str, entries: &[ChartEntry]) -> String {
    let mut s = format!("# {title}\n\n| stem | filtration | class | order | color |\n|---:|---:|---|---|---|\n");
    for e in entries {
        let _ = writeln!(s, "| {} | {} | {} | {} | {} |", e.stem, e.filtration, e.label, e.order, e.color);
    }
    s
}

fn verdict_cells(v: &Verdict) -> (String, &'static str) {
    match v {
        Verdict::DetectedBy { label, coeff: 1 } => (label.to_string(), "detected"),
        Verdict::DetectedBy { label, coeff } => (format!("{coeff}·{label}"), "detected"),
        Verdict::NotDetected => (String::new(), "not detected"),
        Verdict::Unknown => (String::new(), "unknown"),
    }
}

/// Detection records as a markdown table, ordered by degree then label.
pub fn detection_report(records: &[DetectionRecord]) -> String {
    let mut rows: Vec<(i64, String, String, String, &str, String)> = records
        .iter()
        .map(|r| {
            let (det, verdict) = verdict_cells(&r.verdict);
            let element = if r.element.0.is_empty() { String::new() } else { r.element.to_string() };
            let det = if det.is_empty() { r.class.as_ref().map(|c| c.to_string()).unwrap_or_default() } else { det };
            let filt = r.filtration.map(|f| f.to_string()).unwrap_or_default();
            (r.degree, element, det, filt, verdict, r.source.to_string())
        })
        .collect();
    rows.sort();
    let mut s = String::from("| degree | element | class | filtration | verdict | source |\n|---:|---|---|---:|---|---|\n");
    for (d, e, c, f, v, src) in rows {
        let _ = writeln!(s, "| {d} | {e} | {c} | {f} | {v} | {src} |");
    }
    s
}

fn b_cells(v: &BVerdict) -> (&'static str, String) {
    match v {
        BVerdict::Product(p) => {
            let class = match p {
                ProductVerdict::NonzeroInJ2(l) | ProductVerdict::NonzeroInTmf(l) => l.to_string(),
                _ => String::new(),
            };
            (p.tag(), class)
        }
        BVerdict::NonzeroBySphereBracket { bracket_class, degree } => {
            ("nonzero-by-bracket", format!("{bracket_class} in degree {degree}"))
        }
        BVerdict::Fails(why) => ("FAILED", why.clone()),
    }
}

/// Theorem-B product verdicts as a markdown table.
pub fn product_report(records: &[BRecord]) -> String {
    let mut rows: Vec<(i64, String, &str, &str, String)> = records
        .iter()
        .map(|r| {
            let (v, c) = b_cells(&r.verdict);
            (r.degree, r.word.to_string(), r.display, v, c)
        })
        .collect();
    rows.sort();
    let mut s = String::from("| degree | product | family | verdict | class |\n|---:|---|---|---|---|\n");
    for (d, w, f, v, c) in rows {
        let _ = writeln!(s, "| {d} | {w} | {f} | {v} | {c} |");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glyphs() {
        assert_eq!(Glyph::of(Order::Free), Glyph::Square);
        assert_eq!(Glyph::of(Order::Cyclic(1)), Glyph::Dot { circles: 0 });
        assert_eq!(Glyph::of(Order::Cyclic(3)), Glyph::Dot { circles: 2 });
    }

    #[test]
    fn empty_reports() {
        assert_eq!(detection_report(&[]).lines().count(), 2);
        assert_eq!(product_report(&[]).lines().count(), 2);
        assert_eq!(to_tsv(&[]), format!("{TSV_HEADER}\n"));
    }
}
