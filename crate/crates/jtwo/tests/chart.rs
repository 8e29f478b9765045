use std::collections::BTreeSet;

use jtwo::chart::*;
use jtwo::graded::Order;
use jtwo::j2::J2Model;
use jtwo::tmf::TmfData;

fn model() -> J2Model {
    J2Model::build(160, &TmfData::builtin()).unwrap()
}

#[test]
fn tsv_and_svg_agree() {
    let m = model();
    let e = entries(&m.group, 0, 160, ColorMode::Provenance, &BTreeSet::new());
    let tsv = to_tsv(&e);
    let svg = to_svg(&e);
    assert_eq!(tsv.lines().count(), e.len() + 1);
    assert_eq!(svg.matches("<g>").count(), e.len());
    assert!(svg.contains("version=\"1.1\""));
    assert_eq!(to_tsv(&e), tsv);
}

#[test]
fn glyph_and_colour_examples() {
    let m = model();
    let e = entries(&m.group, 0, 160, ColorMode::Provenance, &BTreeSet::new());
    assert_eq!(Glyph::of(e[0].order), Glyph::Square);
    let z27 = e.iter().find(|x| x.stem == 143 && x.order == Order::Cyclic(3)).unwrap();
    assert_eq!(Glyph::of(z27.order), Glyph::Dot { circles: 2 });
    assert_eq!(z27.color, "red");
    assert!(e.iter().filter(|x| x.stem <= 22).all(|x| x.color == "blue"));
}

#[test]
fn empty_window_is_header_only() {
    let m = model();
    let e = entries(&m.group, 1, 2, ColorMode::Provenance, &BTreeSet::new());
    assert_eq!(to_tsv(&e), format!("{TSV_HEADER}\n"));
}

#[test]
fn report_row_for_beta_two() {
    let m = model();
    let recs = jtwo::detection::hurewicz_image(&m, 40).unwrap();
    let md = detection_report(&recs);
    assert!(md.lines().any(|l| l.starts_with("| 26 | β2 | ∂(αΔ) |") && l.contains("detected")));
}
