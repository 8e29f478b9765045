use std::sync::OnceLock;

use jtwo::fixtures::{check_j2, j2_text, J2_FIXTURE};
use jtwo::graded::Order;
use jtwo::j2::{verify_periodicity_lift, ExtVerdict, J2Model, J2Product};
use jtwo::label::{Label, Mono};
use jtwo::tmf::TmfData;

fn model() -> &'static J2Model {
    static M: OnceLock<J2Model> = OnceLock::new();
    M.get_or_init(|| J2Model::build(600, &TmfData::builtin()).unwrap())
}

#[test]
fn low_chart_matches_fixture() {
    check_j2(model()).unwrap();
    assert_eq!(j2_text(model()), J2_FIXTURE);
}

#[test]
fn named_low_groups() {
    let g = &model().group;
    assert_eq!(g.get(0)[0].order, Order::Free);
    assert_eq!(g.get(3).len(), 1);
    assert!(g.get(1).is_empty() && g.get(2).is_empty());
    let a32 = g.find(&Label::Sphere("a3/2".into())).unwrap();
    assert_eq!((a32.degree, a32.order), (11, Order::Cyclic(2)));
}

#[test]
fn every_extension_splits() {
    let m = model();
    assert!(!m.audits.is_empty());
    for a in &m.audits {
        assert_eq!(a.verdict, ExtVerdict::Split, "degree {}", a.degree);
        assert_eq!(a.fibre_dim, a.split_dim);
    }
    assert_eq!(m.audits[0].degree, 27);
    assert_eq!(m.audits[0].fibre_dim, 3);
}

#[test]
fn mod3_counts_agree_above_the_splice() {
    assert!(model().mod3_mismatches(23).unwrap().is_empty());
}

#[test]
fn lift_chain_passes() {
    for s in verify_periodicity_lift(model()).unwrap() {
        assert!(s.passed, "{}: {}", s.name, s.detail);
    }
    let g = &model().group;
    assert!(g.get(144).is_empty());
    assert!(g.get(143).iter().all(|s| matches!(s.order, Order::Cyclic(k) if k <= 3)));
    assert!(g.get(143).iter().any(|s| s.order == Order::Cyclic(3)));
}

#[test]
fn lift_needs_enough_degrees() {
    let small = J2Model::build(100, &TmfData::builtin()).unwrap();
    assert!(verify_periodicity_lift(&small).is_err());
}

#[test]
fn products_in_j2() {
    let m = model();
    let a1 = Label::Sphere("a1".into());
    let b1 = Label::Sphere("b1".into());
    assert_eq!(m.multiply_j2(&a1, &b1).unwrap(), J2Product::Class(vec![(Label::Sphere("a1b1".into()), 1)]));
    // αβ² = 0 in tmf.
    assert_eq!(m.multiply_j2(&a1, &Label::Sphere("b1^2".into())).unwrap(), J2Product::Zero);
    let bd = Label::boundary(Label::M(Mono::torsion(1, 0, 1)));
    let p = m.multiply_j2(&a1, &bd).unwrap();
    assert_eq!(p, J2Product::Class(vec![(Label::boundary(Label::M(Mono::torsion(0, 3, 0))), 1)]));
}

#[test]
fn out_of_range_product_errors() {
    let m = J2Model::build(60, &TmfData::builtin()).unwrap();
    let x = Label::M(Mono::torsion(0, 4, 0));
    assert!(m.multiply_j2(&x, &x).is_err());
}
