use jtwo::graded::{reduce, Order};
use jtwo::label::Mono;
use jtwo::tmf::{load_tmf, Element, TmfData, TmfTable, ZeroReason};
use jtwo::verify::ring_map_failures;
use proptest::prelude::*;
use std::sync::OnceLock;

fn table() -> &'static TmfTable {
    static T: OnceLock<TmfTable> = OnceLock::new();
    T.get_or_init(|| TmfTable::build(220, &TmfData::builtin()).unwrap())
}

fn m(s: &str) -> Mono {
    s.parse().unwrap()
}

/// ψ² on an element: 2^{d/2} on free terms, identity on torsion.
fn psi(t: &TmfTable, x: &Element) -> Element {
    let mut out = Element::default();
    for (mono, c) in &x.terms {
        out = out.add(&Element::single(*mono, reduce(c * t.psi_scalar(2, mono))));
    }
    out
}

#[test]
fn every_table_product_respects_both_ring_maps() {
    assert_eq!(ring_map_failures(table(), 200).unwrap(), Vec::<String>::new());
}

#[test]
fn delta_cubed_is_injective_on_torsion() {
    let t = table();
    for s in t.group.iter().filter(|s| s.order != Order::Free && s.degree + 72 <= t.max_degree) {
        let x = s.label.mono().unwrap();
        let p = t.multiply(x, &Mono::delta(3)).unwrap();
        assert!(!p.is_zero(), "Δ³·{x} vanished");
    }
}

#[test]
fn named_products() {
    let t = table();
    assert_eq!(t.multiply(&m("a"), &m("b")).unwrap().as_single(), Some((m("a*b"), 1)));
    assert_eq!(t.multiply(&m("a"), &m("a*D")).unwrap().as_single(), Some((m("b^3"), 1)));
    let z = t.multiply(&m("c4"), &m("a")).unwrap();
    assert!(z.is_zero());
    assert_eq!(z.zero_reason, Some(ZeroReason::Relation));
    // αβ² sits in degree 23, which has no torsion.
    assert!(t.multiply(&m("a"), &m("b^2")).unwrap().is_zero());
}

#[test]
fn q_expansion_kills_delta_multiples() {
    let t = table();
    for mono in t.basis_upto(200) {
        if mono.c > 0 || mono.is_torsion() {
            assert_eq!(t.q_expansion(&mono).coeff, 0, "{mono}");
        }
    }
}

#[test]
fn fixture_gate_runs_on_load() {
    assert!(load_tmf(100, &TmfData::builtin()).is_ok());
    let broken = TmfData::default_text().replace("079a49b3", "179a49b3");
    let err = load_tmf(100, &TmfData::parse(&broken).unwrap()).unwrap_err();
    assert!(matches!(err, jtwo::Error::FixtureMismatch { .. }));
}

#[test]
fn malformed_data_is_rejected() {
    let text = TmfData::default_text();
    assert!(TmfData::parse(&text.replace("b            10      3      2", "b 11 3 2")).is_err());
    assert!(TmfData::parse(&text.replace("*     *   *     0   0", "")).is_err());
    assert!(TmfData::parse(&format!("{text}\n[NOPE]\nx\n")).is_err());
}

fn free_element(deg: i64) -> impl Strategy<Value = Element> {
    let basis = table().free_basis(deg);
    prop::collection::vec(-20i128..20, basis.len()).prop_map(move |cs| {
        basis.iter().zip(cs).fold(Element::default(), |e, (b, c)| e.add(&Element::single(*b, c)))
    })
}

/// Two free elements with total degree ≤ 200.
fn pair() -> impl Strategy<Value = (Element, Element)> {
    (0i64..=50, 0i64..=50)
        .prop_filter("total degree", |(a, b)| a + b <= 50)
        .prop_flat_map(|(a, b)| (free_element(4 * a), free_element(4 * b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn psi_and_q_are_multiplicative((x, y) in pair()) {
        let t = table();
        let xy = t.multiply_elements(&x, &y).unwrap();
        // ψ² is a scalar on each degree; compare scalars 3-adically.
        for p in xy.terms.keys() {
            for mx in x.terms.keys() {
                for my in y.terms.keys() {
                    prop_assert_eq!(t.psi_scalar(2, p), reduce(t.psi_scalar(2, mx) * t.psi_scalar(2, my)));
                }
            }
        }
        prop_assert_eq!(psi(t, &xy).terms.len(), xy.terms.len());
        prop_assert_eq!(
            t.q_expansion_element(&xy),
            t.q_expansion_element(&x) * t.q_expansion_element(&y)
        );
    }
}
