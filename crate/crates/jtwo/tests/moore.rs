use std::sync::OnceLock;

use jtwo::graded::Order;
use jtwo::j2::J2Model;
use jtwo::label::{Label, Mono};
use jtwo::moore::{mod_v1j, tmf_mod3, tmf_mod_power, tmf_v1, v1_injectivity_report, v1_power};
use jtwo::tmf::{TmfData, TmfTable};

fn table() -> &'static TmfTable {
    static T: OnceLock<TmfTable> = OnceLock::new();
    T.get_or_init(|| TmfTable::build(600, &TmfData::builtin()).unwrap())
}

#[test]
fn mod3_ranks_follow_universal_coefficients() {
    let t = table();
    let g = tmf_mod3(t).unwrap();
    for d in 1..200 {
        let tensor = t.group.get(d).len();
        let tor = t.group.get(d - 1).iter().filter(|s| s.order != Order::Free).count();
        assert_eq!(g.get(d).len(), tensor + tor, "degree {d}");
    }
}

#[test]
fn higher_moore_orders_are_capped() {
    let g = tmf_mod_power(table(), 2).unwrap();
    assert!(g.iter().all(|s| matches!(s.order, Order::Cyclic(k) if k <= 2)));
    let tilde_a = Label::tilde(Label::M(Mono::torsion(1, 0, 0)));
    assert_eq!(g.find(&tilde_a).map(|s| s.order), Some(Order::Cyclic(1)));
}

#[test]
fn injectivity_table_at_twenty() {
    let t = table();
    let g = tmf_mod3(t).unwrap();
    let rep = v1_injectivity_report(&g, &tmf_v1(t, &g).unwrap(), 20).unwrap();
    let text = rep.render();
    assert!(text.contains("failing residues mod 18: {8,10,14,15}"));
    assert!(text.contains("supported modulus: 18"));
    for row in rep.rows.iter().filter(|r| r.j <= 20) {
        assert_eq!(row.injective, ![8, 10, 14, 15].contains(&row.j), "D={} j={}", row.big_d, row.j);
    }
    // The mod-36 reading lists 26 as injective; the scan refutes it.
    let w = rep.witness.unwrap();
    assert_eq!((w.j % 36, w.injective), (26, false));
}

#[test]
fn v1_power_zero_is_rejected() {
    let t = table();
    let g = tmf_mod3(t).unwrap();
    assert!(v1_power(&tmf_v1(t, &g).unwrap(), 0).is_err());
}

#[test]
fn quotient_by_three_and_v1_at_144() {
    let m = J2Model::build(160, &TmfData::builtin()).unwrap();
    let q = mod_v1j(&m.mod3.group, &m.mod3.v1, 1).unwrap();
    let here = q.get(144);
    assert_eq!(here.len(), 1);
    assert_eq!(here[0].order, Order::Cyclic(1));
    assert_eq!(here[0].label.core_mono(), Some(&Mono::delta(6)));
    let t = TmfTable::build(160, &TmfData::builtin()).unwrap();
    let tg = tmf_mod3(&t).unwrap();
    assert!(mod_v1j(&tg, &tmf_v1(&t, &tg).unwrap(), 1).unwrap().get(145).is_empty());
}
