use jtwo::graded::Order;
use jtwo::psi::{default_rules, nu3_2pow_minus_1, psi_minus_one, tmf_psi};
use jtwo::tmf::{TmfData, TmfTable};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn nu3_big(mut n: BigUint) -> u32 {
    let three = BigUint::from(3u32);
    let mut v = 0;
    while !n.is_zero() && (&n % &three).is_zero() {
        n /= &three;
        v += 1;
    }
    v
}

fn two_pow_minus_one(d: u64) -> BigUint {
    (BigUint::one() << d) - BigUint::one()
}

#[test]
fn nu3_matches_bigint_to_forty() {
    for d in 1..=40 {
        assert_eq!(nu3_2pow_minus_1(d), nu3_big(two_pow_minus_one(d)), "d = {d}");
    }
}

proptest! {
    #[test]
    fn nu3_matches_bigint_far_out(d in 1u64..2000) {
        prop_assert_eq!(nu3_2pow_minus_1(d), nu3_big(two_pow_minus_one(d)));
    }
}

#[test]
fn cokernel_orders_follow_the_lifting_exponent() {
    let t = TmfTable::build(205, &TmfData::builtin()).unwrap();
    let p = tmf_psi(&t, &default_rules()).unwrap();
    for i in 2..=50u64 {
        let d = 4 * i as i64 - 1;
        let want = nu3_big(two_pow_minus_one(4 * i));
        let free_bdry: Vec<_> = p
            .group
            .get(d)
            .iter()
            .filter(|s| s.label.strip(jtwo::label::Deco::Boundary).and_then(|l| l.mono()).is_some_and(|m| m.is_free()))
            .collect();
        assert!(!free_bdry.is_empty(), "no cokernel class in degree {d}");
        for s in free_bdry {
            assert_eq!(s.order, Order::Cyclic(want), "{} in degree {d}", s.label);
        }
    }
}

#[test]
fn psi_minus_one_is_zero_on_torsion() {
    let t = TmfTable::build(80, &TmfData::builtin()).unwrap();
    let f = psi_minus_one(&t).unwrap();
    for d in [3, 10, 27, 40] {
        let b = f.block(d);
        for (j, s) in t.group.get(d).iter().enumerate() {
            if s.order != Order::Free {
                assert!((0..b.rows).all(|i| b.get(i, j) == 0), "{} in degree {d}", s.label);
            }
        }
    }
    // c4 in degree 8: 2^4 − 1 = 15.
    assert_eq!(f.block(8).get(0, 0) % 3, 0);
    assert_ne!(f.block(8).get(0, 0) % 9, 0);
}
