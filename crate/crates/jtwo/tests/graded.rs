use std::sync::Arc;

use jtwo::graded::{
    cokernel_gens, kernel_gens, pow3, smith_normal_form, solve_fiber_les, GradedGroup, GradedMorphism, GroupOrder,
    Matrix, Order, Summand,
};
use jtwo::label::Label;
use proptest::prelude::*;

mod common;
use common::{apply, brute, morphism};

fn order_of(gens: &[jtwo::graded::Generator]) -> i128 {
    gens.iter().map(|g| g.order.modulus()).product()
}

fn orders(e: &[u32]) -> Vec<Order> {
    e.iter().map(|k| Order::Cyclic(*k)).collect()
}

fn group(a0: &[u32], a1: &[u32]) -> Arc<GradedGroup> {
    let mut g = GradedGroup::new(2);
    for (d, exps) in [(0, a0), (1, a1)] {
        for (i, k) in exps.iter().enumerate() {
            g.push(Summand::new(Label::Sphere(format!("g{d}_{i}")), Order::Cyclic(*k), d, 0)).unwrap();
        }
    }
    Arc::new(g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kernel_and_cokernel_orders_match_brute_force((a, b, rows) in morphism()) {
        let m = Matrix::from_rows(&rows).unwrap();
        let (ker, coker) = brute(&a, &b, &rows);
        let k = kernel_gens(&m, &orders(&a), &orders(&b)).unwrap();
        let c = cokernel_gens(&m, &orders(&a), &orders(&b)).unwrap();
        prop_assert_eq!(order_of(&k), ker);
        prop_assert_eq!(order_of(&c), coker);
        // |A| = |ker|·|im| and |B| = |im|·|coker|.
        let size_a: i128 = a.iter().map(|e| pow3(*e)).product();
        let size_b: i128 = b.iter().map(|e| pow3(*e)).product();
        prop_assert_eq!(size_a / ker, size_b / coker);
        for g in &k {
            let v: Vec<i128> = g.vector.iter().zip(&a).map(|(x, e)| x.rem_euclid(pow3(*e))).collect();
            prop_assert!(apply(&rows, &b, &v).iter().all(|c| *c == 0));
        }
    }

    #[test]
    fn fibre_order_is_coker_times_ker((a1, b1, r1) in morphism(), (a0, b0, r0) in morphism()) {
        let (src, tgt) = (group(&a0, &a1), group(&b0, &b1));
        let mut f = GradedMorphism::new(src, tgt, 0);
        f.set_block(0, Matrix::from_rows(&r0).unwrap()).unwrap();
        f.set_block(1, Matrix::from_rows(&r1).unwrap()).unwrap();
        let fib = solve_fiber_les(&f).unwrap();
        let (ker0, _) = brute(&a0, &b0, &r0);
        let (_, coker1) = brute(&a1, &b1, &r1);
        let got = GroupOrder::of(fib.group.get(0));
        prop_assert_eq!(got.torsion_log3 as i128, (ker0 * coker1).ilog(3) as i128);
        prop_assert_eq!(got.free_rank, 0);
    }

    #[test]
    fn snf_is_diagonal_with_divisibility(rows in prop::collection::vec(prop::collection::vec(-30i128..30, 3), 3)) {
        let m = Matrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        let vals: Vec<u32> = snf.valuations.iter().flatten().copied().collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(snf.rank(), vals.len());
        prop_assert_eq!(m.det_mod3() != 0, vals.len() == 3 && vals.iter().all(|v| *v == 0));
    }
}

#[test]
fn free_to_free_scalar() {
    let m = Matrix::from_rows(&[vec![15]]).unwrap();
    let c = cokernel_gens(&m, &[Order::Free], &[Order::Free]).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].order, Order::Cyclic(1));
    assert!(kernel_gens(&m, &[Order::Free], &[Order::Free]).unwrap().is_empty());
}

#[test]
fn zero_map_keeps_everything() {
    let m = Matrix::zeros(1, 2);
    let src = [Order::Cyclic(2), Order::Free];
    let k = kernel_gens(&m, &src, &[Order::Cyclic(1)]).unwrap();
    assert_eq!(k.iter().map(|g| g.order).collect::<Vec<_>>().len(), 2);
    assert_eq!(cokernel_gens(&m, &src, &[Order::Cyclic(1)]).unwrap()[0].order, Order::Cyclic(1));
}
