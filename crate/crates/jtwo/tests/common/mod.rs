//! Brute-force oracle for homomorphisms of small finite 3-groups.

#![allow(dead_code)]

use std::collections::BTreeSet;

use jtwo::graded::pow3;
use proptest::prelude::*;

/// Exponents of a finite 3-group with at most 3^8 elements.
pub fn group_shape() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..=4, 1..=4).prop_filter("capped size", |v| v.iter().sum::<u32>() <= 8)
}

/// A well-defined homomorphism: column j may only hit 3^{max(0, b−a)} multiples.
pub fn morphism() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<Vec<i128>>)> {
    (group_shape(), group_shape()).prop_flat_map(|(a, b)| {
        let n = a.len() * b.len();
        (Just(a), Just(b), prop::collection::vec(0i128..81, n)).prop_map(|(a, b, raw)| {
            let rows = (0..b.len())
                .map(|i| {
                    (0..a.len())
                        .map(|j| {
                            let lift = pow3(b[i].saturating_sub(a[j]));
                            (raw[i * a.len() + j] * lift).rem_euclid(pow3(b[i]))
                        })
                        .collect()
                })
                .collect();
            (a, b, rows)
        })
    })
}

pub fn elements(exps: &[u32]) -> Vec<Vec<i128>> {
    let mut out = vec![vec![]];
    for &e in exps {
        out = out.into_iter().flat_map(|v| (0..pow3(e)).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

pub fn apply(rows: &[Vec<i128>], b: &[u32], x: &[i128]) -> Vec<i128> {
    rows.iter().zip(b).map(|(r, e)| r.iter().zip(x).map(|(m, v)| m * v).sum::<i128>().rem_euclid(pow3(*e))).collect()
}

/// (|ker|, |coker|) by enumerating every element.
pub fn brute(a: &[u32], b: &[u32], rows: &[Vec<i128>]) -> (i128, i128) {
    let mut ker = 0;
    let mut image = BTreeSet::new();
    for x in elements(a) {
        let y = apply(rows, b, &x);
        if y.iter().all(|c| *c == 0) {
            ker += 1;
        }
        image.insert(y);
    }
    let size_b: i128 = b.iter().map(|e| pow3(*e)).product();
    (ker, size_b / image.len() as i128)
}

