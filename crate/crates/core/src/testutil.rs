//! Shared proptest strategies and helpers for in-crate tests.

use num_bigint::BigInt;
use proptest::prelude::*;

use crate::poset::Poset;

/// Random posets on 1..=max_n points. Arcs only run from smaller to larger
/// labels, which is acyclic by construction and still reaches every
/// isomorphism class (every finite poset has a linear extension).
pub(crate) fn arb_poset(max_n: usize) -> impl Strategy<Value = Poset> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(proptest::bool::weighted(0.35), pairs).prop_map(
            move |bits| {
                let mut covers = Vec::new();
                let mut t = 0;
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        if bits[t] {
                            covers.push((i, j));
                        }
                        t += 1;
                    }
                }
                Poset::from_covers(n, &covers).expect("label-ordered arcs are acyclic")
            },
        )
    })
}

pub(crate) fn arb_connected_poset(max_n: usize) -> impl Strategy<Value = Poset> {
    arb_poset(max_n).prop_filter("connected", |p| p.is_connected())
}

pub(crate) fn bigvec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}
