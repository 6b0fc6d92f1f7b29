#![allow(dead_code)]

mod exact;
pub use exact::exact;

use proptest::prelude::*;
use struction::{brute_force_mwis, Graph, VertexId};

/// Graph on `n` vertices from a weight vector and a pair mask in
/// lexicographic pair order.
pub fn build(weights: &[u64], mask: &[bool]) -> Graph {
    let n = weights.len() as u32;
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    Graph::from_edges(weights, &edges)
}

pub fn arb_graph(max_n: usize, max_w: u64) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(1..=max_w, n),
            prop_oneof![Just(0.2), Just(0.4), Just(0.6)]
                .prop_flat_map(move |p| proptest::collection::vec(proptest::bool::weighted(p), pairs)),
        )
            .prop_map(|(w, mask)| build(&w, &mask))
    })
}

pub fn alpha(g: &Graph) -> u64 {
    brute_force_mwis(g).expect("small graph").0
}

pub fn is_mwis(g: &Graph, set: &[VertexId], weight: u64) -> bool {
    g.is_independent(set) && g.set_weight_sum(set) == weight && weight == alpha(g)
}
