//! Upper bounds on the weight of an independent set.

use crate::graph::DynGraph;
use crate::reduce::greedy_clique_cover;
use crate::weight::Weight;

/// Weighted clique cover bound: every clique contributes at most its
/// heaviest member to an independent set.
pub fn upper_bound<W: Weight>(g: &DynGraph<W>) -> W {
    greedy_clique_cover(g, &g.active_vertices())
        .iter()
        .fold(W::zero(), |acc, c| acc + g.weight(c[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c4a = DynGraph::from_edges(&[1u64, 2, 3, 2], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(upper_bound(&c4a), 5);
        let k4 = DynGraph::from_edges(&[4u64, 9, 2, 7], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(upper_bound(&k4), 9);
        let edgeless = DynGraph::with_weights(&[3u64, 4, 5]);
        assert_eq!(upper_bound(&edgeless), 12);
        assert_eq!(upper_bound(&DynGraph::<u64>::empty()), 0);
    }
}
