//! Exhaustive reference solver for small graphs.

use crate::graph::{DynGraph, VertexId};
use crate::weight::Weight;

use super::SolveError;

/// Largest graph the oracle accepts.
pub const ORACLE_LIMIT: usize = 30;

/// Exact maximum weight independent set by exhaustive branching.
///
/// The witness is the lexicographically smallest optimal set (ascending ids).
pub fn brute_force_mwis<W: Weight>(g: &DynGraph<W>) -> Result<(W, Vec<VertexId>), SolveError> {
    brute_force_mwis_limited(g, ORACLE_LIMIT)
}

pub fn brute_force_mwis_limited<W: Weight>(g: &DynGraph<W>, limit: usize) -> Result<(W, Vec<VertexId>), SolveError> {
    let ids = g.active_vertices();
    let n = ids.len();
    if n > limit.min(ORACLE_LIMIT) {
        return Err(SolveError::SizeLimit { n, limit: limit.min(ORACLE_LIMIT) });
    }
    let mut local = vec![usize::MAX; g.id_bound()];
    for (i, &v) in ids.iter().enumerate() {
        local[v.index()] = i;
    }
    let adj: Vec<u64> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().fold(0u64, |m, u| m | 1 << local[u.index()]))
        .collect();
    let weights: Vec<W> = ids.iter().map(|&v| g.weight(v)).collect();
    let oracle = Bits { adj: &adj, weights: &weights };

    let all = (1u64 << n) - 1;
    let best = oracle.best(all);

    // Walk ids in ascending order, taking each vertex whenever an optimum
    // remains reachable with it.
    let mut chosen = Vec::new();
    let mut remaining = all;
    let mut need = best;
    for i in 0..n {
        let bit = 1u64 << i;
        if remaining & bit == 0 {
            continue;
        }
        let after = remaining & !bit & !adj[i];
        if weights[i] <= need && oracle.best(after) == need - weights[i] {
            chosen.push(ids[i]);
            need = need - weights[i];
            remaining = after;
        } else {
            remaining &= !bit;
        }
    }
    debug_assert!(need.is_zero());
    Ok((best, chosen))
}

struct Bits<'a, W> {
    adj: &'a [u64],
    weights: &'a [W],
}

impl<W: Weight> Bits<'_, W> {
    /// Optimum inside `mask`: isolated vertices are taken, then the search
    /// branches on a vertex of maximum degree.
    fn best(&self, mask: u64) -> W {
        let mut pick = None;
        let mut pick_deg = 0;
        let mut free = W::zero();
        let mut isolated = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (self.adj[i] & mask).count_ones();
            if deg == 0 {
                free = free + self.weights[i];
                isolated |= 1 << i;
            } else if deg > pick_deg {
                pick = Some(i);
                pick_deg = deg;
            }
        }
        let Some(i) = pick else { return free };
        let mask = mask & !isolated & !(1u64 << i);
        let without = self.best(mask);
        let with = self.weights[i] + self.best(mask & !self.adj[i]);
        free + with.max(without)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p3a() {
        let g = DynGraph::from_edges(&[2u64, 3, 2], &[(0, 1), (1, 2)]);
        assert_eq!(brute_force_mwis(&g).unwrap(), (4, vec![VertexId(0), VertexId(2)]));
    }

    #[test]
    fn c5_unit() {
        let g = DynGraph::from_edges(&[1u64; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(brute_force_mwis(&g).unwrap(), (2, vec![VertexId(0), VertexId(2)]));
    }

    #[test]
    fn single_and_empty() {
        let g = DynGraph::new(&[7u64]).unwrap();
        assert_eq!(brute_force_mwis(&g).unwrap(), (7, vec![VertexId(0)]));
        let e: DynGraph<u64> = DynGraph::empty();
        assert_eq!(brute_force_mwis(&e).unwrap(), (0, vec![]));
    }

    #[test]
    fn sparse_ids() {
        let mut g = DynGraph::from_edges(&[5u64, 1, 4, 4], &[(0, 1), (1, 2), (2, 3)]);
        g.remove_vertex(VertexId(0)).unwrap();
        assert_eq!(brute_force_mwis(&g).unwrap(), (5, vec![VertexId(1), VertexId(3)]));
    }

    #[test]
    fn size_limit() {
        let g = DynGraph::with_weights(&[1u64; 31]);
        assert!(matches!(brute_force_mwis(&g), Err(SolveError::SizeLimit { n: 31, .. })));
        let g = DynGraph::with_weights(&[1u64; 30]);
        assert_eq!(brute_force_mwis(&g).unwrap().0, 30);
    }
}
