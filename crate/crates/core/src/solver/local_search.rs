//! Iterated local search for a good independent set.
//!
//! Starts from a greedy solution, climbs with (ω,1)-swaps (insert a vertex
//! and evict its selected neighbors when that gains weight) and (1,2)-swaps
//! (replace one vertex by two non-adjacent neighbors), then perturbs by
//! forcing random vertices in. The best solution seen is returned.

use std::cmp::Ordering;
use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DynGraph, VertexId};
use crate::weight::Weight;

pub const DEFAULT_ITERATIONS: usize = 100;

/// Returns an independent set and its weight. Deterministic for a fixed seed.
pub fn local_search<W: Weight>(g: &DynGraph<W>, iterations: usize, seed: u64) -> (W, Vec<VertexId>) {
    if g.is_empty() {
        return (W::zero(), Vec::new());
    }
    let mut state = State::new(g);
    state.greedy();
    state.improve_all();
    let mut best = state.clone();

    let candidates = g.active_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..iterations {
        let outside: Vec<VertexId> = candidates.iter().copied().filter(|&v| !state.in_set[v.index()]).collect();
        if outside.is_empty() {
            break;
        }
        let k = if outside.len() > 1 && rng.gen_bool(0.5) { 2 } else { 1 };
        for &v in outside.choose_multiple(&mut rng, k) {
            if !state.in_set[v.index()] {
                state.force(v);
            }
        }
        state.improve();
        match state.weight.cmp(&best.weight) {
            Ordering::Greater => best = state.clone(),
            Ordering::Equal => {}
            Ordering::Less => state = best.clone(),
        }
    }
    (best.weight, best.solution())
}

#[derive(Clone)]
struct State<'a, W> {
    g: &'a DynGraph<W>,
    in_set: Vec<bool>,
    /// Number of selected neighbors.
    tight: Vec<u32>,
    weight: W,
    work: VecDeque<VertexId>,
    queued: Vec<bool>,
}

impl<'a, W: Weight> State<'a, W> {
    fn new(g: &'a DynGraph<W>) -> Self {
        let n = g.id_bound();
        State {
            g,
            in_set: vec![false; n],
            tight: vec![0; n],
            weight: W::zero(),
            work: VecDeque::new(),
            queued: vec![false; n],
        }
    }

    fn solution(&self) -> Vec<VertexId> {
        self.g.vertices().filter(|v| self.in_set[v.index()]).collect()
    }

    fn insert(&mut self, v: VertexId) {
        self.in_set[v.index()] = true;
        self.weight = self.weight + self.g.weight(v);
        for &u in self.g.neighbors(v) {
            self.tight[u.index()] += 1;
        }
    }

    fn remove(&mut self, v: VertexId) {
        self.in_set[v.index()] = false;
        self.weight = self.weight - self.g.weight(v);
        for &u in self.g.neighbors(v) {
            self.tight[u.index()] -= 1;
            self.push(u);
        }
    }

    fn push(&mut self, v: VertexId) {
        if !self.queued[v.index()] {
            self.queued[v.index()] = true;
            self.work.push_back(v);
        }
    }

    /// Greedy by decreasing `w(v) / (δ(v) + 1)`, ties by id.
    fn greedy(&mut self) {
        let g = self.g;
        let mut order = g.active_vertices();
        order.sort_by(|&a, &b| {
            let ka = g.weight(a).to_u128() * (g.degree(b) as u128 + 1);
            let kb = g.weight(b).to_u128() * (g.degree(a) as u128 + 1);
            kb.cmp(&ka).then(a.cmp(&b))
        });
        for v in order {
            if self.tight[v.index()] == 0 {
                self.insert(v);
            }
        }
    }

    /// Inserts `v`, evicting its selected neighbors.
    fn force(&mut self, v: VertexId) {
        let evict: Vec<VertexId> = self.g.neighbors(v).iter().copied().filter(|u| self.in_set[u.index()]).collect();
        for u in evict {
            self.remove(u);
        }
        self.insert(v);
        self.push(v);
    }

    fn improve_all(&mut self) {
        for v in self.g.vertices() {
            self.push(v);
        }
        self.improve();
    }

    fn improve(&mut self) {
        while let Some(v) = self.work.pop_front() {
            self.queued[v.index()] = false;
            if self.in_set[v.index()] {
                self.two_for_one(v);
            } else {
                self.examine_outside(v);
            }
        }
    }

    fn examine_outside(&mut self, v: VertexId) {
        let g = self.g;
        if self.tight[v.index()] == 0 {
            self.insert(v);
            self.push(v);
            return;
        }
        let selected: Vec<VertexId> = g.neighbors(v).iter().copied().filter(|u| self.in_set[u.index()]).collect();
        let blocking = selected.iter().fold(W::zero(), |acc, &u| acc + g.weight(u));
        if g.weight(v) > blocking {
            for u in selected {
                self.remove(u);
            }
            self.insert(v);
            self.push(v);
        } else if let [owner] = selected[..] {
            self.push(owner);
        }
    }

    /// (1,2)-swap at selected vertex `u`.
    fn two_for_one(&mut self, u: VertexId) {
        let g = self.g;
        let free: Vec<VertexId> = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|x| !self.in_set[x.index()] && self.tight[x.index()] == 1)
            .collect();
        let mut pick: Option<(W, VertexId, VertexId)> = None;
        for (i, &x) in free.iter().enumerate() {
            for &y in &free[i + 1..] {
                let w = g.weight(x) + g.weight(y);
                if w > g.weight(u) && !g.is_adjacent(x, y) && pick.map_or(true, |p| w > p.0) {
                    pick = Some((w, x, y));
                }
            }
        }
        if let Some((_, x, y)) = pick {
            self.remove(u);
            self.insert(x);
            self.insert(y);
            self.push(x);
            self.push(y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &DynGraph<u64>, (w, s): (u64, Vec<VertexId>)) -> u64 {
        assert!(g.is_independent(&s));
        assert_eq!(g.set_weight_sum(&s), w);
        w
    }

    #[test]
    fn examples() {
        let c4a = DynGraph::from_edges(&[1u64, 2, 3, 2], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(check(&c4a, local_search(&c4a, 100, 1)), 4);
        let k4 = DynGraph::from_edges(&[4u64, 9, 2, 7], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(check(&k4, local_search(&k4, 100, 1)), 9);
        let edgeless = DynGraph::with_weights(&[3u64, 4, 5]);
        assert_eq!(check(&edgeless, local_search(&edgeless, 100, 1)), 12);
        assert_eq!(local_search(&DynGraph::<u64>::empty(), 10, 0), (0, vec![]));
    }

    #[test]
    fn two_for_one_swap() {
        // the greedy ratio picks the middle vertex (7 / 3 > 4 / 2), the
        // (1,2)-swap replaces it by both ends
        let p3 = DynGraph::from_edges(&[4u64, 7, 4], &[(0, 1), (1, 2)]);
        assert_eq!(check(&p3, local_search(&p3, 0, 0)), 8);
    }

    #[test]
    fn deterministic() {
        let mut edges = Vec::new();
        for i in 0..30u32 {
            edges.push((i, (i + 1) % 30));
            edges.push((i, (i + 7) % 30));
        }
        let w: Vec<u64> = (0..30).map(|i| (i * 37 % 11 + 1) as u64).collect();
        let g = DynGraph::from_edges(&w, &edges);
        let a = local_search(&g, 50, 9);
        assert_eq!(a, local_search(&g, 50, 9));
        check(&g, a);
    }
}
