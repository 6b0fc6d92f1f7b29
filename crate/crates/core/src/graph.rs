//! Dynamic vertex-weighted undirected graph.
//!
//! Vertex identifiers are issued monotonically and never reused, so a
//! [`TransformLog`](crate::TransformLog) can keep referring to vertices long
//! after they were removed. Neighbor lists are kept sorted by id, which makes
//! every scan in the crate deterministic and lets adjacency tests use binary
//! search.

use std::fmt;

use thiserror::Error;

use crate::weight::Weight;

/// Stable vertex identifier.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(id: u32) -> Self {
        VertexId(id)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("input vertex {0} has weight below 1")]
    InvalidWeight(usize),
    #[error("vertex {0} is not active")]
    InactiveVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {0}-{1} not present")]
    MissingEdge(VertexId, VertexId),
}

#[derive(Clone, PartialEq, Eq)]
pub struct DynGraph<W> {
    adj: Vec<Vec<VertexId>>,
    weights: Vec<W>,
    active: Vec<bool>,
    n_active: usize,
    m: usize,
}

impl<W: Weight> Default for DynGraph<W> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<W: fmt::Debug> fmt::Debug for DynGraph<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (i, w) in self.weights.iter().enumerate().filter(|&(i, _)| self.active[i]) {
            map.entry(&VertexId(i as u32), &(w, &self.adj[i]));
        }
        map.finish()
    }
}

impl<W: Weight> DynGraph<W> {
    pub fn empty() -> Self {
        DynGraph { adj: Vec::new(), weights: Vec::new(), active: Vec::new(), n_active: 0, m: 0 }
    }

    /// Creates `weights.len()` isolated vertices with ids `0..n`. Input weights
    /// must be positive.
    pub fn new(weights: &[W]) -> Result<Self, GraphError> {
        if let Some(pos) = weights.iter().position(|w| w.is_zero()) {
            return Err(GraphError::InvalidWeight(pos));
        }
        Ok(Self::with_weights(weights))
    }

    /// Like [`DynGraph::new`] but admits zero weights (internal graphs).
    pub fn with_weights(weights: &[W]) -> Self {
        let n = weights.len();
        DynGraph {
            adj: vec![Vec::new(); n],
            weights: weights.to_vec(),
            active: vec![true; n],
            n_active: n,
            m: 0,
        }
    }

    /// Builds a graph from weights and an edge list; used by tests and
    /// generators. Panics on invalid edges.
    pub fn from_edges(weights: &[W], edges: &[(u32, u32)]) -> Self {
        let mut g = Self::with_weights(weights);
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v)).expect("valid edge list");
        }
        g
    }

    /// Issues a fresh vertex with an empty neighborhood.
    pub fn add_vertex(&mut self, w: W) -> VertexId {
        let id = VertexId(u32::try_from(self.adj.len()).expect("vertex id space exhausted"));
        self.adj.push(Vec::new());
        self.weights.push(w);
        self.active.push(true);
        self.n_active += 1;
        id
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check(v)?;
        let nbrs = std::mem::take(&mut self.adj[v.index()]);
        for &u in &nbrs {
            let list = &mut self.adj[u.index()];
            if let Ok(pos) = list.binary_search(&v) {
                list.remove(pos);
            }
        }
        self.m -= nbrs.len();
        self.active[v.index()] = false;
        self.n_active -= 1;
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos_u = match self.adj[u.index()].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(p) => p,
        };
        self.adj[u.index()].insert(pos_u, v);
        let pos_v = self.adj[v.index()].binary_search(&u).unwrap_err();
        self.adj[v.index()].insert(pos_v, u);
        self.m += 1;
        Ok(())
    }

    /// Adds the edge unless it is already present. Returns whether it was new.
    pub(crate) fn ensure_edge(&mut self, u: VertexId, v: VertexId) -> bool {
        debug_assert!(u != v);
        match self.adj[u.index()].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u.index()].insert(pos, v);
                let pos_v = self.adj[v.index()].binary_search(&u).unwrap_err();
                self.adj[v.index()].insert(pos_v, u);
                self.m += 1;
                true
            }
        }
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos_u =
            self.adj[u.index()].binary_search(&v).map_err(|_| GraphError::MissingEdge(u, v))?;
        self.adj[u.index()].remove(pos_u);
        let pos_v = self.adj[v.index()].binary_search(&u).expect("symmetric adjacency");
        self.adj[v.index()].remove(pos_v);
        self.m -= 1;
        Ok(())
    }

    #[inline]
    pub fn is_active(&self, v: VertexId) -> bool {
        self.active.get(v.index()).copied().unwrap_or(false)
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.is_active(v) {
            Ok(())
        } else {
            Err(GraphError::InactiveVertex(v))
        }
    }

    pub fn try_is_adjacent(&self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.is_adjacent(u, v))
    }

    pub fn try_neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.check(v)?;
        Ok(&self.adj[v.index()])
    }

    pub fn try_weight(&self, v: VertexId) -> Result<W, GraphError> {
        self.check(v)?;
        Ok(self.weights[v.index()])
    }

    pub fn set_weight(&mut self, v: VertexId, w: W) -> Result<(), GraphError> {
        self.check(v)?;
        self.weights[v.index()] = w;
        Ok(())
    }

    // Unchecked accessors below assume `v` is active; algorithms call them on
    // vertices they just obtained from the graph itself.

    #[inline]
    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.adj[u.index()].len() <= self.adj[v.index()].len() { (u, v) } else { (v, u) };
        self.adj[a.index()].binary_search(&b).is_ok()
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        debug_assert!(self.is_active(v), "{v:?} inactive");
        &self.adj[v.index()]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].len()
    }

    #[inline]
    pub fn weight(&self, v: VertexId) -> W {
        debug_assert!(self.is_active(v), "{v:?} inactive");
        self.weights[v.index()]
    }

    #[inline]
    pub(crate) fn weight_mut(&mut self, v: VertexId) -> &mut W {
        &mut self.weights[v.index()]
    }

    /// Active vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| VertexId(i as u32))
    }

    pub fn active_vertices(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    /// `(n, m)` over active vertices.
    pub fn counts(&self) -> (usize, usize) {
        (self.n_active, self.m)
    }

    pub fn num_vertices(&self) -> usize {
        self.n_active
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.n_active == 0
    }

    /// One past the largest id ever issued.
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn total_weight(&self) -> W {
        crate::weight::total(self.vertices().map(|v| self.weight(v)))
    }

    pub fn set_weight_sum(&self, set: &[VertexId]) -> W {
        crate::weight::total(set.iter().map(|&v| self.weight(v)))
    }

    /// Whether the given active vertices are pairwise non-adjacent. Duplicate
    /// entries count as a violation.
    pub fn is_independent(&self, set: &[VertexId]) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(set.len());
        for &v in set {
            if !self.is_active(v) || !seen.insert(v) {
                return false;
            }
        }
        set.iter().all(|&v| self.adj[v.index()].iter().all(|u| !seen.contains(u)))
    }

    /// Full consistency scan: symmetry, sortedness, no loops or duplicates,
    /// edge count. Returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let mut deg_sum = 0usize;
        for v in self.vertices() {
            let list = &self.adj[v.index()];
            deg_sum += list.len();
            for pair in list.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(format!("neighbors of {v:?} not strictly ascending"));
                }
            }
            for &u in list {
                if u == v {
                    return Err(format!("self-loop at {v:?}"));
                }
                if !self.is_active(u) {
                    return Err(format!("{v:?} adjacent to inactive {u:?}"));
                }
                if self.adj[u.index()].binary_search(&v).is_err() {
                    return Err(format!("asymmetric edge {v:?}-{u:?}"));
                }
            }
        }
        for (i, a) in self.active.iter().enumerate() {
            if !a && !self.adj[i].is_empty() {
                return Err(format!("inactive v{i} keeps neighbors"));
            }
        }
        if deg_sum != 2 * self.m {
            return Err(format!("degree sum {deg_sum} != 2 * {}", self.m));
        }
        if self.vertices().count() != self.n_active {
            return Err("active count mismatch".into());
        }
        Ok(())
    }

    /// Copies the induced subgraph on `vertices` into a fresh graph with ids
    /// `0..k` in the given order. Returns the graph and the id map
    /// (new index -> old id).
    pub fn induced_compact(&self, vertices: &[VertexId]) -> (DynGraph<W>, Vec<VertexId>) {
        let mut local = vec![u32::MAX; self.adj.len()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v.index()] = i as u32;
        }
        let weights: Vec<W> = vertices.iter().map(|&v| self.weight(v)).collect();
        let mut g = DynGraph::with_weights(&weights);
        for (i, &v) in vertices.iter().enumerate() {
            let mut list: Vec<VertexId> = self.adj[v.index()]
                .iter()
                .filter_map(|u| match local[u.index()] {
                    u32::MAX => None,
                    l => Some(VertexId(l)),
                })
                .collect();
            list.sort_unstable();
            g.m += list.iter().filter(|u| u.index() > i).count();
            g.adj[i] = list;
        }
        (g, vertices.to_vec())
    }
}
