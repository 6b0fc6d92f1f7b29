//! Weighted struction variants.
//!
//! A struction at a center vertex `v` rewrites the graph so that
//! `α_w(G) = α_w(G') + w(v)`. All four variants are transactional: the number
//! of vertices to create is computed first and the graph is only touched when
//! it does not exceed the caller's cap.
//!
//! Neighbor order is ascending [`VertexId`]; the layer of a pair vertex
//! `v_{x,y}` is `x`, the layer of `v_c` and `v_{c,y}` is the set `c`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{DynGraph, VertexId};
use crate::log::{Provenance, TransformEvent, TransformLog};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StructionVariant {
    Original,
    Modified,
    #[default]
    Extended,
    ExtendedReduced,
}

impl StructionVariant {
    pub const ALL: [StructionVariant; 4] = [
        StructionVariant::Original,
        StructionVariant::Modified,
        StructionVariant::Extended,
        StructionVariant::ExtendedReduced,
    ];

    /// Original and modified structions only remove the center.
    pub fn removes_neighborhood(self) -> bool {
        matches!(self, StructionVariant::Extended | StructionVariant::ExtendedReduced)
    }

    pub fn name(self) -> &'static str {
        match self {
            StructionVariant::Original => "original",
            StructionVariant::Modified => "modified",
            StructionVariant::Extended => "extended",
            StructionVariant::ExtendedReduced => "extended-reduced",
        }
    }
}

impl fmt::Display for StructionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructionVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StructionVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown struction variant `{s}`"))
    }
}

/// Independent set inside a center's neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSet<W> {
    pub members: Vec<VertexId>,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreatedVertex<W> {
    pub id: VertexId,
    pub weight: W,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructionOutcome<W> {
    pub center: VertexId,
    pub created: Vec<CreatedVertex<W>>,
    pub removed: Vec<VertexId>,
    pub offset_delta: W,
    /// Surviving or created vertices whose weight or neighborhood changed.
    pub touched: Vec<VertexId>,
}

impl<W> StructionOutcome<W> {
    /// Net change of the vertex count.
    pub fn size_delta(&self) -> isize {
        self.created.len() as isize - self.removed.len() as isize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructionResult<W> {
    Applied(StructionOutcome<W>),
    /// The construction would create more vertices than the cap allowed; the
    /// graph is unchanged.
    Aborted,
}

impl<W> StructionResult<W> {
    pub fn applied(self) -> Option<StructionOutcome<W>> {
        match self {
            StructionResult::Applied(o) => Some(o),
            StructionResult::Aborted => None,
        }
    }

    pub fn is_applied(&self) -> bool {
        matches!(self, StructionResult::Applied(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructionError {
    #[error("center {0} does not have minimum weight in its closed neighborhood")]
    NotMinimal(VertexId),
    #[error("center {0} is not active")]
    InactiveVertex(VertexId),
}

pub fn apply_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    variant: StructionVariant,
    cap: usize,
    log: &mut TransformLog<W>,
) -> Result<StructionResult<W>, StructionError> {
    match variant {
        StructionVariant::Original => original_struction(g, v, cap, log),
        StructionVariant::Modified => modified_struction(g, v, cap, log),
        StructionVariant::Extended => extended_struction(g, v, cap, log),
        StructionVariant::ExtendedReduced => extended_reduced_struction(g, v, cap, log),
    }
}

/// Enumerates the independent sets `c ⊆ s` with `w(c) > threshold`
/// (with `minimal_only`, only those whose proper subsets all weigh at most
/// `threshold`). Returns `None` as soon as more than `cap` sets are found,
/// or once the search has visited more than `(cap + 1) * (|s| + 1) * 32`
/// partial sets. Output is ordered by size, then lexicographically by id.
pub fn enumerate_exceeding_sets<W: Weight>(
    g: &DynGraph<W>,
    s: &[VertexId],
    threshold: W,
    cap: usize,
    minimal_only: bool,
) -> Option<Vec<NeighborhoodSet<W>>> {
    let mut cand = s.to_vec();
    cand.sort_unstable();
    cand.dedup();
    let budget = cap.saturating_add(1).saturating_mul(cand.len() + 1).saturating_mul(32);
    let mut search = SetSearch { g, threshold, cap, minimal_only, budget, current: Vec::new(), out: Vec::new() };
    if !search.dfs(&cand, W::zero()) {
        return None;
    }
    let mut out = search.out;
    out.sort_by(|a, b| a.members.len().cmp(&b.members.len()).then_with(|| a.members.cmp(&b.members)));
    Some(out)
}

struct SetSearch<'a, W> {
    g: &'a DynGraph<W>,
    threshold: W,
    cap: usize,
    minimal_only: bool,
    /// Partial sets the search may still visit.
    budget: usize,
    current: Vec<VertexId>,
    out: Vec<NeighborhoodSet<W>>,
}

impl<W: Weight> SetSearch<'_, W> {
    // Candidates are ascending and non-adjacent to every member of `current`.
    fn dfs(&mut self, cand: &[VertexId], cur_w: W) -> bool {
        let mut suffix = vec![W::zero(); cand.len() + 1];
        for i in (0..cand.len()).rev() {
            suffix[i] = suffix[i + 1] + self.g.weight(cand[i]);
        }
        if cur_w + suffix[0] > self.threshold && cand.len() > 2 && cur_w + self.cover_bound(cand) <= self.threshold {
            return true;
        }
        for (i, &u) in cand.iter().enumerate() {
            if cur_w + suffix[i] <= self.threshold {
                break;
            }
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            let w = cur_w + self.g.weight(u);
            self.current.push(u);
            if w > self.threshold {
                let emit = !self.minimal_only || {
                    let lightest = self.current.iter().map(|&x| self.g.weight(x)).min().unwrap();
                    w - lightest <= self.threshold
                };
                if emit {
                    self.out.push(NeighborhoodSet { members: self.current.clone(), weight: w });
                    if self.out.len() > self.cap {
                        return false;
                    }
                }
                if self.minimal_only {
                    self.current.pop();
                    continue;
                }
            }
            let next: Vec<VertexId> =
                cand[i + 1..].iter().copied().filter(|&x| !self.g.is_adjacent(u, x)).collect();
            if !next.is_empty() && !self.dfs(&next, w) {
                return false;
            }
            self.current.pop();
        }
        true
    }

    /// Clique cover bound on the heaviest independent subset of `cand`.
    fn cover_bound(&self, cand: &[VertexId]) -> W {
        let mut cliques: Vec<(Vec<VertexId>, W)> = Vec::new();
        for &u in cand {
            let w = self.g.weight(u);
            match cliques.iter_mut().find(|(c, _)| c.iter().all(|&m| self.g.is_adjacent(u, m))) {
                Some((c, max)) => {
                    c.push(u);
                    *max = (*max).max(w);
                }
                None => cliques.push((vec![u], w)),
            }
        }
        cliques.iter().fold(W::zero(), |acc, c| acc + c.1)
    }
}

fn check_active<W: Weight>(g: &DynGraph<W>, v: VertexId) -> Result<(), StructionError> {
    if g.is_active(v) {
        Ok(())
    } else {
        Err(StructionError::InactiveVertex(v))
    }
}

fn check_minimal<W: Weight>(g: &DynGraph<W>, v: VertexId) -> Result<(), StructionError> {
    let wv = g.weight(v);
    if g.neighbors(v).iter().any(|&u| g.weight(u) < wv) {
        return Err(StructionError::NotMinimal(v));
    }
    Ok(())
}

/// Original weighted struction; the center must be a minimum-weight vertex
/// of its closed neighborhood.
pub fn original_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    cap: usize,
    log: &mut TransformLog<W>,
) -> Result<StructionResult<W>, StructionError> {
    pair_struction(g, v, cap, log, StructionVariant::Original)
}

/// Modified weighted struction: pair vertices carry `w(y)`, neighbors are
/// joined to every pair vertex outside their own layer and `N(v)` becomes a
/// clique.
pub fn modified_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    cap: usize,
    log: &mut TransformLog<W>,
) -> Result<StructionResult<W>, StructionError> {
    pair_struction(g, v, cap, log, StructionVariant::Modified)
}

fn pair_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    cap: usize,
    log: &mut TransformLog<W>,
    variant: StructionVariant,
) -> Result<StructionResult<W>, StructionError> {
    check_active(g, v)?;
    check_minimal(g, v)?;
    let wv = g.weight(v);
    let nbrs: Vec<VertexId> = g.neighbors(v).to_vec();

    let mut pairs = Vec::new();
    for (i, &x) in nbrs.iter().enumerate() {
        for &y in &nbrs[i + 1..] {
            if !g.is_adjacent(x, y) {
                pairs.push((x, y));
                if pairs.len() > cap {
                    return Ok(StructionResult::Aborted);
                }
            }
        }
    }

    let neighborhood: Vec<(VertexId, W)> = nbrs.iter().map(|&u| (u, g.weight(u))).collect();
    // Pair-to-pair edges depend on adjacency in G, computed before any change.
    let mut pair_edges = Vec::new();
    for (i, &(x, y)) in pairs.iter().enumerate() {
        for (j, &(x2, y2)) in pairs.iter().enumerate().skip(i + 1) {
            if x != x2 || g.is_adjacent(y, y2) {
                pair_edges.push((i, j));
            }
        }
    }

    g.remove_vertex(v).expect("center active");
    for &u in &nbrs {
        *g.weight_mut(u) = g.weight(u) - wv;
    }
    // Snapshot of N(x) \ {v} before pair vertices join the graph.
    let base: Vec<Vec<VertexId>> = nbrs.iter().map(|&u| g.neighbors(u).to_vec()).collect();
    let pos = |u: VertexId| nbrs.binary_search(&u).expect("pair member is a neighbor");

    let mut touched: Vec<VertexId> = nbrs.clone();
    let mut created = Vec::with_capacity(pairs.len());
    for &(x, y) in &pairs {
        let w = match variant {
            StructionVariant::Modified => neighborhood[pos(y)].1,
            _ => wv,
        };
        let id = g.add_vertex(w);
        for &t in base[pos(x)].iter().chain(&base[pos(y)]) {
            if g.ensure_edge(id, t) {
                touched.push(t);
            }
        }
        if variant == StructionVariant::Modified {
            for &k in &nbrs {
                if k != x {
                    g.ensure_edge(id, k);
                }
            }
        }
        created.push(CreatedVertex { id, weight: w, provenance: Provenance::Pair { x, y } });
    }
    for &(i, j) in &pair_edges {
        g.ensure_edge(created[i].id, created[j].id);
    }
    if variant == StructionVariant::Modified {
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                g.ensure_edge(x, y);
            }
        }
    }
    touched.extend(created.iter().map(|c| c.id));

    log.record(TransformEvent::Struction {
        variant,
        center: v,
        center_weight: wv,
        neighborhood,
        created: created.iter().map(|c| (c.id, c.provenance.clone())).collect(),
    });

    let mut removed = vec![v];
    for &u in &nbrs {
        if g.weight(u).is_zero() {
            touched.extend_from_slice(g.neighbors(u));
            g.remove_vertex(u).expect("neighbor active");
            log.record(TransformEvent::ExcludedVertex { v: u });
            removed.push(u);
        }
    }
    touched.sort_unstable();
    touched.dedup();
    touched.retain(|&t| g.is_active(t));

    Ok(StructionResult::Applied(StructionOutcome { center: v, created, removed, offset_delta: wv, touched }))
}

/// Vertices outside `N[v]` adjacent to some member of `c`, ascending.
fn outer_neighbors<W: Weight>(g: &DynGraph<W>, v: VertexId, nbrs: &[VertexId], c: &[VertexId]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = c
        .iter()
        .flat_map(|&u| g.neighbors(u).iter().copied())
        .filter(|&t| t != v && nbrs.binary_search(&t).is_err())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Removes `N[v]` and returns the surviving vertices that lost an edge.
fn remove_closed_neighborhood<W: Weight>(g: &mut DynGraph<W>, v: VertexId, nbrs: &[VertexId]) -> Vec<VertexId> {
    let mut boundary = outer_neighbors(g, v, nbrs, nbrs);
    g.remove_vertex(v).expect("center active");
    for &u in nbrs {
        g.remove_vertex(u).expect("neighbor active");
    }
    boundary.retain(|&t| g.is_active(t));
    boundary
}

/// Extended weighted struction: one clique vertex `v_c` of weight
/// `w(c) - w(v)` per independent set `c ⊆ N(v)` heavier than `v`.
pub fn extended_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    cap: usize,
    log: &mut TransformLog<W>,
) -> Result<StructionResult<W>, StructionError> {
    check_active(g, v)?;
    let wv = g.weight(v);
    let nbrs: Vec<VertexId> = g.neighbors(v).to_vec();
    let Some(sets) = enumerate_exceeding_sets(g, &nbrs, wv, cap, false) else {
        return Ok(StructionResult::Aborted);
    };
    let neighborhood: Vec<(VertexId, W)> = nbrs.iter().map(|&u| (u, g.weight(u))).collect();
    let outer: Vec<Vec<VertexId>> = sets.iter().map(|c| outer_neighbors(g, v, &nbrs, &c.members)).collect();

    let mut touched = remove_closed_neighborhood(g, v, &nbrs);
    let mut created = Vec::with_capacity(sets.len());
    for (c, out) in sets.into_iter().zip(&outer) {
        let w = c.weight - wv;
        let id = g.add_vertex(w);
        for &t in out {
            g.ensure_edge(id, t);
        }
        for prev in &created {
            let prev: &CreatedVertex<W> = prev;
            g.ensure_edge(id, prev.id);
        }
        created.push(CreatedVertex { id, weight: w, provenance: Provenance::Set { c: c.members } });
    }
    touched.extend(created.iter().map(|c| c.id));

    let mut removed = nbrs.clone();
    removed.insert(0, v);
    log.record(TransformEvent::Struction {
        variant: StructionVariant::Extended,
        center: v,
        center_weight: wv,
        neighborhood,
        created: created.iter().map(|c| (c.id, c.provenance.clone())).collect(),
    });
    Ok(StructionResult::Applied(StructionOutcome { center: v, created, removed, offset_delta: wv, touched }))
}

/// Extended-reduced weighted struction: clique vertices only for minimal
/// exceeding sets, plus layered extension vertices `v_{c,y}` of weight
/// `w(y)` for every `y` that extends `c`.
pub fn extended_reduced_struction<W: Weight>(
    g: &mut DynGraph<W>,
    v: VertexId,
    cap: usize,
    log: &mut TransformLog<W>,
) -> Result<StructionResult<W>, StructionError> {
    check_active(g, v)?;
    let wv = g.weight(v);
    let nbrs: Vec<VertexId> = g.neighbors(v).to_vec();
    let Some(sets) = enumerate_exceeding_sets(g, &nbrs, wv, cap, true) else {
        return Ok(StructionResult::Aborted);
    };

    // (layer index, y) for every extension vertex.
    let mut extensions: Vec<(usize, VertexId)> = Vec::new();
    for (li, c) in sets.iter().enumerate() {
        for &y in &nbrs {
            if c.members.binary_search(&y).is_err() && c.members.iter().all(|&m| !g.is_adjacent(m, y)) {
                extensions.push((li, y));
                if sets.len() + extensions.len() > cap {
                    return Ok(StructionResult::Aborted);
                }
            }
        }
    }

    let neighborhood: Vec<(VertexId, W)> = nbrs.iter().map(|&u| (u, g.weight(u))).collect();
    let set_outer: Vec<Vec<VertexId>> = sets.iter().map(|c| outer_neighbors(g, v, &nbrs, &c.members)).collect();
    let ext_outer: Vec<Vec<VertexId>> = extensions
        .iter()
        .map(|&(li, y)| {
            let mut m = sets[li].members.clone();
            m.push(y);
            outer_neighbors(g, v, &nbrs, &m)
        })
        .collect();
    let mut ext_edges = Vec::new();
    for (i, &(li, y)) in extensions.iter().enumerate() {
        for (j, &(lj, y2)) in extensions.iter().enumerate().skip(i + 1) {
            if li != lj || g.is_adjacent(y, y2) {
                ext_edges.push((i, j));
            }
        }
    }
    let y_weight = |y: VertexId| neighborhood[nbrs.binary_search(&y).unwrap()].1;

    let mut touched = remove_closed_neighborhood(g, v, &nbrs);
    let mut created: Vec<CreatedVertex<W>> = Vec::with_capacity(sets.len() + extensions.len());
    for (c, out) in sets.iter().zip(&set_outer) {
        let w = c.weight - wv;
        let id = g.add_vertex(w);
        for &t in out {
            g.ensure_edge(id, t);
        }
        for prev in &created {
            g.ensure_edge(id, prev.id);
        }
        created.push(CreatedVertex { id, weight: w, provenance: Provenance::Set { c: c.members.clone() } });
    }
    let n_sets = created.len();
    for (&(li, y), out) in extensions.iter().zip(&ext_outer) {
        let w = y_weight(y);
        let id = g.add_vertex(w);
        for &t in out {
            g.ensure_edge(id, t);
        }
        for (lc, set_vertex) in created[..n_sets].iter().enumerate() {
            if lc != li {
                g.ensure_edge(id, set_vertex.id);
            }
        }
        created.push(CreatedVertex {
            id,
            weight: w,
            provenance: Provenance::SetPlus { c: sets[li].members.clone(), y },
        });
    }
    for &(i, j) in &ext_edges {
        g.ensure_edge(created[n_sets + i].id, created[n_sets + j].id);
    }
    touched.extend(created.iter().map(|c| c.id));

    let mut removed = nbrs.clone();
    removed.insert(0, v);
    log.record(TransformEvent::Struction {
        variant: StructionVariant::ExtendedReduced,
        center: v,
        center_weight: wv,
        neighborhood,
        created: created.iter().map(|c| (c.id, c.provenance.clone())).collect(),
    });
    Ok(StructionResult::Applied(StructionOutcome { center: v, created, removed, offset_delta: wv, touched }))
}
