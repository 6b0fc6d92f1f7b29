//! Exact branch-and-reduce solver.
//!
//! Every search node reduces its graph with the decreasing rules, prunes
//! with the clique cover bound, solves connected components independently
//! and otherwise branches on a vertex (include it or drop it).

mod bounds;
mod local_search;
mod oracle;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::blowup::{preprocess, Preset};
use crate::graph::{DynGraph, VertexId};
use crate::log::{verify_lift, TransformEvent, TransformLog};
use crate::reduce::{reduce, ReduceConfig};
use crate::weight::Weight;

pub use bounds::upper_bound;
pub use local_search::{local_search, DEFAULT_ITERATIONS};
pub use oracle::{brute_force_mwis, brute_force_mwis_limited, ORACLE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("graph has {n} vertices, the oracle handles at most {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("lifted solution failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Maximum degree, ties by maximum weight, then smallest id.
    #[default]
    MaxDegree,
    /// Maximum weight, ties by maximum degree, then smallest id.
    MaxWeight,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub preset: Preset,
    pub time_limit: Option<Duration>,
    pub ls_iterations: usize,
    pub branch_rule: BranchRule,
    /// Subproblems up to this size are checked against the oracle when
    /// `check_bounds` is set.
    pub oracle_limit: usize,
    pub check_bounds: bool,
    pub seed: u64,
    /// Reductions applied at every search node.
    pub node_reduce: ReduceConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::with_preset(Preset::default())
    }
}

impl SolverConfig {
    pub fn with_preset(preset: Preset) -> Self {
        SolverConfig {
            preset,
            time_limit: None,
            ls_iterations: DEFAULT_ITERATIONS,
            branch_rule: BranchRule::MaxDegree,
            oracle_limit: 16,
            check_bounds: false,
            seed: 0,
            node_reduce: ReduceConfig::decreasing_only(preset.d_max()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::TimeLimit => "time-limit",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: usize,
    pub branches: usize,
    pub max_depth: usize,
    pub pruned: usize,
    pub component_splits: usize,
    /// Non-increasing kernel before any blow-up.
    pub initial_kernel_n: usize,
    pub kernel_n: usize,
    pub kernel_m: usize,
    pub bound_checks: usize,
    pub bound_violations: usize,
    pub preprocess_time: Duration,
    pub search_time: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveResult<W> {
    pub weight: W,
    /// Sorted ids of the input graph.
    pub solution: Vec<VertexId>,
    pub status: SolveStatus,
    pub stats: SolveStats,
}

/// Solves MWIS on `g` exactly, unless the time limit cuts the search short.
pub fn solve<W: Weight>(g: &DynGraph<W>, cfg: &SolverConfig) -> Result<SolveResult<W>, SolveError> {
    let start = Instant::now();
    let pre = preprocess(g.clone(), cfg.preset);
    let mut stats = SolveStats {
        initial_kernel_n: pre.stats.initial_kernel_n,
        kernel_n: pre.kernel.kernel.num_vertices(),
        kernel_m: pre.kernel.kernel.num_edges(),
        preprocess_time: start.elapsed(),
        ..Default::default()
    };

    let search_start = Instant::now();
    let mut search = Search {
        cfg,
        deadline: cfg.time_limit.map(|t| start + t),
        timed_out: false,
        stats: &mut stats,
    };
    let kernel = pre.kernel;
    let (weight, kernel_solution) = search
        .run(kernel.kernel.clone(), kernel.offset, W::zero(), 0)
        .unwrap_or_else(|| (kernel.offset, Vec::new()));
    let timed_out = search.timed_out;
    stats.search_time = search_start.elapsed();

    let mut solution = kernel
        .log
        .lift(&kernel.kernel, &kernel_solution)
        .map_err(|e| SolveError::Verification(e.to_string()))?;
    solution.sort_unstable();
    if !verify_lift(g, &solution, weight) {
        return Err(SolveError::Verification(format!(
            "solution of {} vertices does not match weight {weight}",
            solution.len()
        )));
    }
    let status = if timed_out { SolveStatus::TimeLimit } else { SolveStatus::Optimal };
    Ok(SolveResult { weight, solution, status, stats })
}

struct Search<'a> {
    cfg: &'a SolverConfig,
    deadline: Option<Instant>,
    timed_out: bool,
    stats: &'a mut SolveStats,
}

impl Search<'_> {
    /// Looks for an independent set of `g` with `c + w(I) > best`. Returns
    /// the total `c + w(I)` and `I` in the ids of `g`, or `None` when nothing
    /// better exists (or time ran out).
    fn run<W: Weight>(&mut self, g: DynGraph<W>, c: W, best: W, depth: usize) -> Option<(W, Vec<VertexId>)> {
        if self.timed_out || self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            // Components must still report something usable.
            if best.is_zero() {
                let (w, s) = local_search(&g, 0, self.cfg.seed);
                return (c + w > best).then_some((c + w, s));
            }
            return None;
        }
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);

        let k = reduce(g, &self.cfg.node_reduce);
        let c = c + k.offset;
        let kg = &k.kernel;
        let mut best = best;
        let mut found: Option<(W, Vec<VertexId>)> = None;

        if best.is_zero() || self.cfg.check_bounds {
            let (lw, ls) = local_search(kg, self.cfg.ls_iterations, self.cfg.seed);
            if self.cfg.check_bounds && kg.num_vertices() <= self.cfg.oracle_limit {
                self.check_bounds(kg, lw);
            }
            if best.is_zero() && c + lw > best {
                best = c + lw;
                found = Some((best, ls));
            }
        }

        if kg.is_empty() {
            if c > best {
                found = Some((c, Vec::new()));
            }
        } else if c + upper_bound(kg) <= best {
            self.stats.pruned += 1;
        } else {
            let comps = components(kg);
            if comps.len() > 1 {
                self.stats.component_splits += 1;
                let mut total = c;
                let mut sol = Vec::new();
                for comp in comps {
                    let (w, s) = match self.run(comp.graph.clone(), W::zero(), W::zero(), depth + 1) {
                        Some(r) => r,
                        None => local_search(&comp.graph, 0, self.cfg.seed),
                    };
                    total = total + w;
                    sol.extend(s.into_iter().map(|v| comp.ids[v.index()]));
                }
                if total > best {
                    found = Some((total, sol));
                }
            } else if let Some(r) = self.branch(kg, c, best, depth) {
                found = Some(r);
            }
        }

        let (w, sol) = found?;
        let lifted = k.lift(&sol).expect("search solutions are independent");
        Some((w, lifted))
    }

    fn branch<W: Weight>(&mut self, g: &DynGraph<W>, c: W, best: W, depth: usize) -> Option<(W, Vec<VertexId>)> {
        self.stats.branches += 1;
        let v = pick_branch_vertex(g, self.cfg.branch_rule);
        let ((g1, c1, log1), (g2, c2, log2)) = branch(g, c, v);
        let mut best = best;
        let mut found = None;
        if let Some((w, s)) = self.run(g1, c1, best, depth + 1) {
            best = w;
            found = Some((w, log1.lift(g, &s).expect("independent")));
        }
        if let Some((w, s)) = self.run(g2, c2, best, depth + 1) {
            found = Some((w, log2.lift(g, &s).expect("independent")));
        }
        found
    }

    fn check_bounds<W: Weight>(&mut self, g: &DynGraph<W>, lower: W) {
        if let Ok((alpha, _)) = brute_force_mwis_limited(g, self.cfg.oracle_limit) {
            self.stats.bound_checks += 1;
            if lower > alpha || alpha > upper_bound(g) {
                self.stats.bound_violations += 1;
            }
        }
    }
}

pub fn pick_branch_vertex<W: Weight>(g: &DynGraph<W>, rule: BranchRule) -> VertexId {
    let key = |v: VertexId| match rule {
        BranchRule::MaxDegree => (g.degree(v) as u128, g.weight(v).to_u128()),
        BranchRule::MaxWeight => (g.weight(v).to_u128(), g.degree(v) as u128),
    };
    // max_by_key keeps the last maximum; iterate in reverse to keep the smallest id
    g.active_vertices().into_iter().rev().max_by_key(|&v| key(v)).expect("non-empty graph")
}

type Branch<W> = (DynGraph<W>, W, TransformLog<W>);

/// The two cases at `v`: take it (drop `N[v]`) or drop it.
pub fn branch<W: Weight>(g: &DynGraph<W>, c: W, v: VertexId) -> (Branch<W>, Branch<W>) {
    let mut g1 = g.clone();
    let mut log1 = TransformLog::new();
    for u in g.neighbors(v).to_vec() {
        g1.remove_vertex(u).expect("active neighbor");
    }
    g1.remove_vertex(v).expect("active vertex");
    log1.record(TransformEvent::IncludedVertex { v, weight: g.weight(v) });

    let mut g2 = g.clone();
    let mut log2 = TransformLog::new();
    g2.remove_vertex(v).expect("active vertex");
    log2.record(TransformEvent::ExcludedVertex { v });

    ((g1, c + g.weight(v), log1), (g2, c, log2))
}

/// A connected component copied into a compact graph.
#[derive(Debug, Clone)]
pub struct Component<W> {
    pub graph: DynGraph<W>,
    /// Component id -> original id.
    pub ids: Vec<VertexId>,
}

impl<W> Component<W> {
    pub fn local_id(&self, original: VertexId) -> Option<VertexId> {
        self.ids.binary_search(&original).ok().map(|i| VertexId(i as u32))
    }
}

/// Connected components ordered by their smallest vertex id.
pub fn components<W: Weight>(g: &DynGraph<W>) -> Vec<Component<W>> {
    let mut seen = vec![false; g.id_bound()];
    let mut out = Vec::new();
    for s in g.vertices() {
        if seen[s.index()] {
            continue;
        }
        seen[s.index()] = true;
        let mut members = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        let (graph, ids) = g.induced_compact(&members);
        out.push(Component { graph, ids });
    }
    out
}
