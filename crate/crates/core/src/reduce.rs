//! Non-increasing reduction pipeline.
//!
//! Rules are tried in a fixed order, cheapest first. Each rule has its own
//! queue of dirty vertices; whenever a rule fires, the vertices around the
//! change are pushed onto every queue and processing restarts at the first
//! rule. The run ends when all queues are empty.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::graph::{DynGraph, VertexId};
use crate::log::{TransformEvent, TransformLog};
use crate::struction::{apply_struction, StructionResult, StructionVariant};
use crate::weight::{total, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    NeighborhoodRemoval,
    DegreeTwoFold,
    CliqueReduction,
    Domination,
    Twin,
    CliqueNeighborhoodRemoval,
    DecreasingStruction,
    PlateauStruction,
}

impl Rule {
    /// Application order.
    pub const ORDER: [Rule; 8] = [
        Rule::NeighborhoodRemoval,
        Rule::DegreeTwoFold,
        Rule::CliqueReduction,
        Rule::Domination,
        Rule::Twin,
        Rule::CliqueNeighborhoodRemoval,
        Rule::DecreasingStruction,
        Rule::PlateauStruction,
    ];

    /// The rules that never need a struction.
    pub const SIMPLE: [Rule; 6] = [
        Rule::NeighborhoodRemoval,
        Rule::DegreeTwoFold,
        Rule::CliqueReduction,
        Rule::Domination,
        Rule::Twin,
        Rule::CliqueNeighborhoodRemoval,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::NeighborhoodRemoval => "neighborhood_removal",
            Rule::DegreeTwoFold => "degree_two_fold",
            Rule::CliqueReduction => "clique_reduction",
            Rule::Domination => "domination",
            Rule::Twin => "twin",
            Rule::CliqueNeighborhoodRemoval => "clique_neighborhood_removal",
            Rule::DecreasingStruction => "decreasing_struction",
            Rule::PlateauStruction => "plateau_struction",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReduceConfig {
    /// Enabled rules; always applied in [`Rule::ORDER`].
    pub rules: Vec<Rule>,
    pub variant: StructionVariant,
    /// Largest center degree a struction is attempted on.
    pub d_max: usize,
    /// Plateau applications allowed per run; `None` means four times the
    /// initial vertex count.
    pub plateau_budget: Option<usize>,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        Self::non_increasing(64)
    }
}

impl ReduceConfig {
    pub fn non_increasing(d_max: usize) -> Self {
        ReduceConfig { rules: Rule::ORDER.to_vec(), variant: StructionVariant::Extended, d_max, plateau_budget: None }
    }

    /// Decreasing transformations only (no plateau structions).
    pub fn decreasing_only(d_max: usize) -> Self {
        let mut cfg = Self::non_increasing(d_max);
        cfg.rules.retain(|&r| r != Rule::PlateauStruction);
        cfg
    }

    pub fn only(rules: &[Rule]) -> Self {
        ReduceConfig { rules: rules.to_vec(), ..Self::non_increasing(64) }
    }

    pub fn plateau_enabled(&self) -> bool {
        self.rules.contains(&Rule::PlateauStruction)
    }

    fn ordered_rules(&self) -> Vec<Rule> {
        Rule::ORDER.into_iter().filter(|r| self.rules.contains(r)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleOutcome {
    /// The rule fired; `touched` lists surviving vertices whose weight or
    /// neighborhood changed.
    Applied { touched: Vec<VertexId> },
    NotApplicable,
}

impl RuleOutcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, RuleOutcome::Applied { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReduceStats {
    pub applications: [usize; 8],
    pub zero_weight_removals: usize,
    pub plateau_budget_left: usize,
    pub elapsed: Duration,
}

impl ReduceStats {
    pub fn count(&self, rule: Rule) -> usize {
        self.applications[rule.index()]
    }

    pub fn total_applications(&self) -> usize {
        self.applications.iter().sum()
    }

    pub fn merge(&mut self, other: &ReduceStats) {
        for (a, b) in self.applications.iter_mut().zip(other.applications) {
            *a += b;
        }
        self.zero_weight_removals += other.zero_weight_removals;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone)]
pub struct KernelResult<W> {
    pub kernel: DynGraph<W>,
    pub offset: W,
    pub log: TransformLog<W>,
    pub stats: ReduceStats,
}

impl<W: Weight> KernelResult<W> {
    /// Lifts a solution of the kernel to the graph the reduction started from.
    pub fn lift(&self, kernel_solution: &[VertexId]) -> Result<Vec<VertexId>, crate::log::LiftError> {
        self.log.lift(&self.kernel, kernel_solution)
    }
}

/// Budget and exclusion set shared by plateau struction attempts.
#[derive(Debug, Clone, Default)]
pub struct PlateauState {
    pub remaining: usize,
    excluded: HashSet<VertexId>,
}

impl PlateauState {
    pub fn new(budget: usize) -> Self {
        PlateauState { remaining: budget, excluded: HashSet::new() }
    }

    pub fn is_excluded(&self, v: VertexId) -> bool {
        self.excluded.contains(&v)
    }

    /// `v`'s neighborhood changed; it may be tried again.
    pub fn release(&mut self, v: VertexId) {
        self.excluded.remove(&v);
    }
}

/// Runs the pipeline to a fixed point.
pub fn reduce<W: Weight>(mut g: DynGraph<W>, cfg: &ReduceConfig) -> KernelResult<W> {
    let mut log = TransformLog::new();
    let mut reducer = Reducer::new(cfg.clone(), g.num_vertices());
    reducer.mark_all(&g);
    reducer.run(&mut g, &mut log);
    let offset = log.offset();
    KernelResult { kernel: g, offset, log, stats: reducer.stats.clone() }
}

/// Incremental reduction engine. Keeps its dirty queues between runs so
/// callers can feed it only the vertices around an external change.
#[derive(Debug, Clone)]
pub struct Reducer {
    cfg: ReduceConfig,
    order: Vec<Rule>,
    queues: Vec<BTreeSet<VertexId>>,
    zero: BTreeSet<VertexId>,
    plateau: PlateauState,
    pub stats: ReduceStats,
    changed: Option<BTreeSet<VertexId>>,
    seen: Vec<bool>,
}

impl Reducer {
    pub fn new(cfg: ReduceConfig, initial_vertices: usize) -> Self {
        let order = cfg.ordered_rules();
        let budget = cfg.plateau_budget.unwrap_or(4 * initial_vertices);
        Reducer {
            queues: vec![BTreeSet::new(); order.len()],
            order,
            cfg,
            zero: BTreeSet::new(),
            plateau: PlateauState::new(budget),
            stats: ReduceStats { plateau_budget_left: budget, ..Default::default() },
            changed: None,
            seen: Vec::new(),
        }
    }

    pub fn config(&self) -> &ReduceConfig {
        &self.cfg
    }

    /// Starts recording every vertex marked dirty from now on.
    pub fn track_changes(&mut self) {
        self.changed = Some(BTreeSet::new());
    }

    pub fn take_changes(&mut self) -> BTreeSet<VertexId> {
        self.changed.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn mark_all<W: Weight>(&mut self, g: &DynGraph<W>) {
        for v in g.vertices() {
            self.push(g, v);
        }
    }

    /// Marks every vertex in `touched` and its neighbors.
    pub fn mark<W: Weight>(&mut self, g: &DynGraph<W>, touched: &[VertexId]) {
        let mut seen = std::mem::take(&mut self.seen);
        seen.clear();
        seen.resize(g.id_bound(), false);
        for &t in touched {
            if !g.is_active(t) {
                continue;
            }
            for u in std::iter::once(t).chain(g.neighbors(t).iter().copied()) {
                if !std::mem::replace(&mut seen[u.index()], true) {
                    self.push(g, u);
                }
            }
        }
        self.seen = seen;
    }

    fn push<W: Weight>(&mut self, g: &DynGraph<W>, v: VertexId) {
        for q in &mut self.queues {
            q.insert(v);
        }
        if g.weight(v).is_zero() {
            self.zero.insert(v);
        }
        self.plateau.release(v);
        if let Some(c) = &mut self.changed {
            c.insert(v);
        }
    }

    pub fn run<W: Weight>(&mut self, g: &mut DynGraph<W>, log: &mut TransformLog<W>) {
        let start = Instant::now();
        'outer: loop {
            while let Some(v) = self.zero.pop_first() {
                if g.is_active(v) && g.weight(v).is_zero() {
                    let nbrs = g.neighbors(v).to_vec();
                    g.remove_vertex(v).expect("active");
                    log.record(TransformEvent::ExcludedVertex { v });
                    self.stats.zero_weight_removals += 1;
                    self.mark(g, &nbrs);
                }
            }
            for ri in 0..self.order.len() {
                while let Some(v) = self.queues[ri].pop_first() {
                    if !g.is_active(v) {
                        continue;
                    }
                    let rule = self.order[ri];
                    if let RuleOutcome::Applied { touched } = self.apply(rule, g, log, v) {
                        self.stats.applications[rule.index()] += 1;
                                        self.mark(g, &touched);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        self.stats.plateau_budget_left = self.plateau.remaining;
        self.stats.elapsed += start.elapsed();
    }

    fn apply<W: Weight>(&mut self, rule: Rule, g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
        match rule {
            Rule::NeighborhoodRemoval => neighborhood_removal(g, log, v),
            Rule::DegreeTwoFold => degree_two_fold(g, log, v),
            Rule::CliqueReduction => clique_reduction(g, log, v),
            Rule::Domination => domination(g, log, v),
            Rule::Twin => twin_merge(g, log, v),
            Rule::CliqueNeighborhoodRemoval => clique_neighborhood_removal(g, log, v),
            Rule::DecreasingStruction => decreasing_struction(g, log, v, &self.cfg),
            Rule::PlateauStruction => plateau_struction(g, log, v, &self.cfg, &mut self.plateau),
        }
    }
}

/// Finds some position where an enabled rule fires, trying every rule on a
/// scratch copy. Plateau structions are checked with a fresh budget.
pub fn find_applicable<W: Weight>(g: &DynGraph<W>, cfg: &ReduceConfig) -> Option<(Rule, VertexId)> {
    if let Some(v) = g.vertices().find(|&v| g.weight(v).is_zero()) {
        return Some((Rule::NeighborhoodRemoval, v));
    }
    for rule in cfg.ordered_rules() {
        for v in g.vertices() {
            let mut scratch = g.clone();
            let mut log = TransformLog::new();
            let mut plateau = PlateauState::new(1);
            let out = match rule {
                Rule::PlateauStruction => plateau_struction(&mut scratch, &mut log, v, cfg, &mut plateau),
                Rule::DecreasingStruction => decreasing_struction(&mut scratch, &mut log, v, cfg),
                _ => apply_simple(rule, &mut scratch, &mut log, v),
            };
            if out.is_applied() {
                return Some((rule, v));
            }
        }
    }
    None
}

/// Applies one of the six struction-free rules at `v`.
pub fn apply_simple<W: Weight>(rule: Rule, g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    match rule {
        Rule::NeighborhoodRemoval => neighborhood_removal(g, log, v),
        Rule::DegreeTwoFold => degree_two_fold(g, log, v),
        Rule::CliqueReduction => clique_reduction(g, log, v),
        Rule::Domination => domination(g, log, v),
        Rule::Twin => twin_merge(g, log, v),
        Rule::CliqueNeighborhoodRemoval => clique_neighborhood_removal(g, log, v),
        Rule::DecreasingStruction | Rule::PlateauStruction => {
            panic!("{rule} needs a configuration; use decreasing_struction/plateau_struction")
        }
    }
}

/// Puts `v` into the solution and removes `N[v]`.
fn include<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    let closed: Vec<VertexId> = std::iter::once(v).chain(g.neighbors(v).iter().copied()).collect();
    let mut touched: Vec<VertexId> = closed.iter().flat_map(|&u| g.neighbors(u).iter().copied()).collect();
    log.record(TransformEvent::IncludedVertex { v, weight: g.weight(v) });
    for &u in &closed {
        g.remove_vertex(u).expect("active");
    }
    touched.sort_unstable();
    touched.dedup();
    touched.retain(|&t| g.is_active(t));
    RuleOutcome::Applied { touched }
}

fn neighborhood_weight<W: Weight>(g: &DynGraph<W>, v: VertexId) -> W {
    total(g.neighbors(v).iter().map(|&u| g.weight(u)))
}

/// Includes `v` when `w(v) >= w(N(v))`.
pub fn neighborhood_removal<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) || g.weight(v) < neighborhood_weight(g, v) {
        return RuleOutcome::NotApplicable;
    }
    include(g, log, v)
}

/// Folds a degree-two vertex `v` with non-adjacent neighbors `u, x` when
/// `max(w(u), w(x)) <= w(v) < w(u) + w(x)`.
pub fn degree_two_fold<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) || g.degree(v) != 2 {
        return RuleOutcome::NotApplicable;
    }
    let (u, x) = (g.neighbors(v)[0], g.neighbors(v)[1]);
    let (wv, wu, wx) = (g.weight(v), g.weight(u), g.weight(x));
    if g.is_adjacent(u, x) || wv < wu.max(wx) || wv >= wu + wx {
        return RuleOutcome::NotApplicable;
    }
    let mut nbrs: Vec<VertexId> =
        g.neighbors(u).iter().chain(g.neighbors(x)).copied().filter(|&t| t != v).collect();
    nbrs.sort_unstable();
    nbrs.dedup();
    for t in [v, u, x] {
        g.remove_vertex(t).expect("active");
    }
    let folded = g.add_vertex(wu + wx - wv);
    for &t in &nbrs {
        g.ensure_edge(folded, t);
    }
    log.record(TransformEvent::DegreeTwoFold { v, v_weight: wv, u, x, folded });
    let mut touched = nbrs;
    touched.push(folded);
    RuleOutcome::Applied { touched }
}

fn is_clique<W: Weight>(g: &DynGraph<W>, set: &[VertexId]) -> bool {
    let k = set.len();
    set.iter().enumerate().all(|(i, &a)| g.degree(a) + 1 >= k && set[i + 1..].iter().all(|&b| g.is_adjacent(a, b)))
}

/// Includes a simplicial vertex that is at least as heavy as each neighbor.
pub fn clique_reduction<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) {
        return RuleOutcome::NotApplicable;
    }
    let wv = g.weight(v);
    let nbrs = g.neighbors(v);
    if nbrs.iter().any(|&u| g.weight(u) > wv) || !is_clique(g, nbrs) {
        return RuleOutcome::NotApplicable;
    }
    include(g, log, v)
}

/// Removes `v` when some neighbor `u` with `w(u) >= w(v)` has `N[u] ⊆ N[v]`.
pub fn domination<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) {
        return RuleOutcome::NotApplicable;
    }
    let wv = g.weight(v);
    let nv = g.neighbors(v);
    let dominated = nv.iter().any(|&u| {
        g.weight(u) >= wv && g.degree(u) <= nv.len() && subset_except(g.neighbors(u), v, nv)
    });
    if !dominated {
        return RuleOutcome::NotApplicable;
    }
    let touched = nv.to_vec();
    g.remove_vertex(v).expect("active");
    log.record(TransformEvent::ExcludedVertex { v });
    RuleOutcome::Applied { touched }
}

/// Whether `a \ {skip}` is a subset of `b`; both lists sorted.
fn subset_except(a: &[VertexId], skip: VertexId, b: &[VertexId]) -> bool {
    let mut j = 0;
    for &t in a {
        if t == skip {
            continue;
        }
        while j < b.len() && b[j] < t {
            j += 1;
        }
        if j == b.len() || b[j] != t {
            return false;
        }
    }
    true
}

/// Merges a non-adjacent vertex with the same open neighborhood into `v`.
pub fn twin_merge<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) || g.degree(v) == 0 {
        return RuleOutcome::NotApplicable;
    }
    let nv = g.neighbors(v);
    let pivot = *nv.iter().min_by_key(|&&a| (g.degree(a), a)).unwrap();
    // A twin shares every neighbor of v, so it is adjacent to the pivot; it can
    // not be adjacent to v itself since v is not in N(v).
    let twin = g.neighbors(pivot).iter().copied().find(|&u| u != v && g.degree(u) == nv.len() && g.neighbors(u) == nv);
    let Some(u) = twin else {
        return RuleOutcome::NotApplicable;
    };
    let mut touched = nv.to_vec();
    touched.push(v);
    let merged = g.weight(v) + g.weight(u);
    g.remove_vertex(u).expect("active");
    g.set_weight(v, merged).expect("active");
    log.record(TransformEvent::TwinMerge { kept: v, absorbed: u });
    RuleOutcome::Applied { touched }
}

/// Greedy clique cover of `set`: descending weight, ties by ascending id,
/// each vertex joins the first clique it is fully adjacent to. Returns the
/// cliques in creation order, each with its heaviest member first.
pub fn greedy_clique_cover<W: Weight>(g: &DynGraph<W>, set: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut order = set.to_vec();
    order.sort_by(|&a, &b| g.weight(b).cmp(&g.weight(a)).then(a.cmp(&b)));
    let mut cliques: Vec<Vec<VertexId>> = Vec::new();
    for u in order {
        match cliques.iter_mut().find(|c| c.iter().all(|&m| g.is_adjacent(u, m))) {
            Some(c) => c.push(u),
            None => cliques.push(vec![u]),
        }
    }
    cliques
}

/// Includes `v` when its weight covers the clique-cover bound of `N(v)`.
pub fn clique_neighborhood_removal<W: Weight>(g: &mut DynGraph<W>, log: &mut TransformLog<W>, v: VertexId) -> RuleOutcome {
    if !g.is_active(v) {
        return RuleOutcome::NotApplicable;
    }
    let cover = greedy_clique_cover(g, g.neighbors(v));
    let bound = total(cover.iter().map(|c| g.weight(c[0])));
    if g.weight(v) < bound {
        return RuleOutcome::NotApplicable;
    }
    include(g, log, v)
}

fn struction_rule<W: Weight>(
    g: &mut DynGraph<W>,
    log: &mut TransformLog<W>,
    v: VertexId,
    variant: StructionVariant,
    cap: usize,
) -> RuleOutcome {
    match apply_struction(g, v, variant, cap, log) {
        Ok(StructionResult::Applied(out)) => RuleOutcome::Applied { touched: out.touched },
        Ok(StructionResult::Aborted) | Err(_) => RuleOutcome::NotApplicable,
    }
}

/// A struction that strictly shrinks the graph.
pub fn decreasing_struction<W: Weight>(
    g: &mut DynGraph<W>,
    log: &mut TransformLog<W>,
    v: VertexId,
    cfg: &ReduceConfig,
) -> RuleOutcome {
    if !g.is_active(v) || g.degree(v) > cfg.d_max {
        return RuleOutcome::NotApplicable;
    }
    let cap = if cfg.variant.removes_neighborhood() { g.degree(v) } else { 0 };
    struction_rule(g, log, v, cfg.variant, cap)
}

/// A struction that keeps the vertex count but raises the offset.
pub fn plateau_struction<W: Weight>(
    g: &mut DynGraph<W>,
    log: &mut TransformLog<W>,
    v: VertexId,
    cfg: &ReduceConfig,
    state: &mut PlateauState,
) -> RuleOutcome {
    if !g.is_active(v) || g.degree(v) > cfg.d_max || state.remaining == 0 || state.is_excluded(v) {
        return RuleOutcome::NotApplicable;
    }
    let cap = if cfg.variant.removes_neighborhood() { g.degree(v) + 1 } else { 1 };
    let out = struction_rule(g, log, v, cfg.variant, cap);
    if out.is_applied() {
        state.remaining -= 1;
    } else {
        state.excluded.insert(v);
    }
    out
}
