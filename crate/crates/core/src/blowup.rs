//! Cyclic blow-up preprocessing.
//!
//! Alternates blow-up phases, which apply an increasing struction to an
//! irreducible graph, with reduction phases. A phase is kept only if the
//! reduced graph ends up strictly smaller than before the blow-up; otherwise
//! the graph and log are rolled back and the phase counts as unsuccessful.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::graph::{DynGraph, VertexId};
use crate::log::TransformLog;
use crate::reduce::{KernelResult, ReduceConfig, ReduceStats, Reducer};
use crate::struction::{apply_struction, StructionOutcome, StructionResult, StructionVariant};
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupConfig {
    /// Unsuccessful phases tolerated before stopping (`X`).
    pub max_unsuccessful: usize,
    /// Global cap on vertices a single struction may create.
    pub n_max: usize,
    /// Largest center degree considered for a blow-up.
    pub d_max: usize,
    /// Stop once the current graph is this factor larger than the best.
    pub alpha: f64,
    /// Tightness factor for the created-vertex lower bound.
    pub beta: f64,
    pub variant: StructionVariant,
    pub structions_per_phase: usize,
    pub reduce: ReduceConfig,
}

impl BlowupConfig {
    pub fn new(max_unsuccessful: usize, n_max: usize, d_max: usize) -> Self {
        BlowupConfig {
            max_unsuccessful,
            n_max,
            d_max,
            alpha: 1.25,
            beta: 2.0,
            variant: StructionVariant::Extended,
            structions_per_phase: 1,
            reduce: ReduceConfig::non_increasing(d_max),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.max_unsuccessful < 1 {
            return Err("unsuccessful-phase limit must be at least 1".into());
        }
        if self.n_max < 1 {
            return Err("n_max must be at least 1".into());
        }
        if !(self.beta > 1.0) {
            return Err("beta must exceed 1".into());
        }
        if !(self.alpha >= 1.0) {
            return Err("alpha must be at least 1".into());
        }
        if self.structions_per_phase < 1 {
            return Err("at least one struction per phase".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Preset {
    NonIncreasing,
    #[default]
    CyclicFast,
    CyclicStrong,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::NonIncreasing, Preset::CyclicFast, Preset::CyclicStrong];

    pub fn name(self) -> &'static str {
        match self {
            Preset::NonIncreasing => "nonincreasing",
            Preset::CyclicFast => "cyclic-fast",
            Preset::CyclicStrong => "cyclic-strong",
        }
    }

    /// Blow-up parameters; `None` for the non-increasing preset.
    pub fn blowup_config(self) -> Option<BlowupConfig> {
        match self {
            Preset::NonIncreasing => None,
            Preset::CyclicFast => Some(BlowupConfig::new(25, 512, 64)),
            Preset::CyclicStrong => Some(BlowupConfig::new(64, 2048, 512)),
        }
    }

    /// Struction degree limit used by the preset's reductions.
    pub fn d_max(self) -> usize {
        match self {
            Preset::NonIncreasing | Preset::CyclicFast => 64,
            Preset::CyclicStrong => 512,
        }
    }

    pub fn reduce_config(self) -> ReduceConfig {
        ReduceConfig::non_increasing(self.d_max())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

/// Number of independent sets of size at most two in `N(v)` that outweigh
/// `v`; a lower bound on the vertices an extended struction at `v` creates.
pub fn estimate_l<W: Weight>(g: &DynGraph<W>, v: VertexId) -> usize {
    let wv = g.weight(v);
    let nbrs = g.neighbors(v);
    let mut count = 0;
    for (i, &u) in nbrs.iter().enumerate() {
        let wu = g.weight(u);
        if wu > wv {
            count += 1;
        }
        for &x in &nbrs[i + 1..] {
            if wu + g.weight(x) > wv && !g.is_adjacent(u, x) {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Bound(usize),
    Excluded,
}

/// Candidate centers keyed by estimated net growth `bound - (δ(v) + 1)`,
/// ties broken by id.
#[derive(Debug, Clone, Default)]
pub struct CandidateQueue {
    order: BTreeSet<(i64, VertexId)>,
    entries: HashMap<VertexId, (usize, i64)>,
    excluded: HashSet<VertexId>,
    journal: Vec<(VertexId, Mark)>,
}

impl CandidateQueue {
    pub fn build<W: Weight>(g: &DynGraph<W>) -> Self {
        let mut q = CandidateQueue::default();
        for v in g.vertices() {
            q.push(g, v, estimate_l(g, v));
        }
        q
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn bound(&self, v: VertexId) -> Option<usize> {
        self.entries.get(&v).map(|e| e.0)
    }

    pub fn is_excluded(&self, v: VertexId) -> bool {
        self.excluded.contains(&v)
    }

    fn remove(&mut self, v: VertexId) {
        if let Some((_, key)) = self.entries.remove(&v) {
            self.order.remove(&(key, v));
        }
    }

    pub fn push<W: Weight>(&mut self, g: &DynGraph<W>, v: VertexId, bound: usize) {
        self.remove(v);
        self.excluded.remove(&v);
        let key = bound as i64 - (g.degree(v) as i64 + 1);
        self.order.insert((key, v));
        self.entries.insert(v, (bound, key));
    }

    pub fn exclude(&mut self, v: VertexId) {
        self.remove(v);
        self.excluded.insert(v);
    }

    /// Removes and returns the candidate with the smallest key.
    pub fn pop(&mut self) -> Option<(VertexId, usize)> {
        let (_, v) = self.order.pop_first()?;
        let (bound, _) = self.entries.remove(&v).expect("queued vertex has an entry");
        Some((v, bound))
    }

    /// Re-evaluates vertices whose neighborhood changed; this also lifts any
    /// exclusion on them.
    pub fn refresh<W: Weight>(&mut self, g: &DynGraph<W>, changed: impl IntoIterator<Item = VertexId>) {
        for v in changed {
            if g.is_active(v) {
                self.push(g, v, estimate_l(g, v));
            } else {
                self.remove(v);
                self.excluded.remove(&v);
            }
        }
    }
}

pub enum BlowupOutcome<W> {
    Changed(StructionOutcome<W>),
    NoCandidate,
}

/// One blow-up step: applies a struction at the most promising candidate
/// that passes the tightness check.
pub fn blow_up<W: Weight>(
    g: &mut DynGraph<W>,
    queue: &mut CandidateQueue,
    cfg: &BlowupConfig,
    log: &mut TransformLog<W>,
) -> BlowupOutcome<W> {
    while let Some((v, bound)) = queue.pop() {
        if !g.is_active(v) || g.degree(v) > cfg.d_max {
            continue;
        }
        let tight = ((cfg.beta * bound as f64).ceil() as usize).max(bound + 1);
        let cap = (tight - 1).min(cfg.n_max);
        match apply_struction(g, v, cfg.variant, cap, log) {
            Ok(StructionResult::Applied(out)) => return BlowupOutcome::Changed(out),
            Ok(StructionResult::Aborted) if tight - 1 < cfg.n_max => {
                queue.push(g, v, tight);
                queue.journal.push((v, Mark::Bound(tight)));
            }
            Ok(StructionResult::Aborted) | Err(_) => {
                queue.exclude(v);
                queue.journal.push((v, Mark::Excluded));
            }
        }
    }
    BlowupOutcome::NoCandidate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// No candidate center left.
    NoCandidate,
    UnsuccessfulLimit,
    /// The current graph grew past `alpha` times the best one (or became empty).
    SizeGuard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicStats {
    /// Size of the kernel produced by the initial non-increasing reduction.
    pub initial_kernel_n: usize,
    pub phases: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone)]
pub struct BlowupResult<W> {
    pub kernel: KernelResult<W>,
    pub stats: CyclicStats,
}

pub fn cyclic_blow_up<W: Weight>(mut g: DynGraph<W>, cfg: &BlowupConfig) -> BlowupResult<W> {
    let mut log = TransformLog::new();
    let mut reducer = Reducer::new(cfg.reduce.clone(), g.num_vertices());
    reducer.mark_all(&g);
    reducer.run(&mut g, &mut log);
    let mut reduce_stats: ReduceStats = reducer.stats.clone();

    let initial_kernel_n = g.num_vertices();
    let mut best_n = initial_kernel_n;
    let mut best: Option<(DynGraph<W>, usize)> = None;
    let mut queue = CandidateQueue::build(&g);
    let mut stats = CyclicStats { initial_kernel_n, phases: 0, accepted: 0, rejected: 0, stop: StopReason::SizeGuard };

    loop {
        if !((g.num_vertices() as f64) < cfg.alpha * best_n as f64) {
            stats.stop = StopReason::SizeGuard;
            break;
        }
        if stats.rejected >= cfg.max_unsuccessful {
            stats.stop = StopReason::UnsuccessfulLimit;
            break;
        }
        let snapshot = g.clone();
        let snapshot_log = log.len();
        let snapshot_queue = queue.clone();
        queue.journal.clear();

        let mut centers = Vec::new();
        let mut touched: BTreeSet<VertexId> = BTreeSet::new();
        for _ in 0..cfg.structions_per_phase {
            match blow_up(&mut g, &mut queue, cfg, &mut log) {
                BlowupOutcome::Changed(out) => {
                    centers.push(out.center);
                    touched.extend(out.touched.iter().copied());
                    if cfg.structions_per_phase > 1 {
                        let around: Vec<VertexId> = out
                            .touched
                            .iter()
                            .flat_map(|&t| std::iter::once(t).chain(g.neighbors(t).iter().copied()))
                            .collect();
                        queue.refresh(&g, around);
                    }
                }
                BlowupOutcome::NoCandidate => break,
            }
        }
        if centers.is_empty() {
            stats.stop = StopReason::NoCandidate;
            break;
        }
        stats.phases += 1;

        let touched: Vec<VertexId> = touched.into_iter().collect();
        let mut phase_reducer = Reducer::new(cfg.reduce.clone(), g.num_vertices());
        phase_reducer.track_changes();
        phase_reducer.mark(&g, &touched);
        phase_reducer.run(&mut g, &mut log);
        reduce_stats.merge(&phase_reducer.stats);

        if g.num_vertices() < snapshot.num_vertices() {
            stats.accepted += 1;
            queue.journal.clear();
            queue.refresh(&g, phase_reducer.take_changes());
            if g.num_vertices() < best_n {
                best_n = g.num_vertices();
                best = None;
            }
        } else {
            stats.rejected += 1;
            let bound = snapshot.id_bound();
            let journal = std::mem::take(&mut queue.journal);
            g = snapshot;
            log.truncate(snapshot_log);
            queue = snapshot_queue;
            // Knowledge gained about vertices of the restored graph stays valid.
            for (v, mark) in journal {
                if v.index() < bound {
                    match mark {
                        Mark::Bound(b) => queue.push(&g, v, b),
                        Mark::Excluded => queue.exclude(v),
                    }
                }
            }
            for c in centers {
                queue.exclude(c);
            }
        }
        // Under strict acceptance the current graph is always the best one;
        // keep a copy only if that ever stops holding.
        if g.num_vertices() > best_n && best.is_none() {
            best = Some((g.clone(), log.len()));
        }
    }

    if let Some((kernel, len)) = best {
        g = kernel;
        log.truncate(len);
    }
    let offset = log.offset();
    BlowupResult { kernel: KernelResult { kernel: g, offset, log, stats: reduce_stats }, stats }
}

/// Runs the preprocessing selected by `preset`.
pub fn preprocess<W: Weight>(g: DynGraph<W>, preset: Preset) -> BlowupResult<W> {
    match preset.blowup_config() {
        None => {
            let k = crate::reduce::reduce(g, &preset.reduce_config());
            let n = k.kernel.num_vertices();
            BlowupResult {
                kernel: k,
                stats: CyclicStats { initial_kernel_n: n, phases: 0, accepted: 0, rejected: 0, stop: StopReason::NoCandidate },
            }
        }
        Some(cfg) => cyclic_blow_up(g, &cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4a() -> DynGraph<u64> {
        DynGraph::from_edges(&[1, 2, 3, 2], &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    #[test]
    fn l_estimates() {
        assert_eq!(estimate_l(&c4a(), VertexId(0)), 3);
        let heavy = DynGraph::from_edges(&[9u64, 2, 3, 1], &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(estimate_l(&heavy, VertexId(0)), 0);
        let clique = DynGraph::from_edges(&[1u64, 2, 3, 1], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(estimate_l(&clique, VertexId(0)), 2);
    }

    #[test]
    fn presets() {
        let fast = Preset::CyclicFast.blowup_config().unwrap();
        assert_eq!((fast.max_unsuccessful, fast.n_max, fast.d_max, fast.beta), (25, 512, 64, 2.0));
        let strong = Preset::CyclicStrong.blowup_config().unwrap();
        assert_eq!((strong.max_unsuccessful, strong.n_max, strong.d_max, strong.beta), (64, 2048, 512, 2.0));
        assert!(Preset::NonIncreasing.blowup_config().is_none());
        assert_eq!("cyclic-strong".parse::<Preset>(), Ok(Preset::CyclicStrong));
        assert!("fast".parse::<Preset>().is_err());
    }

    #[test]
    fn tightness_retry_trace() {
        // C4a at a needs 3 new vertices; with the estimate forced to 1 the
        // first attempt (cap 1) fails and the retry (bound 2, cap 3) succeeds.
        let mut g = c4a();
        let mut cfg = BlowupConfig::new(1, 512, 64);
        cfg.d_max = 2;
        let mut queue = CandidateQueue::default();
        queue.push(&g, VertexId(0), 1);
        let mut log = TransformLog::new();
        match blow_up(&mut g, &mut queue, &cfg, &mut log) {
            BlowupOutcome::Changed(out) => {
                assert_eq!(out.center, VertexId(0));
                assert_eq!(out.created.len(), 3);
            }
            BlowupOutcome::NoCandidate => panic!("expected a struction"),
        }
        assert_eq!(queue.journal, vec![(VertexId(0), Mark::Bound(2))]);
    }

    #[test]
    fn no_candidate_when_degrees_exceed_limit() {
        let mut g = c4a();
        let mut cfg = BlowupConfig::new(1, 512, 1);
        cfg.d_max = 1;
        let mut queue = CandidateQueue::build(&g);
        let mut log = TransformLog::new();
        assert!(matches!(blow_up(&mut g, &mut queue, &cfg, &mut log), BlowupOutcome::NoCandidate));
        assert!(log.is_empty());
    }

    #[test]
    fn n_max_excludes() {
        let mut g = c4a();
        let mut cfg = BlowupConfig::new(1, 2, 64);
        cfg.n_max = 2;
        let mut queue = CandidateQueue::default();
        queue.push(&g, VertexId(0), 3);
        let mut log = TransformLog::new();
        assert!(matches!(blow_up(&mut g, &mut queue, &cfg, &mut log), BlowupOutcome::NoCandidate));
        assert!(queue.is_excluded(VertexId(0)));
        assert_eq!(g, c4a());
    }

    #[test]
    fn empty_after_reduce() {
        let g = DynGraph::from_edges(&[5u64, 1, 1, 1], &[(0, 1), (0, 2), (0, 3)]);
        let res = cyclic_blow_up(g, &BlowupConfig::new(25, 512, 64));
        assert!(res.kernel.kernel.is_empty());
        assert_eq!(res.stats.phases, 0);
        assert_eq!(res.kernel.offset, 5);
    }
}
