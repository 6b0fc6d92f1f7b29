//! File formats: METIS graphs, kernel sidecars, solutions, stats records,
//! and seeded instance generation.
//!
//! Graph files use the METIS layout with 1-indexed vertices:
//!
//! ```text
//! % comment
//! n m 10
//! w_1 nbr nbr ...
//! ...
//! ```
//!
//! A format code of `10` means each vertex line starts with its weight; `0`
//! or no code means unit weights.
//!
//! Random instances use ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(seed)`. Edges are drawn from stream 0, one Bernoulli trial
//! per pair in lexicographic order; weights are drawn from stream 1 in id order
//! with `gen_range(lo..=hi)` from `rand` 0.8.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DynGraph, VertexId};
use crate::log::TransformLog;
use crate::reduce::KernelResult;
use crate::weight::Weight;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax { line, msg: msg.into() })
}

pub fn read_graph<W: Weight>(path: impl AsRef<Path>) -> Result<DynGraph<W>, ParseError> {
    parse_graph(BufReader::new(fs::File::open(path)?))
}

pub fn parse_graph_str<W: Weight>(text: &str) -> Result<DynGraph<W>, ParseError> {
    parse_graph(text.as_bytes())
}

/// Parses a METIS graph. Input vertex `k` becomes `VertexId(k - 1)`.
pub fn parse_graph<W: Weight, R: BufRead>(input: R) -> Result<DynGraph<W>, ParseError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = None;
    for (no, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        header = Some((no, t.to_string()));
        break;
    }
    let Some((hline, header)) = header else {
        return syntax(1, "missing header");
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 3 {
        return syntax(hline, "header must be `n m [fmt]`");
    }
    let n: usize = fields[0].parse().or_else(|_| syntax(hline, format!("bad vertex count `{}`", fields[0])))?;
    let m: usize = fields[1].parse().or_else(|_| syntax(hline, format!("bad edge count `{}`", fields[1])))?;
    let weighted = match fields.get(2).map(|f| f.trim_start_matches('0')) {
        None | Some("") => false,
        Some("10") => true,
        Some(_) => return syntax(hline, format!("unsupported format code `{}`", fields[2])),
    };
    if n > u32::MAX as usize {
        return syntax(hline, "too many vertices");
    }

    let mut weights = Vec::with_capacity(n);
    let mut adj: Vec<Vec<VertexId>> = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    for (no, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.starts_with('%') {
            continue;
        }
        if weights.len() == n {
            if t.is_empty() {
                continue;
            }
            return syntax(no, format!("more than {n} vertex lines"));
        }
        let mut tokens = t.split_whitespace();
        let w = if weighted {
            let Some(tok) = tokens.next() else {
                return syntax(no, "missing vertex weight");
            };
            let w: u64 = tok.parse().or_else(|_| syntax(no, format!("bad weight `{tok}`")))?;
            if w < 1 {
                return syntax(no, "vertex weight must be at least 1");
            }
            W::from_u64(w).map_or_else(|| syntax(no, format!("weight {w} out of range")), Ok)?
        } else {
            W::one()
        };
        let me = weights.len();
        let mut list = Vec::new();
        for tok in tokens {
            let u: usize = tok.parse().or_else(|_| syntax(no, format!("bad neighbor `{tok}`")))?;
            if u < 1 || u > n {
                return syntax(no, format!("neighbor {u} outside 1..={n}"));
            }
            if u - 1 == me {
                return syntax(no, "self-loop");
            }
            list.push(VertexId((u - 1) as u32));
        }
        list.sort_unstable();
        if list.windows(2).any(|p| p[0] == p[1]) {
            return syntax(no, "duplicate neighbor");
        }
        weights.push(w);
        adj.push(list);
        line_of.push(no);
    }
    if weights.len() < n {
        return syntax(line_of.last().copied().unwrap_or(hline), format!("expected {n} vertex lines, found {}", weights.len()));
    }

    let mut listed = 0usize;
    for (i, list) in adj.iter().enumerate() {
        for &u in list {
            if adj[u.index()].binary_search(&VertexId(i as u32)).is_err() {
                return syntax(line_of[i], format!("edge {} -> {} not listed by {}", i + 1, u.index() + 1, u.index() + 1));
            }
        }
        listed += list.len();
    }
    if listed / 2 != m {
        return syntax(hline, format!("header says {m} edges, lists contain {}", listed / 2));
    }

    let mut g = DynGraph::with_weights(&weights);
    for (i, list) in adj.iter().enumerate() {
        for &u in list {
            if u.index() > i {
                g.add_edge(VertexId(i as u32), u).expect("validated edge");
            }
        }
    }
    Ok(g)
}

/// Renders the active part of `g`, renumbered `1..=k` in id order. Returns
/// the text and the map from new (0-based) index to old id.
pub fn format_graph<W: Weight>(g: &DynGraph<W>) -> (String, Vec<VertexId>) {
    let ids = g.active_vertices();
    let mut local = vec![0usize; g.id_bound()];
    for (i, v) in ids.iter().enumerate() {
        local[v.index()] = i + 1;
    }
    let mut out = String::new();
    writeln!(out, "{} {} 10", ids.len(), g.num_edges()).unwrap();
    for &v in &ids {
        write!(out, "{}", g.weight(v)).unwrap();
        for u in g.neighbors(v) {
            write!(out, " {}", local[u.index()]).unwrap();
        }
        out.push('\n');
    }
    (out, ids)
}

pub fn write_graph<W: Weight>(g: &DynGraph<W>, path: impl AsRef<Path>) -> io::Result<Vec<VertexId>> {
    let (text, ids) = format_graph(g);
    fs::write(path, text)?;
    Ok(ids)
}

const SIDECAR_MAGIC: &[u8; 4] = b"STKS";
const SIDECAR_VERSION: u32 = 1;

/// Contents of a kernel sidecar.
#[derive(Debug, Clone)]
pub struct KernelSidecar<W> {
    pub original_n: usize,
    pub offset: W,
    /// Kernel file vertex `i + 1` is kernel id `ids[i]`.
    pub ids: Vec<VertexId>,
    pub log: TransformLog<W>,
}

/// Writes the kernel graph (renumbered) and a binary sidecar with the offset,
/// the id map and the transformation log.
pub fn write_kernel<W: Weight>(
    k: &KernelResult<W>,
    original_n: usize,
    graph_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
) -> io::Result<()> {
    let ids = write_graph(&k.kernel, graph_path)?;
    let mut out = io::BufWriter::new(fs::File::create(sidecar_path)?);
    write_sidecar(&mut out, original_n, k.offset, &ids, &k.log)?;
    out.flush()
}

pub fn write_sidecar<W: Weight, Wr: Write>(
    out: &mut Wr,
    original_n: usize,
    offset: W,
    ids: &[VertexId],
    log: &TransformLog<W>,
) -> io::Result<()> {
    out.write_all(SIDECAR_MAGIC)?;
    out.write_all(&SIDECAR_VERSION.to_le_bytes())?;
    out.write_all(&(original_n as u64).to_le_bytes())?;
    out.write_all(&offset.to_u64().to_le_bytes())?;
    out.write_all(&(ids.len() as u64).to_le_bytes())?;
    for v in ids {
        out.write_all(&v.0.to_le_bytes())?;
    }
    log.write_to(out)
}

pub fn read_sidecar<W: Weight, R: Read>(input: &mut R) -> io::Result<KernelSidecar<W>> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != SIDECAR_MAGIC {
        return Err(bad("not a kernel sidecar"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != SIDECAR_VERSION {
        return Err(bad("unsupported sidecar version"));
    }
    input.read_exact(&mut b8)?;
    let original_n = u64::from_le_bytes(b8) as usize;
    input.read_exact(&mut b8)?;
    let offset = W::from_u64(u64::from_le_bytes(b8)).ok_or_else(|| bad("offset out of range"))?;
    input.read_exact(&mut b8)?;
    let k = u64::from_le_bytes(b8);
    let mut ids = Vec::new();
    for _ in 0..k {
        input.read_exact(&mut b4)?;
        ids.push(VertexId(u32::from_le_bytes(b4)));
    }
    let log = TransformLog::read_from(input)?;
    if log.offset() != offset {
        return Err(bad("sidecar offset disagrees with its log"));
    }
    Ok(KernelSidecar { original_n, offset, ids, log })
}

pub fn read_kernel_sidecar<W: Weight>(path: impl AsRef<Path>) -> io::Result<KernelSidecar<W>> {
    read_sidecar(&mut BufReader::new(fs::File::open(path)?))
}

impl<W: Weight> KernelSidecar<W> {
    /// Rebuilds the kernel with its original (pre-renumbering) ids from the
    /// renumbered kernel file contents.
    pub fn restore(&self, file_graph: &DynGraph<W>) -> Result<DynGraph<W>, String> {
        if file_graph.num_vertices() != self.ids.len() {
            return Err(format!("kernel file has {} vertices, sidecar maps {}", file_graph.num_vertices(), self.ids.len()));
        }
        let bound = self.ids.iter().map(|v| v.index() + 1).max().unwrap_or(0);
        let mut weights = vec![W::zero(); bound];
        for (i, &v) in self.ids.iter().enumerate() {
            weights[v.index()] = file_graph.weight(VertexId(i as u32));
        }
        let mut g = DynGraph::with_weights(&weights);
        let mut used = vec![false; bound];
        for &v in &self.ids {
            used[v.index()] = true;
        }
        for i in 0..bound {
            if !used[i] {
                g.remove_vertex(VertexId(i as u32)).map_err(|e| e.to_string())?;
            }
        }
        for u in file_graph.vertices() {
            for &x in file_graph.neighbors(u) {
                if u < x {
                    g.add_edge(self.ids[u.index()], self.ids[x.index()]).map_err(|e| e.to_string())?;
                }
            }
        }
        Ok(g)
    }
}

/// `%weight W` followed by ascending 1-indexed ids.
pub fn format_solution<W: Weight>(weight: W, solution: &[VertexId]) -> String {
    let mut ids: Vec<VertexId> = solution.to_vec();
    ids.sort_unstable();
    let mut out = format!("%weight {weight}\n");
    for v in ids {
        writeln!(out, "{}", v.index() + 1).unwrap();
    }
    out
}

pub fn write_solution<W: Weight>(path: impl AsRef<Path>, weight: W, solution: &[VertexId]) -> io::Result<()> {
    fs::write(path, format_solution(weight, solution))
}

/// Solution file contents; the weight comment is optional on input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionFile<W> {
    pub weight: Option<W>,
    pub vertices: Vec<VertexId>,
}

pub fn parse_solution<W: Weight>(text: &str) -> Result<SolutionFile<W>, ParseError> {
    let mut weight = None;
    let mut vertices = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('%') {
            if let Some(w) = rest.trim().strip_prefix("weight") {
                let w = w.trim();
                weight = Some(w.parse::<W>().or_else(|_| syntax(no, format!("bad weight `{w}`")))?);
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let id: u32 = t.parse().or_else(|_| syntax(no, format!("bad vertex id `{t}`")))?;
        if id == 0 {
            return syntax(no, "vertex ids start at 1");
        }
        vertices.push(VertexId(id - 1));
    }
    Ok(SolutionFile { weight, vertices })
}

pub fn read_solution<W: Weight>(path: impl AsRef<Path>) -> Result<SolutionFile<W>, ParseError> {
    parse_solution(&fs::read_to_string(path)?)
}

/// Flat `key=value` record, one pair per line, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    entries: Vec<(String, String)>,
}

impl RunStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut s = RunStats::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return syntax(i + 1, "expected key=value");
            };
            s.push(k.trim(), v.trim());
        }
        Ok(s)
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.entries.iter().cloned().collect()
    }
}

/// Overwrites every weight with a uniform draw from `lo..=hi`.
pub fn assign_random_weights<W: Weight>(g: &mut DynGraph<W>, lo: u64, hi: u64, seed: u64) {
    assert!(lo >= 1 && hi >= lo, "weights must satisfy 1 <= lo <= hi");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for v in g.active_vertices() {
        let w = W::from_u64(rng.gen_range(lo..=hi)).expect("weight fits the weight type");
        g.set_weight(v, w).expect("active vertex");
    }
}

/// Family of random instances produced by `generate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    /// Each pair is an edge with probability `p`.
    Gnp(f64),
    Path,
    Cycle,
}

pub fn generate(kind: GraphKind, n: usize, lo: u64, hi: u64, seed: u64) -> DynGraph<u64> {
    let mut g = DynGraph::with_weights(&vec![1u64; n]);
    match kind {
        GraphKind::Gnp(p) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..n as u32 {
                for j in i + 1..n as u32 {
                    if rng.gen_bool(p) {
                        g.add_edge(VertexId(i), VertexId(j)).expect("fresh edge");
                    }
                }
            }
        }
        GraphKind::Path | GraphKind::Cycle => {
            for i in 1..n as u32 {
                g.add_edge(VertexId(i - 1), VertexId(i)).expect("fresh edge");
            }
            if kind == GraphKind::Cycle && n >= 3 {
                g.add_edge(VertexId(n as u32 - 1), VertexId(0)).expect("fresh edge");
            }
        }
    }
    assign_random_weights(&mut g, lo, hi, seed);
    g
}

/// Reads a whitespace-separated edge list (`#` and `%` comments), as used by
/// the SNAP collection. Vertex labels are remapped to `0..n` in order of
/// first appearance; duplicate edges and self-loops are dropped.
pub fn parse_edge_list<R: BufRead>(input: R) -> Result<DynGraph<u64>, ParseError> {
    let mut label: std::collections::HashMap<u64, u32> = std::collections::HashMap::new();
    let mut edges = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(a), Some(b)) = (it.next(), it.next()) else {
            return syntax(i + 1, "expected two vertex labels");
        };
        let a: u64 = a.parse().or_else(|_| syntax(i + 1, format!("bad label `{a}`")))?;
        let b: u64 = b.parse().or_else(|_| syntax(i + 1, format!("bad label `{b}`")))?;
        let next = label.len() as u32;
        let a = *label.entry(a).or_insert(next);
        let next = label.len() as u32;
        let b = *label.entry(b).or_insert(next);
        if a != b {
            edges.push((a.min(b), a.max(b)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(DynGraph::from_edges(&vec![1u64; label.len()], &edges))
}
