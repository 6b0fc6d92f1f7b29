use struction::{Graph, VertexId};

/// Independent exact solver for graphs beyond the bitmask oracle: plain
/// include/exclude branching on a maximum degree vertex with a weight-sum
/// bound. Returns the optimum and a witness in the ids of `g`.
pub fn exact(g: &Graph) -> (u64, Vec<VertexId>) {
    let ids = g.active_vertices();
    let n = ids.len();
    let words = n.div_ceil(64).max(1);
    let mut local = vec![usize::MAX; g.id_bound()];
    for (i, v) in ids.iter().enumerate() {
        local[v.index()] = i;
    }
    let mut adj = vec![vec![0u64; words]; n];
    for (i, &v) in ids.iter().enumerate() {
        for u in g.neighbors(v) {
            let j = local[u.index()];
            adj[i][j / 64] |= 1 << (j % 64);
        }
    }
    let mut s = Exact {
        adj,
        w: ids.iter().map(|&v| g.weight(v)).collect(),
        best: None,
        best_set: Vec::new(),
        cur: Vec::new(),
    };
    let mut all = vec![0u64; words];
    for i in 0..n {
        all[i / 64] |= 1 << (i % 64);
    }
    s.search(all, 0);
    let mut set: Vec<VertexId> = s.best_set.iter().map(|&i| ids[i]).collect();
    set.sort_unstable();
    (s.best.unwrap_or(0), set)
}

struct Exact {
    adj: Vec<Vec<u64>>,
    w: Vec<u64>,
    best: Option<u64>,
    best_set: Vec<usize>,
    cur: Vec<usize>,
}

impl Exact {
    fn members(mask: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &word) in mask.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                out.push(k * 64 + rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
        }
        out
    }

    fn search(&mut self, mask: Vec<u64>, weight: u64) {
        let members = Self::members(&mask);
        let rest: u64 = members.iter().map(|&i| self.w[i]).sum();
        if self.best.is_some_and(|b| weight + rest <= b) {
            return;
        }
        let mut pick = None;
        let mut pick_deg = 0;
        for &i in &members {
            let deg: u32 = self.adj[i].iter().zip(&mask).map(|(a, m)| (a & m).count_ones()).sum();
            if deg > pick_deg {
                pick = Some(i);
                pick_deg = deg;
            }
        }
        let Some(v) = pick else {
            self.best = Some(weight + rest);
            self.best_set = self.cur.iter().copied().chain(members).collect();
            return;
        };
        let mut with = mask.clone();
        for (m, a) in with.iter_mut().zip(&self.adj[v]) {
            *m &= !a;
        }
        with[v / 64] &= !(1 << (v % 64));
        self.cur.push(v);
        self.search(with, weight + self.w[v]);
        self.cur.pop();
        let mut without = mask;
        without[v / 64] &= !(1 << (v % 64));
        self.search(without, weight);
    }
}
