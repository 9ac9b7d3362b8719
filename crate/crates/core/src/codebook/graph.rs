//! Transition graphs, pair legality and maximum-clique search.

use crate::bus_model::TransitionSymbol;
use crate::classification::WindowClassifier;

use super::{Codebook, ConstraintConfig};

/// Per-wire transitions from `u` to `v`, wire 1 first.
pub fn transition_symbols(u: u64, v: u64, width: usize) -> Vec<TransitionSymbol> {
    (1..=width)
        .map(|i| {
            let shift = width - i;
            TransitionSymbol::from_bits((u >> shift) & 1 == 1, (v >> shift) & 1 == 1)
        })
        .collect()
}

/// True when the transition `u → v` keeps every middle window within Ci and
/// both edge windows within jC. Needs `width >= 4`.
pub fn pair_legal(
    u: u64,
    v: u64,
    width: usize,
    constraint: ConstraintConfig,
    classifier: &WindowClassifier,
) -> bool {
    assert!(width >= 4, "pair legality needs at least four wires");
    let s = transition_symbols(u, v, width);
    for k in 2..width.saturating_sub(2) {
        let window = [s[k - 2], s[k - 1], s[k], s[k + 1], s[k + 2]];
        if !classifier.middle(&window).within(constraint.middle) {
            return false;
        }
    }
    let left = [s[0], s[1], s[2], s[3]];
    let right = [s[width - 1], s[width - 2], s[width - 3], s[width - 4]];
    classifier.side(&left).within(constraint.side)
        && classifier.side(&right).within(constraint.side)
}

/// Ordered pairs of distinct codewords whose transition breaks the constraint.
pub fn codebook_violations(
    cb: &Codebook,
    constraint: ConstraintConfig,
    classifier: &WindowClassifier,
) -> Vec<(u64, u64)> {
    let words = cb.values();
    let mut bad = Vec::new();
    for &u in words {
        for &v in words {
            if u != v && !pair_legal(u, v, cb.width(), constraint, classifier) {
                bad.push((u, v));
            }
        }
    }
    bad
}

/// Undirected graph on at most 64 nodes, adjacency as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    adj: Vec<u64>,
}

impl TransitionGraph {
    pub fn empty(nodes: usize) -> Self {
        assert!(nodes <= 64, "at most 64 nodes");
        Self {
            adj: vec![0; nodes],
        }
    }

    pub fn complete(nodes: usize) -> Self {
        let mut g = Self::empty(nodes);
        let all = mask(nodes);
        for (i, a) in g.adj.iter_mut().enumerate() {
            *a = all & !(1 << i);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a] |= 1 << b;
            self.adj[b] |= 1 << a;
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|a| a.count_ones() as usize)
            .sum::<usize>()
            / 2
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Graph over all `width`-bit words, edges between legal transitions.
pub fn build_transition_graph(
    width: usize,
    constraint: ConstraintConfig,
    classifier: &WindowClassifier,
) -> TransitionGraph {
    assert!(
        (4..=6).contains(&width),
        "graph search is limited to 4..=6 bits"
    );
    let n = 1usize << width;
    let mut g = TransitionGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if pair_legal(u as u64, v as u64, width, constraint, classifier) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

pub fn build_transition_graph_5(
    constraint: ConstraintConfig,
    classifier: &WindowClassifier,
) -> TransitionGraph {
    build_transition_graph(5, constraint, classifier)
}

/// Every clique of maximum size, each sorted, the list sorted.
/// Bron–Kerbosch with pivoting, pruned by the best size found so far.
pub fn max_cliques(graph: &TransitionGraph) -> Vec<Vec<u64>> {
    let mut search = CliqueSearch {
        adj: &graph.adj,
        best: 0,
        found: Vec::new(),
    };
    search.expand(0, mask(graph.nodes()), 0);
    let mut out: Vec<Vec<u64>> = search
        .found
        .into_iter()
        .map(|r| (0..64).filter(|i| r >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

struct CliqueSearch<'a> {
    adj: &'a [u64],
    best: u32,
    found: Vec<u64>,
}

impl CliqueSearch<'_> {
    fn expand(&mut self, r: u64, mut p: u64, mut x: u64) {
        let size = r.count_ones();
        if size + p.count_ones() < self.best {
            return;
        }
        if p == 0 {
            if x == 0 {
                if size > self.best {
                    self.best = size;
                    self.found.clear();
                }
                self.found.push(r);
            }
            return;
        }
        let pivot = bits(p | x)
            .max_by_key(|&u| (p & self.adj[u]).count_ones())
            .expect("p is non-empty");
        for v in bits(p & !self.adj[pivot]).collect::<Vec<_>>() {
            let nv = self.adj[v];
            self.expand(r | 1 << v, p & nv, x & nv);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
}

fn bits(mut set: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (set != 0).then(|| {
            let i = set.trailing_zeros() as usize;
            set &= set - 1;
            i
        })
    })
}
