//! Bipartite and general-graph cardinality matchings.

use std::collections::VecDeque;

/// Bipartite graph with left vertices `0..left` (agents) and right vertices
/// `0..right` (bundles).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub right: usize,
    /// Sorted right neighbours of each left vertex.
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph { right, adj: vec![Vec::new(); left] }
    }

    pub fn from_predicate(left: usize, right: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let adj = (0..left).map(|x| (0..right).filter(|&y| edge(x, y)).collect()).collect();
        BipartiteGraph { right, adj }
    }

    pub fn left(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, x: usize, y: usize) {
        if let Err(pos) = self.adj[x].binary_search(&y) {
            self.adj[x].insert(pos, y);
        }
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[x].binary_search(&y).is_ok()
    }
}

/// A matching as `(left, right)` pairs sorted by left vertex.
pub type Pairs = Vec<(usize, usize)>;

fn augment(g: &BipartiteGraph, x: usize, seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
    for &y in &g.adj[x] {
        if seen[y] {
            continue;
        }
        seen[y] = true;
        if match_right[y].is_none_or(|x2| augment(g, x2, seen, match_right)) {
            match_right[y] = Some(x);
            return true;
        }
    }
    false
}

/// Maximum-cardinality matching by augmenting paths, scanning left
/// vertices and their neighbours in ascending order.
pub fn max_bipartite_matching(g: &BipartiteGraph) -> Pairs {
    let mut match_right = vec![None; g.right];
    for x in 0..g.left() {
        let mut seen = vec![false; g.right];
        augment(g, x, &mut seen, &mut match_right);
    }
    let mut pairs: Pairs = match_right.iter().enumerate().filter_map(|(y, x)| x.map(|x| (x, y))).collect();
    pairs.sort_unstable();
    pairs
}

/// Every unmatched left vertex has no edge into a matched right vertex.
pub fn is_envy_free(g: &BipartiteGraph, pairs: &[(usize, usize)]) -> bool {
    let mut left_matched = vec![false; g.left()];
    let mut right_matched = vec![false; g.right];
    for &(x, y) in pairs {
        if left_matched[x] || right_matched[y] || !g.has_edge(x, y) {
            return false;
        }
        left_matched[x] = true;
        right_matched[y] = true;
    }
    (0..g.left()).all(|x| left_matched[x] || g.adj[x].iter().all(|&y| !right_matched[y]))
}

/// Maximum-cardinality envy-free matching with respect to the left side.
///
/// Takes a maximum matching and drops every left vertex reachable from an
/// unmatched left vertex by an alternating path.
pub fn envy_free_matching(g: &BipartiteGraph) -> Pairs {
    let pairs = max_bipartite_matching(g);
    let mut match_left = vec![None; g.left()];
    let mut match_right = vec![None; g.right];
    for &(x, y) in &pairs {
        match_left[x] = Some(y);
        match_right[y] = Some(x);
    }
    let mut reached = vec![false; g.left()];
    let mut queue: VecDeque<usize> = (0..g.left()).filter(|&x| match_left[x].is_none()).collect();
    for &x in &queue {
        reached[x] = true;
    }
    let mut seen_right = vec![false; g.right];
    while let Some(x) = queue.pop_front() {
        for &y in &g.adj[x] {
            if std::mem::replace(&mut seen_right[y], true) {
                continue;
            }
            if let Some(x2) = match_right[y] {
                if !reached[x2] {
                    reached[x2] = true;
                    queue.push_back(x2);
                }
            }
        }
    }
    pairs.into_iter().filter(|&(x, _)| !reached[x]).collect()
}

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b && !self.adj[a].contains(&b) {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }
}

struct Blossom<'a> {
    g: &'a Graph,
    mate: Vec<Option<usize>>,
    parent: Vec<Option<usize>>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut on_path = vec![false; self.g.len()];
        loop {
            a = self.base[a];
            on_path[a] = true;
            match self.mate[a] {
                Some(m) => a = self.parent[m].expect("matched vertex on an alternating tree has a parent"),
                None => break,
            }
        }
        loop {
            b = self.base[b];
            if on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b].expect("path reaches the root")].expect("alternating tree parent");
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v].expect("blossom path vertices are matched");
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = Some(child);
            child = m;
            v = self.parent[m].expect("alternating tree parent");
        }
    }

    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.g.len();
        self.used = vec![false; n];
        self.parent = vec![None; n];
        self.base = (0..n).collect();
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.g.adj[v].len() {
                let to = self.g.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == Some(to) {
                    continue;
                }
                let to_is_outer = to == root || self.mate[to].is_some_and(|m| self.parent[m].is_some());
                if to_is_outer {
                    let cur = self.lca(v, to);
                    self.in_blossom = vec![false; n];
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to].is_none() {
                    self.parent[to] = Some(v);
                    match self.mate[to] {
                        None => return Some(to),
                        Some(m) => {
                            self.used[m] = true;
                            self.queue.push_back(m);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Maximum-cardinality matching in a general graph (Edmonds' blossom
/// algorithm). Returns pairs `(a, b)` with `a < b`, sorted.
pub fn max_general_matching(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.len();
    let mut st = Blossom {
        g,
        mate: vec![None; n],
        parent: vec![None; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for root in 0..n {
        if st.mate[root].is_some() {
            continue;
        }
        if let Some(mut v) = st.find_path(root) {
            loop {
                let pv = st.parent[v].expect("augmenting path");
                let ppv = st.mate[pv];
                st.mate[v] = Some(pv);
                st.mate[pv] = Some(v);
                match ppv {
                    Some(next) => v = next,
                    None => break,
                }
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> =
        (0..n).filter_map(|a| st.mate[a].filter(|&b| a < b).map(|b| (a, b))).collect();
    pairs.sort_unstable();
    pairs
}
