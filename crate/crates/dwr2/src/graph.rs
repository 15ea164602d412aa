//! Device connectivity graphs and spanning-tree layouts.
//!
//! A weight-`w` measurement compiles onto a connected component that has at
//! least `w + 2` vertices and admits a spanning tree whose leaves are
//! exactly the physical qubits. The search for such a tree is a
//! deterministic backtracking over edges, sized for desk-scale graphs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    InvalidVertex(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("physical qubits span more than one connected component")]
    NotConnected,
    #[error("component has {found} vertices but a weight-{w} measurement needs at least {needed}")]
    TooFewQubits { found: usize, w: usize, needed: usize },
    #[error("no spanning tree with exactly the requested leaves exists")]
    NoValidTree,
    #[error("{0}")]
    BadParameters(String),
}

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl ConnectivityGraph {
    pub fn new(vertex_count: usize) -> Self {
        ConnectivityGraph {
            vertex_count,
            edges: BTreeSet::new(),
        }
    }

    pub fn with_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(vertex_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for &x in &[u, v] {
            if x >= self.vertex_count {
                return Err(GraphError::InvalidVertex(x, self.vertex_count));
            }
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Connected component containing `v`, sorted.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for nb in self.neighbors(u) {
                if !seen[nb] {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
        (0..self.vertex_count).filter(|&u| seen[u]).collect()
    }

    /// Graph file format: `qubits N`, `edge u v`, optional `physical i j ...`,
    /// `#` comments. Returns the graph and the physical list if present.
    pub fn parse(text: &str) -> Result<(ConnectivityGraph, Option<Vec<usize>>), GraphError> {
        let perr = |line: usize, msg: String| GraphError::Parse { line, msg };
        let mut graph: Option<ConnectivityGraph> = None;
        let mut physical: Option<Vec<usize>> = None;
        for (ln, raw) in text.lines().enumerate() {
            let lineno = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            match head {
                "qubits" => {
                    if graph.is_some() {
                        return Err(perr(lineno, "duplicate qubits line".into()));
                    }
                    if rest.len() != 1 {
                        return Err(perr(lineno, "expected: qubits N".into()));
                    }
                    let n = rest[0]
                        .parse()
                        .map_err(|_| perr(lineno, format!("invalid count {:?}", rest[0])))?;
                    graph = Some(ConnectivityGraph::new(n));
                }
                "edge" => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| perr(lineno, "edge before qubits line".into()))?;
                    if rest.len() != 2 {
                        return Err(perr(lineno, "expected: edge u v".into()));
                    }
                    let u: usize = rest[0]
                        .parse()
                        .map_err(|_| perr(lineno, format!("invalid vertex {:?}", rest[0])))?;
                    let v: usize = rest[1]
                        .parse()
                        .map_err(|_| perr(lineno, format!("invalid vertex {:?}", rest[1])))?;
                    g.add_edge(u, v)
                        .map_err(|e| perr(lineno, e.to_string()))?;
                }
                "physical" => {
                    let idx: Result<Vec<usize>, _> = rest
                        .iter()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| perr(lineno, format!("invalid vertex {t:?}")))
                        })
                        .collect();
                    physical = Some(idx?);
                }
                other => return Err(perr(lineno, format!("unknown directive {other:?}"))),
            }
        }
        let graph = graph.ok_or(GraphError::Parse {
            line: 1,
            msg: "missing qubits line".into(),
        })?;
        Ok((graph, physical))
    }

    pub fn serialize(&self, physical: Option<&[usize]>) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.vertex_count).unwrap();
        for (u, v) in self.edges() {
            writeln!(s, "edge {u} {v}").unwrap();
        }
        if let Some(phys) = physical {
            let list: Vec<String> = phys.iter().map(|q| q.to_string()).collect();
            writeln!(s, "physical {}", list.join(" ")).unwrap();
        }
        s
    }
}

/// A spanning tree of one component, split into leaves (physical qubits),
/// their parents, and the remaining internal vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLayout {
    vertices: Vec<usize>,
    tree_edges: BTreeSet<(usize, usize)>,
    leaves: Vec<usize>,
    parents: BTreeSet<usize>,
    internal: BTreeSet<usize>,
}

impl TreeLayout {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.tree_edges.iter().copied()
    }

    /// Physical qubits, in the order they were requested.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn parents(&self) -> &BTreeSet<usize> {
        &self.parents
    }

    pub fn internal(&self) -> &BTreeSet<usize> {
        &self.internal
    }

    /// Parents and internal vertices together, sorted.
    pub fn auxiliaries(&self) -> Vec<usize> {
        self.parents.iter().chain(self.internal.iter()).copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.leaves.contains(&v)
    }

    pub fn tree_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .tree_edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// The unique tree neighbor of a leaf.
    pub fn parent_of(&self, leaf: usize) -> usize {
        debug_assert!(self.is_leaf(leaf));
        self.tree_neighbors(leaf)[0]
    }

    /// Leaves adjacent to `p`, sorted.
    pub fn children_of(&self, p: usize) -> Vec<usize> {
        self.tree_neighbors(p)
            .into_iter()
            .filter(|&v| self.is_leaf(v))
            .collect()
    }
}

/// Finds a spanning tree of the component containing `leaves` in which
/// exactly the given vertices have tree-degree 1.
///
/// Deterministic backtracking over the sorted edge list, include-first; a
/// designated leaf never takes a second edge and every other vertex must
/// finish with degree >= 2.
pub fn find_spanning_tree_with_leaves(
    g: &ConnectivityGraph,
    leaves: &[usize],
) -> Result<TreeLayout, GraphError> {
    if leaves.is_empty() {
        return Err(GraphError::BadParameters("no leaves requested".into()));
    }
    let mut leaf_set = BTreeSet::new();
    for &l in leaves {
        if l >= g.vertex_count() {
            return Err(GraphError::InvalidVertex(l, g.vertex_count()));
        }
        if !leaf_set.insert(l) {
            return Err(GraphError::BadParameters(format!(
                "physical qubit {l} listed twice"
            )));
        }
    }
    let comp = g.component_of(leaves[0]);
    if leaves.iter().any(|l| !comp.contains(l)) {
        return Err(GraphError::NotConnected);
    }

    // remap component vertices to 0..m
    let mut slot = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in comp.iter().enumerate() {
        slot[v] = i;
    }
    let m = comp.len();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| slot[u] != usize::MAX && slot[v] != usize::MAX)
        .map(|(u, v)| (slot[u], slot[v]))
        .collect();
    let is_leaf: Vec<bool> = comp.iter().map(|v| leaf_set.contains(v)).collect();
    if m >= 2 && is_leaf.iter().all(|&b| b) {
        return Err(GraphError::NoValidTree);
    }

    // remaining incident-edge counts, for degree-feasibility pruning
    let mut remaining = vec![0usize; m];
    for &(u, v) in &edges {
        remaining[u] += 1;
        remaining[v] += 1;
    }

    struct Search {
        edges: Vec<(usize, usize)>,
        is_leaf: Vec<bool>,
        m: usize,
        deg: Vec<usize>,
        remaining: Vec<usize>,
        dsu: Vec<usize>,
        chosen: Vec<(usize, usize)>,
    }

    impl Search {
        fn root(&mut self, mut v: usize) -> usize {
            while self.dsu[v] != v {
                self.dsu[v] = self.dsu[self.dsu[v]];
                v = self.dsu[v];
            }
            v
        }

        fn feasible(&self, v: usize) -> bool {
            let need = if self.is_leaf[v] { 1 } else { 2 };
            self.deg[v] + self.remaining[v] >= need
        }

        fn run(&mut self, i: usize) -> bool {
            if self.chosen.len() == self.m - 1 {
                return (0..self.m).all(|v| {
                    if self.is_leaf[v] {
                        self.deg[v] == 1
                    } else {
                        self.deg[v] >= 2
                    }
                });
            }
            if i == self.edges.len() {
                return false;
            }
            let (u, v) = self.edges[i];
            self.remaining[u] -= 1;
            self.remaining[v] -= 1;

            // include, unless it closes a cycle or over-fills a leaf
            let ru = self.root(u);
            let rv = self.root(v);
            let leaf_full = (self.is_leaf[u] && self.deg[u] == 1)
                || (self.is_leaf[v] && self.deg[v] == 1)
                || (self.is_leaf[u] && self.is_leaf[v] && self.m > 2);
            if ru != rv && !leaf_full {
                self.dsu[ru] = rv;
                self.deg[u] += 1;
                self.deg[v] += 1;
                self.chosen.push((u, v));
                if self.run(i + 1) {
                    return true;
                }
                self.chosen.pop();
                self.deg[u] -= 1;
                self.deg[v] -= 1;
                // undo union by rebuilding (cheap at this scale)
                self.dsu = (0..self.m).collect();
                let chosen = self.chosen.clone();
                for (a, b) in chosen {
                    let ra = self.root(a);
                    let rb = self.root(b);
                    self.dsu[ra] = rb;
                }
            }

            // exclude, if both endpoints can still reach their degree targets
            if self.feasible(u) && self.feasible(v) && self.run(i + 1) {
                return true;
            }
            self.remaining[u] += 1;
            self.remaining[v] += 1;
            false
        }
    }

    if m == 1 {
        return Err(GraphError::NoValidTree);
    }
    let mut search = Search {
        edges,
        is_leaf,
        m,
        deg: vec![0; m],
        remaining,
        dsu: (0..m).collect(),
        chosen: Vec::new(),
    };
    if !search.run(0) {
        return Err(GraphError::NoValidTree);
    }
    let tree_edges: BTreeSet<(usize, usize)> = search
        .chosen
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (comp[u], comp[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    let mut parents = BTreeSet::new();
    for &l in leaves {
        for &(a, b) in &tree_edges {
            if a == l {
                parents.insert(b);
            } else if b == l {
                parents.insert(a);
            }
        }
    }
    let internal: BTreeSet<usize> = comp
        .iter()
        .copied()
        .filter(|v| !leaf_set.contains(v) && !parents.contains(v))
        .collect();
    Ok(TreeLayout {
        vertices: comp,
        tree_edges,
        leaves: leaves.to_vec(),
        parents,
        internal,
    })
}

/// Checks the necessary conditions for compiling a weight-`w` measurement
/// on `physical` and returns the layout to compile on.
///
/// Requires `w > 2`, all physical qubits in one component, component size
/// at least `w + 2` (so at least two auxiliary qubits), and a spanning
/// tree with exactly the physical qubits as leaves.
pub fn validate_for_dwr(
    g: &ConnectivityGraph,
    physical: &[usize],
) -> Result<TreeLayout, GraphError> {
    let w = physical.len();
    if w <= 2 {
        return Err(GraphError::BadParameters(format!(
            "weight must exceed 2, got {w}"
        )));
    }
    let set: BTreeSet<usize> = physical.iter().copied().collect();
    if set.len() != w {
        return Err(GraphError::BadParameters(
            "physical qubits must be distinct".into(),
        ));
    }
    for &q in physical {
        if q >= g.vertex_count() {
            return Err(GraphError::InvalidVertex(q, g.vertex_count()));
        }
    }
    let comp = g.component_of(physical[0]);
    if physical.iter().any(|q| !comp.contains(q)) {
        return Err(GraphError::NotConnected);
    }
    if comp.len() < w + 2 {
        return Err(GraphError::TooFewQubits {
            found: comp.len(),
            w,
            needed: w + 2,
        });
    }
    find_spanning_tree_with_leaves(g, physical)
}

/// Two-auxiliary graph: vertex `w+1` serves physical qubits 1 and `w-1`,
/// vertex `w` serves the rest, and the two auxiliaries share an edge.
pub fn constant_space_graph(w: usize) -> Result<ConnectivityGraph, GraphError> {
    check_w(w)?;
    let a = w;
    let b = w + 1;
    let mut g = ConnectivityGraph::new(w + 2);
    g.add_edge(a, b)?;
    g.add_edge(b, 1)?;
    g.add_edge(b, w - 1)?;
    for q in 0..w {
        if q != 1 && q != w - 1 {
            g.add_edge(a, q)?;
        }
    }
    Ok(g)
}

/// One auxiliary per physical qubit, auxiliaries chained along a line.
pub fn depth5_graph(w: usize) -> Result<ConnectivityGraph, GraphError> {
    check_w(w)?;
    let mut g = ConnectivityGraph::new(2 * w);
    for i in 0..w {
        g.add_edge(i, w + i)?;
    }
    for i in 0..w - 1 {
        g.add_edge(w + i, w + i + 1)?;
    }
    Ok(g)
}

/// `ceil(w/2)` auxiliaries, each serving two consecutive physical qubits
/// (the last one serves a single qubit when `w` is odd).
pub fn depth6_graph(w: usize) -> Result<ConnectivityGraph, GraphError> {
    check_w(w)?;
    let na = w.div_ceil(2);
    let mut g = ConnectivityGraph::new(w + na);
    for j in 0..na {
        g.add_edge(w + j, 2 * j)?;
        if 2 * j + 1 < w {
            g.add_edge(w + j, 2 * j + 1)?;
        }
    }
    for j in 0..na.saturating_sub(1) {
        g.add_edge(w + j, w + j + 1)?;
    }
    Ok(g)
}

/// Interpolating family on `a` auxiliaries: physical qubit `p` connects to
/// auxiliary `w + ((p+1) mod a)` and the auxiliaries form a line.
///
/// Indices are the 0-based translation of the 1-based construction
/// "connect node i with node w+1+(i mod a)".
pub fn interpolating_graph(w: usize, a: usize) -> Result<ConnectivityGraph, GraphError> {
    check_w(w)?;
    if a < 2 || a > w {
        return Err(GraphError::BadParameters(format!(
            "auxiliary count must satisfy 2 <= a <= w, got a={a}, w={w}"
        )));
    }
    let mut g = ConnectivityGraph::new(w + a);
    for p in 0..w {
        g.add_edge(p, w + ((p + 1) % a))?;
    }
    for j in 0..a - 1 {
        g.add_edge(w + j, w + j + 1)?;
    }
    Ok(g)
}

fn check_w(w: usize) -> Result<(), GraphError> {
    if w <= 2 {
        return Err(GraphError::BadParameters(format!(
            "weight must exceed 2, got {w}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive spanning-tree oracle: tries every (m-1)-subset of edges.
    fn enumerate_trees_with_leaves(
        g: &ConnectivityGraph,
        leaves: &[usize],
    ) -> Vec<BTreeSet<(usize, usize)>> {
        let comp = g.component_of(leaves[0]);
        let m = comp.len();
        let edges: Vec<(usize, usize)> = g
            .edges()
            .filter(|&(u, v)| comp.contains(&u) && comp.contains(&v))
            .collect();
        let leaf_set: BTreeSet<usize> = leaves.iter().copied().collect();
        let mut found = Vec::new();
        let k = m - 1;
        if edges.len() < k {
            return found;
        }
        // iterate over bitmasks with popcount k
        for mask in 0u64..(1u64 << edges.len()) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let chosen: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            // acyclic + spanning via union-find
            let mut dsu: std::collections::HashMap<usize, usize> =
                comp.iter().map(|&v| (v, v)).collect();
            fn root(dsu: &mut std::collections::HashMap<usize, usize>, mut v: usize) -> usize {
                while dsu[&v] != v {
                    v = dsu[&v];
                }
                v
            }
            let mut ok = true;
            for &(u, v) in &chosen {
                let ru = root(&mut dsu, u);
                let rv = root(&mut dsu, v);
                if ru == rv {
                    ok = false;
                    break;
                }
                dsu.insert(ru, rv);
            }
            if !ok {
                continue;
            }
            let mut deg: std::collections::HashMap<usize, usize> = Default::default();
            for &(u, v) in &chosen {
                *deg.entry(u).or_default() += 1;
                *deg.entry(v).or_default() += 1;
            }
            let leaves_match = comp.iter().all(|&v| {
                let d = deg.get(&v).copied().unwrap_or(0);
                if leaf_set.contains(&v) {
                    d == 1
                } else {
                    d >= 2
                }
            });
            if leaves_match {
                found.push(chosen.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect());
            }
        }
        found
    }

    #[test]
    fn constant_space_counts() {
        let g = constant_space_graph(4).unwrap();
        assert_eq!(g.vertex_count(), 6);
        // 2 edges into b, w-2 into a, plus (a, b)
        assert_eq!(g.edge_count(), 5);
        let g = constant_space_graph(6).unwrap();
        assert_eq!(g.degree(6), 5);
        assert_eq!(g.degree(7), 3);
        let g = constant_space_graph(3).unwrap();
        assert_eq!(g.neighbors(3), vec![0, 4]);
        assert_eq!(g.neighbors(4), vec![1, 2, 3]);
    }

    #[test]
    fn depth5_counts() {
        let g = depth5_graph(3).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 5));
        let g = depth5_graph(5).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 9));
        assert!((0..5).all(|q| g.degree(q) == 1));
    }

    #[test]
    fn depth6_counts() {
        let g = depth6_graph(4).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.children(4), vec![0, 1]);
        let g = depth6_graph(5).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.children(7), vec![4]);
        let g = depth6_graph(6).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 8));
    }

    impl ConnectivityGraph {
        fn children(&self, aux: usize) -> Vec<usize> {
            // test helper: neighbors below the physical/aux split
            self.neighbors(aux)
                .into_iter()
                .filter(|&v| self.degree(v) == 1)
                .collect()
        }
    }

    #[test]
    fn interpolating_child_distribution() {
        let g = interpolating_graph(6, 3).unwrap();
        for aux in 6..9 {
            assert_eq!(g.children(aux).len(), 2);
        }
        let g = interpolating_graph(6, 2).unwrap();
        assert_eq!(g.children(6), vec![1, 3, 5]);
        assert_eq!(g.children(7), vec![0, 2, 4]);
    }

    #[test]
    fn interpolating_w4_a4_isomorphic_to_depth5() {
        let g1 = interpolating_graph(4, 4).unwrap();
        let g2 = depth5_graph(4).unwrap();
        assert!(isomorphic(&g1, &g2));
    }

    fn isomorphic(g1: &ConnectivityGraph, g2: &ConnectivityGraph) -> bool {
        // brute force over permutations, pruned by degree sequence
        if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
            return false;
        }
        let n = g1.vertex_count();
        let mut d1: Vec<usize> = (0..n).map(|v| g1.degree(v)).collect();
        let mut d2: Vec<usize> = (0..n).map(|v| g2.degree(v)).collect();
        d1.sort_unstable();
        d2.sort_unstable();
        if d1 != d2 {
            return false;
        }
        let mut perm = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn place(
            v: usize,
            g1: &ConnectivityGraph,
            g2: &ConnectivityGraph,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let n = g1.vertex_count();
            if v == n {
                return g1
                    .edges()
                    .all(|(a, b)| g2.has_edge(perm[a], perm[b]));
            }
            for img in 0..n {
                if used[img] || g1.degree(v) != g2.degree(img) {
                    continue;
                }
                let consistent = (0..v).all(|u| {
                    g1.has_edge(u, v) == g2.has_edge(perm[u], img)
                });
                if !consistent {
                    continue;
                }
                perm[v] = img;
                used[img] = true;
                if place(v + 1, g1, g2, perm, used) {
                    return true;
                }
                used[img] = false;
                perm[v] = usize::MAX;
            }
            false
        }
        place(0, g1, g2, &mut perm, &mut used)
    }

    #[test]
    fn spanning_tree_when_graph_is_a_tree() {
        let g = interpolating_graph(6, 3).unwrap();
        let layout = find_spanning_tree_with_leaves(&g, &(0..6).collect::<Vec<_>>()).unwrap();
        let tree: BTreeSet<_> = layout.tree_edges().collect();
        let all: BTreeSet<_> = g.edges().collect();
        assert_eq!(tree, all);
        assert_eq!(layout.parents().len(), 3);
        assert!(layout.internal().is_empty());
    }

    #[test]
    fn spanning_tree_in_k5() {
        let mut g = ConnectivityGraph::new(5);
        for u in 0..5 {
            for v in u + 1..5 {
                g.add_edge(u, v).unwrap();
            }
        }
        let layout = find_spanning_tree_with_leaves(&g, &[0, 1, 2]).unwrap();
        for l in [0, 1, 2] {
            assert_eq!(layout.tree_neighbors(l).len(), 1);
        }
        for v in [3, 4] {
            assert!(layout.tree_neighbors(v).len() >= 2);
        }
        assert!(!enumerate_trees_with_leaves(&g, &[0, 1, 2]).is_empty());
    }

    #[test]
    fn cycle_c4_has_no_three_leaf_tree() {
        let g = ConnectivityGraph::with_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(
            find_spanning_tree_with_leaves(&g, &[0, 1, 2]),
            Err(GraphError::NoValidTree)
        );
        assert!(enumerate_trees_with_leaves(&g, &[0, 1, 2]).is_empty());
    }

    #[test]
    fn search_agrees_with_enumeration_on_small_graphs() {
        let cases: Vec<(ConnectivityGraph, Vec<usize>)> = vec![
            (constant_space_graph(4).unwrap(), (0..4).collect()),
            (depth6_graph(5).unwrap(), (0..5).collect()),
            (
                ConnectivityGraph::with_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap(),
                vec![0, 1, 2],
            ),
            (
                ConnectivityGraph::with_edges(
                    6,
                    [(0, 3), (1, 3), (2, 4), (3, 4), (4, 5), (3, 5), (0, 4)],
                )
                .unwrap(),
                vec![0, 1, 2],
            ),
        ];
        for (g, leaves) in cases {
            let oracle = enumerate_trees_with_leaves(&g, &leaves);
            match find_spanning_tree_with_leaves(&g, &leaves) {
                Ok(layout) => {
                    let tree: BTreeSet<_> = layout.tree_edges().collect();
                    assert!(
                        oracle.contains(&tree),
                        "search result not among enumerated trees"
                    );
                }
                Err(GraphError::NoValidTree) => assert!(oracle.is_empty()),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn validate_rejects_small_component() {
        // star: center 0, spokes 1..=4; physical = spokes needs 6 vertices
        let g = ConnectivityGraph::with_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(
            validate_for_dwr(&g, &[1, 2, 3, 4]),
            Err(GraphError::TooFewQubits {
                found: 5,
                w: 4,
                needed: 6
            })
        );
    }

    #[test]
    fn validate_accepts_constant_space_graph() {
        let g = constant_space_graph(6).unwrap();
        let layout = validate_for_dwr(&g, &(0..6).collect::<Vec<_>>()).unwrap();
        assert_eq!(layout.auxiliaries(), vec![6, 7]);
    }

    #[test]
    fn validate_rejects_path_with_internal_physical() {
        let g = ConnectivityGraph::with_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(
            validate_for_dwr(&g, &[0, 1, 2]),
            Err(GraphError::NoValidTree)
        );
    }

    #[test]
    fn validate_rejects_disconnected_physical() {
        let g = ConnectivityGraph::with_edges(6, [(0, 1), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(
            validate_for_dwr(&g, &[0, 2, 3]),
            Err(GraphError::NotConnected)
        );
    }

    #[test]
    fn graph_file_round_trip_and_errors() {
        let g = constant_space_graph(4).unwrap();
        let text = g.serialize(Some(&[0, 1, 2, 3]));
        let (back, phys) = ConnectivityGraph::parse(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(phys, Some(vec![0, 1, 2, 3]));

        assert!(matches!(
            ConnectivityGraph::parse("qubits 2\nedge 0 5\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ConnectivityGraph::parse("edge 0 1\n"),
            Err(GraphError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ConnectivityGraph::parse("qubits 3\nedge 1 1\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }
}
