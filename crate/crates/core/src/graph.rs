//! Immutable undirected simple graphs and vertex sets.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Dense vertex identifier, `0..n`.
pub type Vertex = usize;

/// Undirected simple graph over dense vertex ids with per-vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    labels: Vec<String>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices labelled `"0".."n-1"`. Duplicate edges
    /// are collapsed; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let labels = (0..n).map(|v| v.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::SelfLoop(labels[u].clone()));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        let mut seen = HashSet::with_capacity(n);
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::invalid(format!("duplicate vertex label `{label}`")));
            }
        }
        Ok(Graph {
            adj,
            labels,
            edge_count: edge_count / 2,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adj.len()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Map from label to dense id.
    pub fn label_index(&self) -> HashMap<&str, Vertex> {
        self.labels
            .iter()
            .enumerate()
            .map(|(v, l)| (l.as_str(), v))
            .collect()
    }

    pub fn full_set(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.vertex_count())
    }

    pub fn is_connected_graph(&self) -> bool {
        is_connected(self, &self.full_set())
    }

    /// Serializes as an edge-list TSV that [`load_graph`] reads back.
    /// Isolated vertices are written as single-field lines.
    pub fn to_edge_list(&self) -> String {
        // Each edge is written when its later endpoint comes up, so first
        // appearance in the output follows vertex order and reloading
        // reproduces the same ids.
        let mut out = String::new();
        for v in self.vertices() {
            let earlier: Vec<Vertex> = self.adj[v].iter().copied().take_while(|&u| u < v).collect();
            if earlier.is_empty() {
                out.push_str(&self.labels[v]);
                out.push('\n');
            }
            for u in earlier {
                out.push_str(&self.labels[u]);
                out.push('\t');
                out.push_str(&self.labels[v]);
                out.push('\n');
            }
        }
        out
    }
}

/// Set of vertices of a graph with `n` vertices, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet(bits)
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = Self::new(n);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    pub(crate) fn from_blocks(n: usize, blocks: &[usize]) -> Self {
        VertexSet(FixedBitSet::with_capacity_and_blocks(n, blocks.iter().copied()))
    }

    pub(crate) fn blocks(&self) -> &[usize] {
        self.0.as_slice()
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.set(v, false);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.minimum()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.0.union_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.0.difference_with(&other.0);
    }

    pub fn intersection_count(&self, other: &VertexSet) -> usize {
        self.0.intersection_count(&other.0)
    }

    pub fn difference_count(&self, other: &VertexSet) -> usize {
        self.0.difference_count(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    /// Compares member lists in sorted order, lexicographically; a proper
    /// prefix is smaller.
    pub fn cmp_lex(&self, other: &VertexSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Parses an edge-list TSV: one `u<TAB>v` pair per line, `#` comments and
/// blank lines skipped. A line with a single field declares an isolated
/// vertex. Labels are arbitrary tokens; when all of them are nonnegative
/// integers, dense ids follow numeric order, otherwise first appearance.
pub fn load_graph(text: &str) -> Result<Graph> {
    let mut order: Vec<String> = Vec::new();
    let mut ids: HashMap<String, Vertex> = HashMap::new();
    let mut raw_edges = Vec::new();
    let mut intern = |label: &str, order: &mut Vec<String>| -> Vertex {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = order.len();
        ids.insert(label.to_owned(), id);
        order.push(label.to_owned());
        id
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [v] => {
                intern(v, &mut order);
            }
            [u, v] => {
                if u == v {
                    return Err(Error::SelfLoop((*u).to_owned()));
                }
                let a = intern(u, &mut order);
                let b = intern(v, &mut order);
                raw_edges.push((a, b));
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected `u<TAB>v`, got {} fields", fields.len()),
                })
            }
        }
    }

    let numeric: Option<Vec<u64>> = order.iter().map(|l| l.parse::<u64>().ok()).collect();
    let (labels, remap) = match numeric {
        Some(values) => {
            let mut perm: Vec<usize> = (0..order.len()).collect();
            perm.sort_by_key(|&i| values[i]);
            let mut remap = vec![0; order.len()];
            for (new, &old) in perm.iter().enumerate() {
                remap[old] = new;
            }
            let labels = perm.iter().map(|&i| order[i].clone()).collect();
            (labels, remap)
        }
        None => {
            let remap = (0..order.len()).collect();
            (order, remap)
        }
    };
    Graph::with_labels(labels, raw_edges.into_iter().map(|(u, v)| (remap[u], remap[v])))
}

/// Whether `s` induces a connected subgraph. Empty sets and singletons are
/// connected.
pub fn is_connected(g: &Graph, s: &VertexSet) -> bool {
    let Some(start) = s.first() else {
        return true;
    };
    let target = s.len();
    let mut seen = VertexSet::new(g.vertex_count());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if s.contains(w) && !seen.contains(w) {
                seen.insert(w);
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == target
}
