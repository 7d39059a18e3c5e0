//! Similarity matrices and the maximum-spanning-tree backbone filter.
//!
//! Edges are ranked by weight descending, then by the smaller endpoint id,
//! then by the larger one. Kruskal's algorithm walks that order to pick the
//! maximum spanning tree, and the backbone tops the tree up with the next
//! edges in the same order until it holds `round(m * N)` links (capped by the
//! complete graph).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::TermSet;
use crate::kb::{KbError, KnowledgeBase};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("no terms to connect")]
    Empty,
    #[error("weights must be an {n}x{n} matrix, got {len} entries")]
    Shape { n: usize, len: usize },
    #[error("weight ({i}, {j}) = {w} is outside [0, 1]")]
    OutOfRange { i: usize, j: usize, w: f64 },
    #[error("weights ({i}, {j}) and ({j}, {i}) differ")]
    Asymmetric { i: usize, j: usize },
    #[error("backbone multiplier must be a finite number >= 1, got {0}")]
    Multiplier(f64),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

/// Symmetric `N x N` association weights over labelled terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates shape, range and exact symmetry. The diagonal is ignored.
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self, NetworkError> {
        let n = labels.len();
        if weights.len() != n * n {
            return Err(NetworkError::Shape { n, len: weights.len() });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let w = weights[i * n + j];
                if !(0.0..=1.0).contains(&w) {
                    return Err(NetworkError::OutOfRange { i, j, w });
                }
                if w.to_bits() != weights[j * n + i].to_bits() {
                    return Err(NetworkError::Asymmetric { i, j });
                }
            }
        }
        Ok(SimilarityMatrix { labels, weights })
    }

    /// Builds a matrix from a weight function evaluated once per unordered pair.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> f64) -> Result<Self, NetworkError> {
        let n = labels.len();
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let w = f(i, j);
                weights[i * n + j] = w;
                weights[j * n + i] = w;
            }
        }
        Self::new(labels, weights)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n() + j]
    }

    /// All unordered pairs `(i, j, w)` with `i < j`, in ranking order.
    pub fn ranked_pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j, self.get(i, j)));
            }
        }
        pairs.sort_by(rank);
        pairs
    }
}

fn rank(a: &(usize, usize, f64), b: &(usize, usize, f64)) -> Ordering {
    b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1))
}

/// Pairwise KB similarity over the retrieved terms. Pairs are evaluated in
/// parallel; each entry depends only on its own pair.
pub fn build_similarity_matrix(terms: &TermSet, kb: &KnowledgeBase) -> Result<SimilarityMatrix, NetworkError> {
    let n = terms.terms.len();
    if n == 0 {
        return Err(NetworkError::Empty);
    }
    if let Some(missing) = terms.terms.iter().find(|t| !kb.contains(t)) {
        return Err(KbError::UnknownTerm(missing.clone()).into());
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| kb.similarity(&terms.terms[i], &terms.terms[j]))
        .collect::<Result<Vec<f64>, KbError>>()?;
    let mut weights = vec![0.0; n * n];
    for (&(i, j), w) in pairs.iter().zip(values) {
        weights[i * n + j] = w;
        weights[j * n + i] = w;
    }
    SimilarityMatrix::new(terms.terms.clone(), weights)
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Maximum spanning tree of the complete graph, as `(i, j, w)` with `i < j`
/// in the order Kruskal accepted them. `N - 1` edges; zero-weight edges are
/// admissible.
pub fn max_spanning_tree(matrix: &SimilarityMatrix) -> Vec<(usize, usize, f64)> {
    kruskal(matrix.n(), &matrix.ranked_pairs())
}

fn kruskal(n: usize, ranked: &[(usize, usize, f64)]) -> Vec<(usize, usize, f64)> {
    let mut sets = DisjointSet::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for &(i, j, w) in ranked {
        if tree.len() + 1 >= n {
            break;
        }
        if sets.union(i, j) {
            tree.push((i, j, w));
        }
    }
    tree
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackboneConfig {
    multiplier: f64,
}

impl BackboneConfig {
    pub fn new(multiplier: f64) -> Result<Self, NetworkError> {
        if multiplier.is_finite() && multiplier >= 1.0 {
            Ok(BackboneConfig { multiplier })
        } else {
            Err(NetworkError::Multiplier(multiplier))
        }
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    /// Total edge budget for `n` nodes: `round_half_up(m * n)`, at least the
    /// tree's `n - 1` and at most the complete graph's `n (n - 1) / 2`.
    pub fn target_edges(&self, n: usize) -> usize {
        let wanted = (self.multiplier * n as f64 + 0.5).floor() as usize;
        wanted.min(n * n.saturating_sub(1) / 2).max(n.saturating_sub(1))
    }
}

impl Default for BackboneConfig {
    fn default() -> Self {
        BackboneConfig { multiplier: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub label: String,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub mst: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutMeta {
    pub iterations_run: usize,
    pub converged: bool,
    pub seed: u64,
    pub iterations: usize,
    pub k_r: f64,
    pub k_g: f64,
    pub delta: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub kb: String,
    pub n_terms: usize,
    pub multiplier: f64,
    pub seed: u64,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutMeta>,
}

impl GraphMeta {
    pub fn new(kb: impl Into<String>, n_terms: usize, multiplier: f64, seed: u64) -> Self {
        GraphMeta {
            kb: kb.into(),
            n_terms,
            multiplier,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            layout: None,
        }
    }
}

/// Undirected backbone network over the retrieved terms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub meta: GraphMeta,
}

impl WeightedGraph {
    /// Assembles a graph from labels and `(i, j, w, mst)` edges, filling in
    /// node degrees and sorting edges by endpoint.
    pub fn from_edges(
        labels: &[String],
        edges: impl IntoIterator<Item = (usize, usize, f64, bool)>,
        meta: GraphMeta,
    ) -> Self {
        let mut nodes: Vec<Node> =
            labels.iter().enumerate().map(|(id, label)| Node { id, label: label.clone(), degree: 0 }).collect();
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|(i, j, weight, mst)| Edge { source: i.min(j), target: i.max(j), weight, mst })
            .collect();
        edges.sort_by_key(|e| (e.source, e.target));
        for e in &edges {
            nodes[e.source].degree += 1;
            nodes[e.target].degree += 1;
        }
        WeightedGraph { nodes, edges, meta }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Checks ids, self-loops, duplicate pairs, weight range and degrees.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |msg: String| Err(NetworkError::InvalidGraph(msg));
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return bad(format!("node at position {i} has id {}", node.id));
            }
        }
        let n = self.nodes.len();
        let mut degree = vec![0; n];
        let mut pairs = std::collections::HashSet::new();
        for e in &self.edges {
            if e.source >= n || e.target >= n {
                return bad(format!("edge ({}, {}) references a missing node", e.source, e.target));
            }
            if e.source == e.target {
                return bad(format!("self-loop on node {}", e.source));
            }
            if !pairs.insert((e.source.min(e.target), e.source.max(e.target))) {
                return bad(format!("duplicate edge ({}, {})", e.source, e.target));
            }
            if !(0.0..=1.0).contains(&e.weight) {
                return bad(format!("edge ({}, {}) weight {} outside [0, 1]", e.source, e.target, e.weight));
            }
            degree[e.source] += 1;
            degree[e.target] += 1;
        }
        for (node, d) in self.nodes.iter().zip(degree) {
            if node.degree != d {
                return bad(format!("node {} declares degree {} but has {d} edges", node.id, node.degree));
            }
        }
        Ok(())
    }
}

/// MST plus the strongest remaining links, up to `config.target_edges(N)`.
pub fn backbone(matrix: &SimilarityMatrix, config: &BackboneConfig, meta: GraphMeta) -> WeightedGraph {
    let n = matrix.n();
    let ranked = matrix.ranked_pairs();
    let tree = kruskal(n, &ranked);
    let target = config.target_edges(n);

    let mut in_tree = vec![false; ranked.len()];
    let mut t = 0;
    for (k, pair) in ranked.iter().enumerate() {
        if t < tree.len() && (pair.0, pair.1) == (tree[t].0, tree[t].1) {
            in_tree[k] = true;
            t += 1;
        }
    }
    let top_up = ranked
        .iter()
        .zip(&in_tree)
        .filter(|(_, &mst)| !mst)
        .map(|(&(i, j, w), _)| (i, j, w, false))
        .take(target - tree.len());
    let edges = tree.iter().map(|&(i, j, w)| (i, j, w, true)).chain(top_up);
    WeightedGraph::from_edges(matrix.labels(), edges, meta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub mst_edges: usize,
    pub density: f64,
    pub min_weight: Option<f64>,
    pub max_weight: Option<f64>,
    pub mean_weight: Option<f64>,
    /// degree -> number of nodes with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
    pub components: usize,
}

pub fn graph_stats(graph: &WeightedGraph) -> GraphStats {
    let n = graph.node_count();
    let m = graph.edge_count();
    let pairs = n * n.saturating_sub(1) / 2;
    let weights = graph.edges.iter().map(|e| e.weight);
    let mut sets = DisjointSet::new(n);
    let mut components = n;
    for e in &graph.edges {
        if sets.union(e.source, e.target) {
            components -= 1;
        }
    }
    let mut degree_histogram = BTreeMap::new();
    for node in &graph.nodes {
        *degree_histogram.entry(node.degree).or_insert(0) += 1;
    }
    GraphStats {
        nodes: n,
        edges: m,
        mst_edges: graph.edges.iter().filter(|e| e.mst).count(),
        density: if pairs == 0 { 0.0 } else { m as f64 / pairs as f64 },
        min_weight: weights.clone().reduce(f64::min),
        max_weight: weights.clone().reduce(f64::max),
        mean_weight: (m > 0).then(|| weights.sum::<f64>() / m as f64),
        degree_histogram,
        components,
    }
}
