//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semnet::layout::Layout;
use semnet::network::{GraphMeta, SimilarityMatrix, WeightedGraph};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("term_{i}")).collect()
}

/// Random symmetric matrix. With `levels = Some(k)` weights are multiples of
/// `1/k`, which makes ties common and every sum exact.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, levels: Option<u32>) -> SimilarityMatrix {
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = match levels {
                Some(k) => rng.random_range(0..=k) as f64 / k as f64,
                None => rng.random::<f64>(),
            };
            w[i * n + j] = x;
            w[j * n + i] = x;
        }
    }
    SimilarityMatrix::new(labels(n), w).unwrap()
}

/// Sum in a canonical order so equal edge multisets give identical totals.
pub fn canonical_sum(mut weights: Vec<f64>) -> f64 {
    weights.sort_by(|a, b| b.total_cmp(a));
    weights.into_iter().sum()
}

/// Decodes a Prüfer sequence into the edges of a labelled tree on `n` nodes.
fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Maximum total weight over all `n^(n-2)` labelled spanning trees.
pub fn brute_force_max_tree(m: &SimilarityMatrix) -> f64 {
    let n = m.n();
    if n < 2 {
        return 0.0;
    }
    let len = n - 2;
    let mut seq = vec![0; len];
    let mut best = f64::NEG_INFINITY;
    loop {
        let total = canonical_sum(prufer_edges(&seq, n).iter().map(|&(a, b)| m.get(a, b)).collect());
        best = best.max(total);
        // odometer increment
        let mut k = 0;
        while k < len {
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
        if k == len {
            return best;
        }
    }
}

pub fn count_trees(n: usize) -> usize {
    if n < 2 {
        1
    } else {
        n.pow((n - 2) as u32)
    }
}

/// A random taxonomy as plain data: synset lemma lists and IS-A edges.
pub struct RandomTaxonomy {
    pub synsets: Vec<Vec<String>>,
    pub edges: Vec<(usize, usize)>,
}

impl RandomTaxonomy {
    pub fn generate(rng: &mut ChaCha8Rng, max_synsets: usize) -> Self {
        let n = rng.random_range(1..=max_synsets);
        let pool = rng.random_range(n..=2 * n);
        let synsets = (0..n)
            .map(|_| {
                let k = rng.random_range(1..=3);
                let mut lemmas: Vec<String> = (0..k).map(|_| format!("w{}", rng.random_range(0..pool))).collect();
                lemmas.sort();
                lemmas.dedup();
                lemmas
            })
            .collect();
        let mut edges = Vec::new();
        let density = rng.random_range(0.0..0.3);
        for p in 0..n {
            for c in 0..n {
                if p != c && rng.random_bool(density) {
                    edges.push((p, c));
                }
            }
        }
        RandomTaxonomy { synsets, edges }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, lemmas) in self.synsets.iter().enumerate() {
            out.push_str(&format!("S\ts{i}\t{}\n", lemmas.join("|")));
        }
        for (p, c) in &self.edges {
            out.push_str(&format!("E\ts{p}\ts{c}\n"));
        }
        out
    }

    pub fn lemmas(&self) -> Vec<String> {
        let mut all: Vec<String> = self.synsets.iter().flatten().cloned().collect();
        all.sort();
        all.dedup();
        all
    }

    /// All-pairs undirected shortest paths (Floyd-Warshall).
    pub fn distances(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.synsets.len();
        let mut d = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(0);
        }
        for &(p, c) in &self.edges {
            d[p][c] = Some(1);
            d[c][p] = Some(1);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|cur| a + b < cur) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    /// `1 / (1 + d*)` over all synset pairs of the two lemmas, 0 if unreachable.
    pub fn path_similarity(&self, dist: &[Vec<Option<usize>>], a: &str, b: &str) -> f64 {
        let of = |l: &str| -> Vec<usize> {
            (0..self.synsets.len()).filter(|&s| self.synsets[s].iter().any(|x| x == l)).collect()
        };
        let mut best: Option<usize> = None;
        for sa in of(a) {
            for sb in of(b) {
                if let Some(d) = dist[sa][sb] {
                    best = Some(best.map_or(d, |cur: usize| cur.min(d)));
                }
            }
        }
        best.map_or(0.0, |d| 1.0 / (1.0 + d as f64))
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Random corpus over a small alphabet, split into sentences.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_tokens: usize) -> Vec<Vec<String>> {
    let total = rng.random_range(0..=max_tokens);
    let alphabet = rng.random_range(1..=12);
    let mut sentences = vec![Vec::new()];
    for _ in 0..total {
        if rng.random_bool(0.08) {
            sentences.push(Vec::new());
        }
        sentences.last_mut().unwrap().push(format!("t{}", rng.random_range(0..alphabet)));
    }
    sentences.retain(|s| !s.is_empty());
    sentences
}

/// Direct O(T * W) recount of ordered token-pair co-occurrences.
pub fn brute_force_pairs(sentences: &[Vec<String>], window: usize) -> HashMap<(String, String), u64> {
    let mut counts = HashMap::new();
    for s in sentences {
        for p in 0..s.len() {
            for q in (p + 1)..s.len().min(p + window + 1) {
                *counts.entry((s[p].clone(), s[q].clone())).or_insert(0) += 1;
                *counts.entry((s[q].clone(), s[p].clone())).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Random valid graph with random positions.
pub fn random_laid_out_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> (WeightedGraph, Layout) {
    let n = rng.random_range(1..=max_nodes);
    let mut labels: Vec<String> = (0..n).map(|i| format!("node {i}")).collect();
    if n > 1 {
        labels[1] = "R&D <\"quoted\">".to_string();
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(0.3) {
                edges.push((i, j, rng.random::<f64>(), rng.random_bool(0.5)));
            }
        }
    }
    let graph = WeightedGraph::from_edges(&labels, edges, GraphMeta::new("random", n, 2.0, 7));
    let positions = (0..n).map(|_| [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)]).collect();
    (graph, Layout { positions, iterations_run: 10, converged: false })
}

/// Element counts of a parsed XML document, keyed by local tag name.
pub fn xml_counts(doc: &str) -> Result<HashMap<String, usize>, roxmltree::Error> {
    let parsed = roxmltree::Document::parse(doc)?;
    let mut counts = HashMap::new();
    for node in parsed.descendants().filter(|n| n.is_element()) {
        *counts.entry(node.tag_name().name().to_string()).or_insert(0) += 1;
    }
    Ok(counts)
}
