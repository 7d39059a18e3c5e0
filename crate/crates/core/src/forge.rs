//! Builds a small embedding knowledge base from raw text.
//!
//! Tokens co-occurring within a sentence-bounded window are counted, the
//! counts are reweighted with positive pointwise mutual information, and the
//! PPMI rows are optionally compacted by a randomized truncated SVD.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::kb::SEPARATOR;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("co-occurrence counts are empty")]
    EmptyCounts,
    #[error("reduced dimension {dims} must be between 1 and {vocab}")]
    DimsOutOfRange { dims: usize, vocab: usize },
    #[error("every vector is zero")]
    AllZero,
    #[error("window must be at least 1")]
    Window,
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Multiword phrases joined into single tokens before counting.
#[derive(Debug, Clone, Default)]
pub struct Phrases {
    by_first: HashMap<String, Vec<Vec<String>>>,
}

impl Phrases {
    /// One phrase per line; tokens separated by whitespace or `_`.
    pub fn parse(text: &str) -> Self {
        Self::from_iter(text.lines())
    }

    fn insert(&mut self, phrase: &str) {
        let tokens: Vec<String> = phrase
            .split(|c: char| c.is_whitespace() || c == SEPARATOR)
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .collect();
        if tokens.len() < 2 {
            return;
        }
        let entry = self.by_first.entry(tokens[0].clone()).or_default();
        if !entry.contains(&tokens) {
            entry.push(tokens);
            entry.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        }
    }

    /// Greedy longest-match joining of one sentence.
    pub fn join(&self, sentence: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(sentence.len());
        let mut pos = 0;
        while pos < sentence.len() {
            let hit = self
                .by_first
                .get(&sentence[pos])
                .and_then(|cands| cands.iter().find(|p| sentence[pos..].starts_with(p)));
            match hit {
                Some(p) => {
                    out.push(p.join(&SEPARATOR.to_string()));
                    pos += p.len();
                }
                None => {
                    out.push(sentence[pos].clone());
                    pos += 1;
                }
            }
        }
        out
    }
}

impl<S: AsRef<str>> FromIterator<S> for Phrases {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut phrases = Phrases::default();
        for p in iter {
            phrases.insert(p.as_ref());
        }
        phrases
    }
}

/// Normalized token sentences of a text, as produced by the tokenizer.
pub fn corpus_sentences(text: &str) -> Vec<Vec<String>> {
    crate::extract::tokenize(text).into_iter().map(|s| s.into_iter().map(|t| t.normalized).collect()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceCounts {
    pub vocab: Vec<String>,
    /// Symmetric: row `i` maps `j` to the count of `(i, j)`.
    pub pair_counts: Vec<BTreeMap<usize, u64>>,
    /// Row sums of `pair_counts`.
    pub token_counts: Vec<u64>,
    pub total: u64,
}

impl CooccurrenceCounts {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.pair_counts[i].get(&j).copied().unwrap_or(0)
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.vocab.iter().position(|v| v == token)
    }
}

/// Counts each pair of tokens at distance `1..=window` within a sentence,
/// once in each orientation. Tokens seen fewer than `min_count` times are
/// left out of the vocabulary; they still occupy their positions.
pub fn count_cooccurrences(
    sentences: &[Vec<String>],
    window: usize,
    phrases: Option<&Phrases>,
    min_count: u64,
) -> Result<CooccurrenceCounts, ForgeError> {
    if window == 0 {
        return Err(ForgeError::Window);
    }
    let joined: Vec<Vec<String>> = match phrases {
        Some(p) => sentences.iter().map(|s| p.join(s)).collect(),
        None => sentences.to_vec(),
    };

    let mut frequency: HashMap<&str, u64> = HashMap::new();
    let mut first_seen = Vec::new();
    for token in joined.iter().flatten() {
        let f = frequency.entry(token).or_insert(0);
        if *f == 0 {
            first_seen.push(token.as_str());
        }
        *f += 1;
    }
    let vocab: Vec<String> = first_seen.into_iter().filter(|t| frequency[t] >= min_count).map(str::to_string).collect();
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();

    let mut pair_counts = vec![BTreeMap::new(); vocab.len()];
    for sentence in &joined {
        let ids: Vec<Option<usize>> = sentence.iter().map(|t| index.get(t.as_str()).copied()).collect();
        for (p, a) in ids.iter().enumerate() {
            let Some(a) = *a else { continue };
            for b in ids.iter().skip(p + 1).take(window).flatten() {
                *pair_counts[a].entry(*b).or_insert(0) += 1;
                *pair_counts[*b].entry(a).or_insert(0) += 1;
            }
        }
    }
    let token_counts: Vec<u64> = pair_counts.iter().map(|row| row.values().sum()).collect();
    let total = token_counts.iter().sum();
    Ok(CooccurrenceCounts { vocab, pair_counts, token_counts, total })
}

/// Sparse non-negative PPMI rows, one per vocabulary entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PpmiVectors {
    pub vocab: Vec<String>,
    /// `(column, value)` pairs sorted by column; zeros are omitted.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl PpmiVectors {
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.vocab.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        let n = self.vocab.len();
        self.rows
            .iter()
            .map(|row| {
                let mut v = vec![0.0; n];
                for &(j, x) in row {
                    v[j] = x;
                }
                v
            })
            .collect()
    }
}

/// `max(0, ln(total * c(w, c) / (c(w) * c(c))))` for every observed pair.
pub fn ppmi(counts: &CooccurrenceCounts) -> Result<PpmiVectors, ForgeError> {
    if counts.total == 0 {
        return Err(ForgeError::EmptyCounts);
    }
    let total = counts.total as f64;
    let rows = counts
        .pair_counts
        .iter()
        .enumerate()
        .map(|(w, row)| {
            row.iter()
                .filter_map(|(&c, &n)| {
                    let pmi = (total * n as f64 / (counts.token_counts[w] as f64 * counts.token_counts[c] as f64)).ln();
                    (pmi > 0.0).then_some((c, pmi))
                })
                .collect()
        })
        .collect();
    Ok(PpmiVectors { vocab: counts.vocab.clone(), rows })
}

/// Thin SVD `A ~ U diag(s) V^T`, singular values descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v_t: DMatrix<f64>,
}

impl Svd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.singular_values));
        &self.u * s * &self.v_t
    }
}

const OVERSAMPLE: usize = 8;
const POWER_ITERATIONS: usize = 2;

/// Rank-`k` randomized SVD: Gaussian sketch of width `k + 8`, two power
/// iterations with re-orthonormalization, then an exact SVD of the small
/// projected matrix.
pub fn randomized_svd(a: &DMatrix<f64>, k: usize, seed: u64) -> Svd {
    let (rows, cols) = a.shape();
    let width = (k + OVERSAMPLE).min(rows.min(cols));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::from_fn(cols, width, |_, _| StandardNormal.sample(&mut rng));

    let mut q = (a * omega).qr().q();
    for _ in 0..POWER_ITERATIONS {
        let z = (a.transpose() * &q).qr().q();
        q = (a * z).qr().q();
    }
    let b = q.transpose() * a;
    let svd = b.svd(true, true);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]).then(x.cmp(&y)));
    order.truncate(k);

    let u_small = svd.u.expect("u requested");
    let v_t_small = svd.v_t.expect("v_t requested");
    let u_small = DMatrix::from_fn(u_small.nrows(), order.len(), |r, c| u_small[(r, order[c])]);
    let v_t = DMatrix::from_fn(order.len(), cols, |r, c| v_t_small[(order[r], c)]);
    Svd { u: q * u_small, singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(), v_t }
}

/// Rows of `U_d diag(s_d)`: one `dims`-component vector per vocabulary entry.
pub fn reduce(vectors: &PpmiVectors, dims: usize, seed: u64) -> Result<Vec<Vec<f64>>, ForgeError> {
    let vocab = vectors.vocab.len();
    if dims == 0 || dims > vocab {
        return Err(ForgeError::DimsOutOfRange { dims, vocab });
    }
    let svd = randomized_svd(&vectors.dense(), dims, seed);
    let mut out = vec![vec![0.0; dims]; vocab];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate().take(svd.singular_values.len()) {
            *x = svd.u[(r, c)] * svd.singular_values[c];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteSummary {
    pub written: usize,
    pub dropped_zero: usize,
    pub dims: usize,
}

/// Embedding KB text for `vocab` and matching `rows`. Rows whose norm is
/// below the loader's zero threshold are dropped and counted. Spaces in
/// terms become the separator.
pub fn embedding_kb_text(vocab: &[String], rows: &[Vec<f64>]) -> Result<(String, WriteSummary), ForgeError> {
    let dims = rows.first().map_or(0, Vec::len);
    let keep: Vec<usize> =
        (0..vocab.len()).filter(|&i| rows[i].iter().map(|x| x * x).sum::<f64>().sqrt() >= 1e-12).collect();
    if keep.is_empty() {
        return Err(ForgeError::AllZero);
    }
    let mut out = format!("{} {dims}\n", keep.len());
    for &i in &keep {
        let term: Vec<&str> = vocab[i].split_whitespace().collect();
        out.push_str(&term.join(&SEPARATOR.to_string()));
        for x in &rows[i] {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    let summary = WriteSummary { written: keep.len(), dropped_zero: vocab.len() - keep.len(), dims };
    Ok((out, summary))
}

pub fn write_embedding_kb(vocab: &[String], rows: &[Vec<f64>], path: &Path) -> Result<WriteSummary, ForgeError> {
    let (text, summary) = embedding_kb_text(vocab, rows)?;
    std::fs::write(path, text).map_err(|source| ForgeError::Io { path: path.to_path_buf(), source })?;
    Ok(summary)
}
