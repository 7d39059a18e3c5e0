//! Pre-trained knowledge bases: lexicon membership and pairwise similarity.
//!
//! Two on-disk backends are supported. An embedding KB maps each term to a
//! dense vector and scores pairs by clamped cosine similarity. A taxonomy KB
//! groups lemmas into synsets joined by IS-A edges and scores pairs by the
//! path measure `1 / (1 + d)`, where `d` is the shortest undirected path
//! between any synset of one term and any synset of the other.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use parking_lot::RwLock;
use thiserror::Error;

/// Joins the tokens of a multiword term, e.g. `spherical_shell`.
pub const SEPARATOR: char = '_';

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("term not in lexicon: {0:?}")]
    UnknownTerm(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header {0:?}, expected \"<count> <dims>\"")]
    MalformedHeader(String),
    #[error("expected {expected} components, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("component {0:?} is not a finite number")]
    NonFinite(String),
    #[error("zero vector for term {0:?}")]
    ZeroVector(String),
    #[error("duplicate term {0:?}")]
    DuplicateTerm(String),
    #[error("header declares {declared} terms, file has {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("malformed record {0:?}")]
    MalformedRecord(String),
    #[error("duplicate synset {0:?}")]
    DuplicateSynset(String),
    #[error("synset {0:?} has no lemmas")]
    EmptySynset(String),
    #[error("edge references unknown synset {0:?}")]
    UnknownSynset(String),
    #[error("self-loop on synset {0:?}")]
    SelfLoop(String),
    #[error("empty knowledge base")]
    Empty,
}

fn parse_err(line: usize, kind: ParseErrorKind) -> KbError {
    KbError::Parse { line, kind }
}

/// Dense term vectors, stored row-major.
#[derive(Debug, Clone)]
pub struct EmbeddingKb {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    norms: Vec<f64>,
    dims: usize,
}

impl EmbeddingKb {
    /// Builds a KB from in-memory rows, enforcing the same invariants as the
    /// file loader. Errors carry the 1-based row number as their line.
    pub fn from_rows<I, S>(dims: usize, rows: I) -> Result<Self, KbError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut kb =
            EmbeddingKb { terms: Vec::new(), index: HashMap::new(), data: Vec::new(), norms: Vec::new(), dims };
        for (i, (term, vector)) in rows.into_iter().enumerate() {
            kb.push(i + 1, term.as_ref(), &vector)?;
        }
        Ok(kb)
    }

    fn push(&mut self, line: usize, term: &str, vector: &[f64]) -> Result<(), KbError> {
        if vector.len() != self.dims {
            return Err(parse_err(
                line,
                ParseErrorKind::DimensionMismatch { expected: self.dims, found: vector.len() },
            ));
        }
        if let Some(bad) = vector.iter().find(|c| !c.is_finite()) {
            return Err(parse_err(line, ParseErrorKind::NonFinite(bad.to_string())));
        }
        let term = term.to_lowercase();
        let norm = vector.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(parse_err(line, ParseErrorKind::ZeroVector(term)));
        }
        if self.index.contains_key(&term) {
            return Err(parse_err(line, ParseErrorKind::DuplicateTerm(term)));
        }
        self.index.insert(term.clone(), self.terms.len());
        self.terms.push(term);
        self.data.extend_from_slice(vector);
        self.norms.push(norm);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, ParseErrorKind::MalformedHeader(String::new())))?;
        let bad_header = || parse_err(1, ParseErrorKind::MalformedHeader(header.to_string()));
        let mut parts = header.split_whitespace();
        let count: usize = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad_header)?;
        let dims: usize = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad_header)?;
        if parts.next().is_some() || dims == 0 {
            return Err(bad_header());
        }

        let mut kb = EmbeddingKb {
            terms: Vec::with_capacity(count),
            index: HashMap::with_capacity(count),
            data: Vec::with_capacity(count * dims),
            norms: Vec::with_capacity(count),
            dims,
        };
        let mut vector = Vec::with_capacity(dims);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let term = fields.next().expect("non-blank line has a field");
            vector.clear();
            for field in fields {
                let value: f64 =
                    field.parse().map_err(|_| parse_err(line_no, ParseErrorKind::NonFinite(field.to_string())))?;
                vector.push(value);
            }
            kb.push(line_no, term, &vector)?;
        }
        if kb.terms.len() != count {
            return Err(parse_err(
                text.lines().count(),
                ParseErrorKind::CountMismatch { declared: count, found: kb.terms.len() },
            ));
        }
        Ok(kb)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.index.get(term).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    fn cosine(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self.row(a).iter().zip(self.row(b)).map(|(x, y)| x * y).sum();
        (dot / (self.norms[a] * self.norms[b])).clamp(0.0, 1.0)
    }

    /// Serializes in the loader's text format. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.terms.len(), self.dims);
        for (i, term) in self.terms.iter().enumerate() {
            out.push_str(term);
            for c in self.row(i) {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }
}

/// WordNet-style synsets connected by IS-A edges.
#[derive(Debug, Clone)]
pub struct TaxonomyKb {
    ids: Vec<String>,
    id_index: HashMap<String, usize>,
    lemmas: Vec<Vec<String>>,
    lemma_index: HashMap<String, Vec<usize>>,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
}

impl TaxonomyKb {
    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut kb = TaxonomyKb {
            ids: Vec::new(),
            id_index: HashMap::new(),
            lemmas: Vec::new(),
            lemma_index: HashMap::new(),
            edges: Vec::new(),
            neighbours: Vec::new(),
        };
        let mut seen_edges = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["S", id, lemmas] => {
                    let lemmas: Vec<&str> = lemmas.split('|').map(str::trim).filter(|l| !l.is_empty()).collect();
                    kb.add_synset(line_no, id.trim(), &lemmas)?;
                }
                ["S", id] => kb.add_synset(line_no, id.trim(), &[])?,
                ["E", parent, child] => {
                    let p = kb.lookup(line_no, parent.trim())?;
                    let c = kb.lookup(line_no, child.trim())?;
                    if p == c {
                        return Err(parse_err(line_no, ParseErrorKind::SelfLoop(kb.ids[p].clone())));
                    }
                    if seen_edges.insert((p, c)) {
                        kb.edges.push((p, c));
                        kb.neighbours[p].push(c);
                        kb.neighbours[c].push(p);
                    }
                }
                _ => return Err(parse_err(line_no, ParseErrorKind::MalformedRecord(line.to_string()))),
            }
        }
        Ok(kb)
    }

    fn add_synset(&mut self, line: usize, id: &str, lemmas: &[&str]) -> Result<(), KbError> {
        if id.is_empty() {
            return Err(parse_err(line, ParseErrorKind::MalformedRecord(id.to_string())));
        }
        if self.id_index.contains_key(id) {
            return Err(parse_err(line, ParseErrorKind::DuplicateSynset(id.to_string())));
        }
        if lemmas.is_empty() {
            return Err(parse_err(line, ParseErrorKind::EmptySynset(id.to_string())));
        }
        let s = self.ids.len();
        self.ids.push(id.to_string());
        self.id_index.insert(id.to_string(), s);
        let mut own = Vec::with_capacity(lemmas.len());
        for lemma in lemmas {
            let lemma = lemma.to_lowercase();
            let entry = self.lemma_index.entry(lemma.clone()).or_default();
            if !entry.contains(&s) {
                entry.push(s);
                own.push(lemma);
            }
        }
        self.lemmas.push(own);
        self.neighbours.push(Vec::new());
        Ok(())
    }

    fn lookup(&self, line: usize, id: &str) -> Result<usize, KbError> {
        self.id_index.get(id).copied().ok_or_else(|| parse_err(line, ParseErrorKind::UnknownSynset(id.to_string())))
    }

    pub fn synset_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.lemma_index.keys().map(String::as_str)
    }

    /// Synset ids that list `lemma`.
    pub fn synsets_of(&self, lemma: &str) -> Vec<&str> {
        self.lemma_index.get(lemma).map(|ss| ss.iter().map(|&s| self.ids[s].as_str()).collect()).unwrap_or_default()
    }

    /// Shortest undirected path length between any synset of `a` and any
    /// synset of `b`, or `None` when they lie in different components.
    pub fn distance(&self, a: &str, b: &str) -> Option<usize> {
        let sources = self.lemma_index.get(a)?;
        let targets = self.lemma_index.get(b)?;
        let mut dist = vec![usize::MAX; self.ids.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        let is_target = |s: usize| targets.contains(&s);
        while let Some(s) = queue.pop_front() {
            if is_target(s) {
                return Some(dist[s]);
            }
            for &n in &self.neighbours[s] {
                if dist[n] == usize::MAX {
                    dist[n] = dist[s] + 1;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, lemmas) in self.ids.iter().zip(&self.lemmas) {
            let _ = writeln!(out, "S\t{id}\t{}", lemmas.join("|"));
        }
        for &(p, c) in &self.edges {
            let _ = writeln!(out, "E\t{}\t{}", self.ids[p], self.ids[c]);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Embedding(EmbeddingKb),
    Taxonomy(TaxonomyKb),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KbKind {
    Embedding,
    Taxonomy,
}

impl std::fmt::Display for KbKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KbKind::Embedding => "embedding",
            KbKind::Taxonomy => "taxonomy",
        })
    }
}

/// A loaded knowledge base. Immutable after construction; similarity
/// answers are memoized behind a lock so the KB can be shared across threads.
#[derive(Debug)]
pub struct KnowledgeBase {
    name: String,
    backend: Backend,
    max_ngram: usize,
    memo: RwLock<HashMap<(String, String), f64>>,
}

impl KnowledgeBase {
    pub fn new(name: impl Into<String>, backend: Backend) -> Self {
        let max_ngram = match &backend {
            Backend::Embedding(e) => e.terms.iter().map(|t| ngram_len(t)).max(),
            Backend::Taxonomy(t) => t.lemma_index.keys().map(|l| ngram_len(l)).max(),
        }
        .unwrap_or(1);
        KnowledgeBase { name: name.into(), backend, max_ngram, memo: RwLock::new(HashMap::new()) }
    }

    pub fn load(path: &Path, kind: KbKind) -> Result<Self, KbError> {
        match kind {
            KbKind::Embedding => load_embedding_kb(path),
            KbKind::Taxonomy => load_taxonomy_kb(path),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn kind(&self) -> KbKind {
        match self.backend {
            Backend::Embedding(_) => KbKind::Embedding,
            Backend::Taxonomy(_) => KbKind::Taxonomy,
        }
    }

    /// Longest lexicon entry, in separator-delimited tokens.
    pub fn max_ngram(&self) -> usize {
        self.max_ngram
    }

    /// Number of lexicon entries.
    pub fn len(&self) -> usize {
        match &self.backend {
            Backend::Embedding(e) => e.len(),
            Backend::Taxonomy(t) => t.lemma_index.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact lexicon lookup. The caller normalizes (lowercase, `_` joins).
    pub fn contains(&self, term: &str) -> bool {
        match &self.backend {
            Backend::Embedding(e) => e.index.contains_key(term),
            Backend::Taxonomy(t) => t.lemma_index.contains_key(term),
        }
    }

    /// Association strength of two lexicon terms, in `[0, 1]`.
    pub fn similarity(&self, a: &str, b: &str) -> Result<f64, KbError> {
        for term in [a, b] {
            if !self.contains(term) {
                return Err(KbError::UnknownTerm(term.to_string()));
            }
        }
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&w) = self.memo.read().get(&(key.0.to_string(), key.1.to_string())) {
            return Ok(w);
        }
        let w = match &self.backend {
            Backend::Embedding(e) => e.cosine(e.index[key.0], e.index[key.1]),
            Backend::Taxonomy(t) => match t.distance(key.0, key.1) {
                Some(d) => 1.0 / (1.0 + d as f64),
                None => 0.0,
            },
        };
        self.memo.write().insert((key.0.to_string(), key.1.to_string()), w);
        Ok(w)
    }

    /// Re-serializes the backend in its own file format.
    pub fn to_text(&self) -> String {
        match &self.backend {
            Backend::Embedding(e) => e.to_text(),
            Backend::Taxonomy(t) => t.to_text(),
        }
    }
}

pub(crate) fn ngram_len(term: &str) -> usize {
    term.split(SEPARATOR).filter(|p| !p.is_empty()).count().max(1)
}

fn read(path: &Path) -> Result<String, KbError> {
    fs::read_to_string(path).map_err(|source| KbError::Io { path: path.to_path_buf(), source })
}

fn kb_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn load_embedding_kb(path: &Path) -> Result<KnowledgeBase, KbError> {
    let kb = EmbeddingKb::parse(&read(path)?)?;
    Ok(KnowledgeBase::new(kb_name(path), Backend::Embedding(kb)))
}

pub fn load_taxonomy_kb(path: &Path) -> Result<KnowledgeBase, KbError> {
    let kb = TaxonomyKb::parse(&read(path)?)?;
    if kb.ids.is_empty() {
        return Err(parse_err(1, ParseErrorKind::Empty));
    }
    Ok(KnowledgeBase::new(kb_name(path), Backend::Taxonomy(kb)))
}
