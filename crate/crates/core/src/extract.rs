//! Tokenization and greedy longest-match retrieval of lexicon terms.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::kb::{KnowledgeBase, SEPARATOR};

/// Function words skipped as unigram matches.
pub const DEFAULT_STOPWORDS: &str = include_str!("../fixtures/stopwords.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub sentence_index: usize,
    pub token_index: usize,
    /// Byte offsets into the input text.
    pub char_span: (usize, usize),
}

fn is_sentence_end(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | ';')
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || is_joiner(c)
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits text into sentences of word tokens.
///
/// A sentence ends at `.`, `!`, `?` or `;` followed by whitespace or the end
/// of input. Tokens are maximal runs of letters, digits, hyphens and
/// apostrophes, with leading and trailing hyphens/apostrophes trimmed.
/// Sentences without tokens are dropped.
pub fn tokenize(text: &str) -> Vec<Vec<Token>> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut run_start: Option<usize> = None;

    let close_run = |start: usize, end: usize, current: &mut Vec<Token>, sentence: usize| {
        let run = &text[start..end];
        let trimmed = run.trim_matches(is_joiner);
        if trimmed.is_empty() {
            return;
        }
        let offset = start + (run.len() - run.trim_start_matches(is_joiner).len());
        current.push(Token {
            surface: trimmed.to_string(),
            normalized: trimmed.to_lowercase(),
            sentence_index: sentence,
            token_index: current.len(),
            char_span: (offset, offset + trimmed.len()),
        });
    };

    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if is_token_char(c) {
            run_start.get_or_insert(i);
            continue;
        }
        if let Some(start) = run_start.take() {
            close_run(start, i, &mut current, sentences.len());
        }
        if is_sentence_end(c) {
            let at_boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
            if at_boundary && !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
        }
    }
    if let Some(start) = run_start {
        close_run(start, text.len(), &mut current, sentences.len());
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermOccurrence {
    pub term: String,
    /// Length of the term in separator-delimited tokens.
    pub n: usize,
    #[serde(rename = "sentence")]
    pub sentence_index: usize,
    #[serde(rename = "token")]
    pub first_token_index: usize,
    #[serde(rename = "span")]
    pub char_span: (usize, usize),
}

/// Provenance recorded alongside a retrieved term set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSetMeta {
    pub kb: String,
    pub max_n: usize,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSet {
    pub n_terms: usize,
    pub terms: Vec<String>,
    pub occurrences: Vec<TermOccurrence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<TermSetMeta>,
}

impl TermSet {
    /// Unique terms grouped by token length; index 0 holds unigrams.
    pub fn ngram_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; 3];
        for term in &self.terms {
            let n = crate::kb::ngram_len(term);
            if counts.len() < n {
                counts.resize(n, 0);
            }
            counts[n - 1] += 1;
        }
        counts
    }

    /// One-line `unigrams=.. bigrams=.. trigrams=..` summary.
    pub fn summary(&self) -> String {
        let counts = self.ngram_counts();
        let mut parts: Vec<String> = counts
            .iter()
            .enumerate()
            .map(|(i, c)| match i {
                0 => format!("unigrams={c}"),
                1 => format!("bigrams={c}"),
                2 => format!("trigrams={c}"),
                _ => format!("{}-grams={c}", i + 1),
            })
            .collect();
        parts.insert(0, format!("N={}", self.n_terms));
        parts.join(" ")
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("term set serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Lowercased stopwords. Parses one word per line; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.as_ref().to_lowercase()).collect())
    }
}

/// Surface form to lexicon form, e.g. `seals -> seal`.
#[derive(Debug, Clone, Default)]
pub struct LemmaMap(HashMap<String, String>);

fn normalize_phrase(s: &str) -> String {
    s.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(&SEPARATOR.to_string())
}

impl LemmaMap {
    /// Tab-separated `surface<TAB>lemma` lines. Multiword entries may use
    /// spaces or `_`. Lines without a tab are ignored.
    pub fn parse(text: &str) -> Self {
        LemmaMap(
            text.lines()
                .filter_map(|l| l.split_once('\t'))
                .map(|(s, l)| (normalize_phrase(s), normalize_phrase(l)))
                .filter(|(s, l)| !s.is_empty() && !l.is_empty())
                .collect(),
        )
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.0.get(surface).map(String::as_str)
    }
}

impl<S: AsRef<str>> FromIterator<(S, S)> for LemmaMap {
    fn from_iter<I: IntoIterator<Item = (S, S)>>(iter: I) -> Self {
        LemmaMap(iter.into_iter().map(|(s, l)| (normalize_phrase(s.as_ref()), normalize_phrase(l.as_ref()))).collect())
    }
}

#[derive(Debug, Clone)]
pub struct RetrievalOptions {
    pub max_n: usize,
    pub stopwords: Stopwords,
    pub lemmas: Option<LemmaMap>,
}

impl Default for RetrievalOptions {
    fn default() -> Self {
        RetrievalOptions { max_n: 3, stopwords: Stopwords::english(), lemmas: None }
    }
}

fn resolve(kb: &KnowledgeBase, joined: &str, lemmas: Option<&LemmaMap>) -> Option<String> {
    let lookup = |candidate: &str| -> Option<String> {
        if kb.contains(candidate) {
            return Some(candidate.to_string());
        }
        let lemma = lemmas?.get(candidate)?;
        kb.contains(lemma).then(|| lemma.to_string())
    };
    lookup(joined)
        .or_else(|| joined.contains('-').then(|| joined.replace('-', &SEPARATOR.to_string())).and_then(|h| lookup(&h)))
}

/// Retrieves the lexicon terms of `sentences`.
///
/// Each sentence is scanned left to right. At every position the longest
/// window (up to `min(max_n, kb.max_ngram())` tokens) that resolves to a
/// lexicon entry wins and the scan resumes after it. A window resolves when
/// its `_`-joined form is in the lexicon, or its lemma-map image is, or the
/// same holds after replacing hyphens with `_`. Single-token stopword
/// matches are skipped.
pub fn retrieve_terms(sentences: &[Vec<Token>], kb: &KnowledgeBase, options: &RetrievalOptions) -> TermSet {
    let max_window = options.max_n.min(kb.max_ngram()).max(1);
    let mut occurrences = Vec::new();
    let sep = SEPARATOR.to_string();

    for sentence in sentences {
        let mut pos = 0;
        while pos < sentence.len() {
            let longest = max_window.min(sentence.len() - pos);
            let mut matched = None;
            for width in (1..=longest).rev() {
                let window = &sentence[pos..pos + width];
                if width == 1 && options.stopwords.contains(&window[0].normalized) {
                    continue;
                }
                let joined = window.iter().map(|t| t.normalized.as_str()).collect::<Vec<_>>().join(&sep);
                let Some(term) = resolve(kb, &joined, options.lemmas.as_ref()) else {
                    continue;
                };
                let n = crate::kb::ngram_len(&term);
                if n > options.max_n || (n == 1 && options.stopwords.contains(&term)) {
                    continue;
                }
                matched = Some((term, n, width));
                break;
            }
            match matched {
                Some((term, n, width)) => {
                    let first = &sentence[pos];
                    let last = &sentence[pos + width - 1];
                    occurrences.push(TermOccurrence {
                        term,
                        n,
                        sentence_index: first.sentence_index,
                        first_token_index: first.token_index,
                        char_span: (first.char_span.0, last.char_span.1),
                    });
                    pos += width;
                }
                None => pos += 1,
            }
        }
    }

    let mut seen = HashSet::new();
    let terms: Vec<String> =
        occurrences.iter().filter(|o| seen.insert(o.term.clone())).map(|o| o.term.clone()).collect();
    TermSet { n_terms: terms.len(), terms, occurrences, meta: None }
}
