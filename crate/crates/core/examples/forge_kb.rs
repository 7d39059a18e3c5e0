//! Forges an embedding knowledge base from the bundled corpus and queries it.
//!
//!     cargo run --example forge_kb -- 16

use std::path::PathBuf;

use semnet::forge::{corpus_sentences, count_cooccurrences, embedding_kb_text, ppmi, reduce, Phrases};
use semnet::kb::{Backend, EmbeddingKb, KnowledgeBase};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dims: usize = std::env::args().nth(1).map_or(Ok(16), |a| a.parse())?;
    let corpus = std::fs::read_to_string(fixture("forge_corpus.txt"))?;
    let phrases = Phrases::parse(&std::fs::read_to_string(fixture("forge_phrases.txt"))?);

    let counts = count_cooccurrences(&corpus_sentences(&corpus), 5, Some(&phrases), 1)?;
    let vectors = ppmi(&counts)?;
    let rows = reduce(&vectors, dims.min(vectors.vocab.len()), 42)?;
    let (text, summary) = embedding_kb_text(&vectors.vocab, &rows)?;
    println!(
        "vocab {} tokens, {} co-occurrences; wrote {} vectors of {} dims",
        counts.vocab.len(),
        counts.total,
        summary.written,
        summary.dims
    );

    let kb = KnowledgeBase::new("forged", Backend::Embedding(EmbeddingKb::parse(&text)?));
    let probe = "spherical_shell";
    let mut nearest: Vec<(f64, &str)> = vectors
        .vocab
        .iter()
        .filter(|t| *t != probe && kb.contains(t))
        .map(|t| (kb.similarity(probe, t).unwrap(), t.as_str()))
        .collect();
    nearest.sort_by(|a, b| b.0.total_cmp(&a.0));
    println!("nearest to {probe}:");
    for (s, t) in nearest.iter().take(8) {
        println!("  {t:<24} {s:.3}");
    }
    Ok(())
}
