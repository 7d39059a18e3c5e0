//! Loads both bundled knowledge bases and prints a few pairwise similarities.
//!
//!     cargo run --example kb_similarity

use std::path::PathBuf;

use semnet::kb::{load_embedding_kb, load_taxonomy_kb, KnowledgeBase};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn show(kb: &KnowledgeBase, pairs: &[(&str, &str)]) {
    println!("{} ({} backend, {} terms, longest term {} words)", kb.name(), kb.kind(), kb.len(), kb.max_ngram());
    for (a, b) in pairs {
        match kb.similarity(a, b) {
            Ok(s) => println!("  {a:>24} ~ {b:<24} {s:.4}"),
            Err(e) => println!("  {a:>24} ~ {b:<24} ({e})"),
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = [("robot", "mobile_robot"), ("spherical_shell", "body"), ("robot", "battery"), ("robot", "teapot")];
    show(&load_embedding_kb(&fixture("embedding_kb.txt"))?, &pairs);
    show(&load_taxonomy_kb(&fixture("taxonomy_kb.tsv"))?, &pairs);
    Ok(())
}
