//! Retrieves lexicon terms from the bundled spherical-robot description.
//!
//!     cargo run --example extract_terms

use std::path::PathBuf;

use semnet::extract::{retrieve_terms, tokenize, LemmaMap, RetrievalOptions};
use semnet::kb::load_taxonomy_kb;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(fixture("spherical_robot.txt"))?;
    let kb = semnet::kb::load_embedding_kb(&fixture("embedding_kb.txt"))?;
    let sentences = tokenize(&text);

    let terms = retrieve_terms(&sentences, &kb, &RetrievalOptions::default());
    println!("{}: {}", kb.name(), terms.summary());
    for occ in terms.occurrences.iter().take(12) {
        println!(
            "  s{} t{:<3} n={} {:<28} {:?}",
            occ.sentence_index,
            occ.first_token_index,
            occ.n,
            occ.term,
            &text[occ.char_span.0..occ.char_span.1]
        );
    }

    // the taxonomy needs the lemma map to catch plurals
    let taxonomy = load_taxonomy_kb(&fixture("taxonomy_kb.tsv"))?;
    let lemmas = LemmaMap::parse(&std::fs::read_to_string(fixture("lemmas.tsv"))?);
    let options = RetrievalOptions { lemmas: Some(lemmas), ..RetrievalOptions::default() };
    let terms = retrieve_terms(&sentences, &taxonomy, &options);
    println!("{}: {}", taxonomy.name(), terms.summary());
    println!("  {}", terms.terms.join(", "));
    Ok(())
}
