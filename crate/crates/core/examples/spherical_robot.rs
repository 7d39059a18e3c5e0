//! The whole procedure on the bundled spherical-robot text: retrieve terms,
//! build the backbone network, lay it out and write an SVG.
//!
//!     cargo run --example spherical_robot -- robot.svg

use std::path::PathBuf;

use semnet::extract::{retrieve_terms, tokenize, RetrievalOptions};
use semnet::kb::load_embedding_kb;
use semnet::layout::{layout_graph, LayoutConfig};
use semnet::network::{backbone, build_similarity_matrix, graph_stats, BackboneConfig, GraphMeta};
use semnet::render::{to_svg, SvgStyle};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "spherical_robot.svg".into());
    let kb = load_embedding_kb(&fixture("embedding_kb.txt"))?;
    let text = std::fs::read_to_string(fixture("spherical_robot.txt"))?;

    let terms = retrieve_terms(&tokenize(&text), &kb, &RetrievalOptions::default());
    println!("terms: {}", terms.summary());

    let matrix = build_similarity_matrix(&terms, &kb)?;
    let config = BackboneConfig::new(2.0)?;
    let graph = backbone(&matrix, &config, GraphMeta::new(kb.name(), terms.n_terms, 2.0, 42));
    let stats = graph_stats(&graph);
    println!("network: {} nodes, {} edges ({} in the spanning tree)", stats.nodes, stats.edges, stats.mst_edges);

    let mut hubs: Vec<_> = graph.nodes.iter().collect();
    hubs.sort_by(|a, b| b.degree.cmp(&a.degree).then(a.id.cmp(&b.id)));
    let hubs: Vec<String> = hubs.iter().take(5).map(|n| format!("{} ({})", n.label, n.degree)).collect();
    println!("hubs: {}", hubs.join(", "));

    let layout = layout_graph(&graph, &LayoutConfig::default());
    std::fs::write(&out, to_svg(&graph, &layout, &SvgStyle::default())?)?;
    println!("layout: {} iterations; wrote {out}", layout.iterations_run);
    Ok(())
}
