//! Filters a random similarity matrix down to its maximum spanning tree plus
//! the strongest remaining links.
//!
//!     cargo run --example backbone -- 12 2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semnet::network::{backbone, graph_stats, BackboneConfig, GraphMeta, SimilarityMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(12), |a| a.parse())?;
    let multiplier: f64 = args.next().map_or(Ok(2.0), |a| a.parse())?;

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let upper: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
    let labels = (0..n).map(|i| format!("t{i}")).collect();
    let matrix = SimilarityMatrix::from_fn(labels, |i, j| upper[i.min(j) * n + i.max(j)])?;

    let config = BackboneConfig::new(multiplier)?;
    let graph = backbone(&matrix, &config, GraphMeta::new("random", n, multiplier, 42));
    println!(
        "N={n}: {} of {} possible edges kept (target {})",
        graph.edge_count(),
        n * (n - 1) / 2,
        config.target_edges(n)
    );
    for e in &graph.edges {
        println!("  {:>3} -- {:<3} {:.3}{}", e.source, e.target, e.weight, if e.mst { "  mst" } else { "" });
    }
    let stats = graph_stats(&graph);
    println!("components={} density={:.3} degrees={:?}", stats.components, stats.density, stats.degree_histogram);
    Ok(())
}
