//! Runs ForceAtlas2 on a ring with chords and reports how the speed settles.
//!
//!     cargo run --example layout

use semnet::layout::{run, LayoutConfig};
use semnet::network::{GraphMeta, WeightedGraph};

fn main() {
    let n = 24;
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges =
        (0..n).map(|i| (i, (i + 1) % n, 1.0, true)).chain((0..n).step_by(6).map(|i| (i, (i + 12) % n, 0.5, false)));
    let edges = edges.map(|(a, b, w, mst)| (a.min(b), a.max(b), w, mst));
    let graph = WeightedGraph::from_edges(&labels, edges, GraphMeta::new("ring", n, 2.0, 42));

    let config = LayoutConfig::default();
    let layout = run(&graph, &config, |step| {
        let it = step.state.iteration;
        if it <= 5 || it % 100 == 0 {
            println!("iteration {it:>3}: speed {:>9.4}  max displacement {:.5}", step.speed, step.max_displacement());
        }
    });
    println!("stopped after {} iterations (converged: {})", layout.iterations_run, layout.converged);
    for (label, p) in labels.iter().zip(&layout.positions).take(6) {
        println!("  {label:<4} ({:>8.3}, {:>8.3})", p[0], p[1]);
    }
}
