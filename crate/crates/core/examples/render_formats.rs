//! Writes one small laid-out graph in every output format.
//!
//!     cargo run --example render_formats -- /tmp/triangle

use semnet::layout::{layout_graph, LayoutConfig};
use semnet::network::{GraphMeta, WeightedGraph};
use semnet::render::{to_dot, to_graphml, to_json, to_svg, SvgStyle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prefix = std::env::args().nth(1).unwrap_or_else(|| "triangle".into());
    let labels = ["spherical_shell", "robot", "pendulum", "battery"].map(String::from);
    let edges = [(0, 1, 0.9, true), (1, 2, 0.7, true), (0, 2, 0.4, false), (1, 3, 0.6, true)];
    let graph = WeightedGraph::from_edges(&labels, edges, GraphMeta::new("demo", 4, 2.0, 42));
    let layout = layout_graph(&graph, &LayoutConfig::default());

    let outputs = [
        ("json", to_json(&graph, Some(&layout))?),
        ("graphml", to_graphml(&graph, Some(&layout))?),
        ("dot", to_dot(&graph)),
        ("svg", to_svg(&graph, &layout, &SvgStyle::default())?),
    ];
    for (ext, text) in outputs {
        let path = format!("{prefix}.{ext}");
        std::fs::write(&path, text)?;
        println!("wrote {path}");
    }
    Ok(())
}
