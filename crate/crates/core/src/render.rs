//! JSON, GraphML, DOT and SVG output for backbone graphs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::Layout;
use crate::network::{Edge, GraphMeta, NetworkError, Node, WeightedGraph};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("layout has {positions} positions but the graph has {nodes} nodes")]
    LayoutMismatch { nodes: usize, positions: usize },
    #[error("cannot draw an empty graph")]
    EmptyGraph,
    #[error("layout coordinates must be finite")]
    NonFinite,
    #[error("graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph document: {0}")]
    Schema(String),
    #[error(transparent)]
    Graph(#[from] NetworkError),
}

fn check_layout(graph: &WeightedGraph, layout: Option<&Layout>) -> Result<(), RenderError> {
    match layout {
        Some(l) if l.positions.len() != graph.node_count() => {
            Err(RenderError::LayoutMismatch { nodes: graph.node_count(), positions: l.positions.len() })
        }
        Some(l) if l.positions.iter().flatten().any(|c| !c.is_finite()) => Err(RenderError::NonFinite),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    label: String,
    degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphDocument {
    directed: bool,
    meta: GraphMeta,
    nodes: Vec<NodeRecord>,
    edges: Vec<Edge>,
}

/// Graph JSON. With a layout, nodes gain `x`/`y` and the caller is expected
/// to have recorded the run in `graph.meta.layout`.
pub fn to_json(graph: &WeightedGraph, layout: Option<&Layout>) -> Result<String, RenderError> {
    check_layout(graph, layout)?;
    let doc = GraphDocument {
        directed: false,
        meta: graph.meta.clone(),
        nodes: graph
            .nodes
            .iter()
            .map(|n| {
                let p = layout.map(|l| l.positions[n.id]);
                NodeRecord {
                    id: n.id,
                    label: n.label.clone(),
                    degree: n.degree,
                    x: p.map(|p| p[0]),
                    y: p.map(|p| p[1]),
                }
            })
            .collect(),
        edges: graph.edges.clone(),
    };
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

/// Parses graph JSON, validating the graph and returning the layout when
/// every node carries coordinates.
pub fn from_json(text: &str) -> Result<(WeightedGraph, Option<Layout>), RenderError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    if doc.directed {
        return Err(RenderError::Schema("directed graphs are not supported".into()));
    }
    let with_xy = doc.nodes.iter().filter(|n| n.x.is_some() && n.y.is_some()).count();
    if with_xy != 0 && with_xy != doc.nodes.len() {
        return Err(RenderError::Schema("some nodes lack x/y coordinates".into()));
    }
    let layout = (with_xy > 0 || (doc.nodes.is_empty() && doc.meta.layout.is_some())).then(|| Layout {
        positions: doc.nodes.iter().map(|n| [n.x.unwrap(), n.y.unwrap()]).collect(),
        iterations_run: doc.meta.layout.as_ref().map_or(0, |l| l.iterations_run),
        converged: doc.meta.layout.as_ref().is_some_and(|l| l.converged),
    });
    let graph = WeightedGraph {
        nodes: doc.nodes.into_iter().map(|n| Node { id: n.id, label: n.label, degree: n.degree }).collect(),
        edges: doc.edges,
        meta: doc.meta,
    };
    graph.validate()?;
    Ok((graph, layout))
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn to_graphml(graph: &WeightedGraph, layout: Option<&Layout>) -> Result<String, RenderError> {
    check_layout(graph, layout)?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, domain, ty) in [
        ("kb", "graph", "string"),
        ("seed", "graph", "long"),
        ("multiplier", "graph", "double"),
        ("label", "node", "string"),
        ("degree", "node", "int"),
        ("x", "node", "double"),
        ("y", "node", "double"),
        ("weight", "edge", "double"),
        ("mst", "edge", "boolean"),
    ] {
        let _ = writeln!(out, "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>");
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    let meta = &graph.meta;
    let _ = writeln!(out, "    <data key=\"kb\">{}</data>", escape_xml(&meta.kb));
    let _ = writeln!(out, "    <data key=\"seed\">{}</data>", meta.seed);
    let _ = writeln!(out, "    <data key=\"multiplier\">{}</data>", meta.multiplier);
    for node in &graph.nodes {
        let _ = write!(
            out,
            "    <node id=\"n{}\"><data key=\"label\">{}</data><data key=\"degree\">{}</data>",
            node.id,
            escape_xml(&node.label),
            node.degree
        );
        if let Some(l) = layout {
            let [x, y] = l.positions[node.id];
            let _ = write!(out, "<data key=\"x\">{x}</data><data key=\"y\">{y}</data>");
        }
        out.push_str("</node>\n");
    }
    for (k, e) in graph.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{k}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data><data key=\"mst\">{}</data></edge>",
            e.source, e.target, e.weight, e.mst
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok(out)
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

pub fn to_dot(graph: &WeightedGraph) -> String {
    let mut out = String::from("graph semnet {\n");
    let _ = writeln!(out, "  label=\"{}\";", escape_dot(&graph.meta.kb));
    for node in &graph.nodes {
        let _ = writeln!(out, "  {} [label=\"{}\", degree={}];", node.id, escape_dot(&node.label), node.degree);
    }
    for e in &graph.edges {
        let _ = writeln!(out, "  {} -- {} [weight={}, mst={}];", e.source, e.target, e.weight, e.mst);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub margin_fraction: f64,
    pub node_radius_base: f64,
    pub node_radius_scale: f64,
    pub edge_width_base: f64,
    pub edge_width_scale: f64,
    pub mst_opacity: f64,
    pub non_mst_opacity: f64,
    pub font_size: f64,
    pub canvas_width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            margin_fraction: 0.05,
            node_radius_base: 4.0,
            node_radius_scale: 2.0,
            edge_width_base: 0.5,
            edge_width_scale: 2.5,
            mst_opacity: 0.9,
            non_mst_opacity: 0.5,
            font_size: 10.0,
            canvas_width: 1200.0,
        }
    }
}

impl SvgStyle {
    pub fn node_radius(&self, degree: usize) -> f64 {
        self.node_radius_base + self.node_radius_scale * (degree as f64).sqrt()
    }

    pub fn edge_width(&self, weight: f64) -> f64 {
        self.edge_width_base + self.edge_width_scale * weight
    }
}

/// Square drawing of the laid-out graph. The canvas covers the positions'
/// bounding box (on its longer side) widened by `margin_fraction` on each
/// side. The y axis points down, so layout `y` is negated.
pub fn to_svg(graph: &WeightedGraph, layout: &Layout, style: &SvgStyle) -> Result<String, RenderError> {
    if graph.node_count() == 0 {
        return Err(RenderError::EmptyGraph);
    }
    check_layout(graph, Some(layout))?;
    let ps = &layout.positions;
    let (min_x, max_x) = ps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
    let (min_y, max_y) = ps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[1]), hi.max(p[1])));
    let mut span = (max_x - min_x).max(max_y - min_y);
    if span <= 0.0 {
        span = 1.0;
    }
    let extent = span * (1.0 + 2.0 * style.margin_fraction);
    let scale = style.canvas_width / extent;
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let half = style.canvas_width / 2.0;
    let to_px = |p: [f64; 2]| ((p[0] - cx) * scale + half, (cy - p[1]) * scale + half);

    let w = style.canvas_width;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape_xml(&graph.meta.kb));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str("<g class=\"edges\" stroke=\"#7a7a7a\" stroke-linecap=\"round\">\n");
    for e in &graph.edges {
        let (x1, y1) = to_px(ps[e.source]);
        let (x2, y2) = to_px(ps[e.target]);
        let opacity = if e.mst { style.mst_opacity } else { style.non_mst_opacity };
        let _ = writeln!(
            out,
            "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke-width=\"{:.3}\" opacity=\"{opacity}\"/>",
            style.edge_width(e.weight)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<g class=\"nodes\" fill=\"#3b6ea5\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">",
        style.font_size
    );
    for node in &graph.nodes {
        let (x, y) = to_px(ps[node.id]);
        let r = style.node_radius(node.degree);
        let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.3}\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{x:.3}\" y=\"{:.3}\" fill=\"#202020\">{}</text>",
            y - r - 2.0,
            escape_xml(&node.label.replace(crate::kb::SEPARATOR, " "))
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
