//! DOT rendering: vertices as nodes, boundary arcs as dangling half-edges
//! ending in invisible points, and (when oriented) arrowheads following the
//! signs.

use crate::directed::Orientation;
use crate::graph::Graph;
use std::collections::BTreeMap;

/// Renders a graph to DOT. Boundary edges dangle from invisible endpoint
/// nodes; loop-type edges of the nodeless loop are drawn between two
/// invisible endpoints. With an orientation, edges become arrows from the
/// output side to the input side.
pub fn render(g: &Graph, orientation: Option<&Orientation>) -> String {
    let directed = orientation.is_some();
    let mut out = String::new();
    out.push_str(if directed { "digraph G {\n" } else { "graph G {\n" });
    out.push_str("  layout=neato;\n");
    let connector = if directed { "->" } else { "--" };

    let mut node_names: BTreeMap<String, String> = BTreeMap::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let name = format!("v{i}");
        out.push_str(&format!("  {name} [shape=circle, label=\"{v}\"];\n"));
        node_names.insert(v.0.clone(), name);
    }

    let mut stub = 0usize;
    for e in g.edges() {
        // Endpoint of an arc: its vertex, or a fresh invisible stub.
        let mut endpoint = |arc: &crate::graph::ArcId, out: &mut String| -> String {
            match g.attach(arc) {
                Some(v) => node_names[&v.0].clone(),
                None => {
                    let name = format!("b{stub}");
                    stub += 1;
                    out.push_str(&format!("  {name} [shape=point, style=invis];\n"));
                    name
                }
            }
        };
        let label = format!("{}|{}", e.lo, e.hi);
        match orientation {
            Some(x) => {
                // Draw from the output side (the + dart's vertex, or the −
                // boundary stub) towards the input side.
                let (tail_arc, head_arc) = if x.is_plus(&e.lo) {
                    // e.lo is +: if it is a dart it is an output of its
                    // vertex, so the edge leaves there.
                    (e.lo.clone(), e.hi.clone())
                } else {
                    (e.hi.clone(), e.lo.clone())
                };
                let tail = endpoint(&tail_arc, &mut out);
                let head = endpoint(&head_arc, &mut out);
                out.push_str(&format!("  {tail} {connector} {head} [label=\"{label}\"];\n"));
            }
            None => {
                let a = endpoint(&e.lo, &mut out);
                let b = endpoint(&e.hi, &mut out);
                out.push_str(&format!("  {a} {connector} {b} [label=\"{label}\"];\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}
