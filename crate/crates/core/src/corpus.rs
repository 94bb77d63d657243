//! A fixed catalog of small connected graphs used by the exhaustive oracles
//! and the acceptance suite: the standard graphs plus the handful of shapes
//! that exercise loops, parallel edges, and the nodeless loop.

use crate::embedding::EtaleMap;
use crate::graph::{ArcId, Graph, GraphData, Mode, StandardGraph, VertexId};
use std::collections::BTreeMap;

fn add_edge(data: &mut GraphData, a: &str, b: &str) {
    data.arcs.insert(a.into());
    data.arcs.insert(b.into());
    data.involution.insert(a.into(), b.into());
    data.involution.insert(b.into(), a.into());
}

fn attach(data: &mut GraphData, arc: &str, v: &str) {
    data.vertices.insert(v.into());
    data.attach.insert(arc.into(), v.into());
}

/// One vertex with three legs and one loop: the target of the contracted
/// 5-star embedding.
pub fn three_legs_one_loop() -> Graph {
    let mut data = GraphData::default();
    for (d, b) in [("1", "1†"), ("3", "3†"), ("4", "4†")] {
        add_edge(&mut data, d, b);
        attach(&mut data, d, "v");
    }
    add_edge(&mut data, "2~", "5~");
    attach(&mut data, "2~", "v");
    attach(&mut data, "5~", "v");
    Graph::validate(data, Mode::Plain).expect("valid")
}

/// Two vertices joined by two parallel edges, no legs: the graph where two
/// vertex stars admit several unions and no least one.
pub fn parallel_pair() -> Graph {
    let mut data = GraphData::default();
    for (a, b, at_a, at_b) in [("x0", "x0†", "v", "w"), ("x1", "x1†", "v", "w")] {
        add_edge(&mut data, a, b);
        attach(&mut data, a, at_a);
        attach(&mut data, b, at_b);
    }
    Graph::validate(data, Mode::Plain).expect("valid")
}

/// Two vertices joined by three parallel edges.
pub fn theta() -> Graph {
    let mut data = GraphData::default();
    for (a, b) in [("x0", "x0†"), ("x1", "x1†"), ("x2", "x2†")] {
        add_edge(&mut data, a, b);
        attach(&mut data, a, "v");
        attach(&mut data, b, "w");
    }
    Graph::validate(data, Mode::Plain).expect("valid")
}

/// One vertex with a loop and a single leg.
pub fn lollipop() -> Graph {
    let mut data = GraphData::default();
    add_edge(&mut data, "l", "l†");
    attach(&mut data, "l", "v");
    attach(&mut data, "l†", "v");
    add_edge(&mut data, "s", "s†");
    attach(&mut data, "s", "v");
    Graph::validate(data, Mode::Plain).expect("valid")
}

/// A cycle of n two-valent vertices (n ≥ 1).
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 1);
    let mut data = GraphData::default();
    for i in 0..n {
        let a = format!("c{i}");
        let b = format!("c{i}†");
        add_edge(&mut data, &a, &b);
        // Edge i runs from vertex i to vertex (i+1) mod n.
        attach(&mut data, &a, &format!("v{i}"));
        attach(&mut data, &b, &format!("v{}", (i + 1) % n));
    }
    Graph::validate(data, Mode::Plain).expect("valid")
}

/// The canonical embedding of the snipped graph into the parallel pair: the
/// source is line(2) with its internal edge landing on x0 and both legs
/// landing on the two arcs of x1.
pub fn snipped_into_parallel_pair() -> EtaleMap {
    let source = Graph::standard(StandardGraph::Line(2));
    let target = parallel_pair();
    let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
    // line(2): e0 free at v1 (dart e0†), internal e1 (e1@v1, e1†@v2),
    // e2 free at v2 (dart e2).
    for (a, fa) in [
        ("e1", "x0"),
        ("e1†", "x0†"),
        ("e0†", "x1"),
        ("e0", "x1†"),
        ("e2", "x1†"),
        ("e2†", "x1"),
    ] {
        arc_map.insert(a.into(), fa.into());
    }
    let vertex_map: BTreeMap<VertexId, VertexId> = [
        (VertexId::from("v1"), VertexId::from("v")),
        (VertexId::from("v2"), VertexId::from("w")),
    ]
    .into_iter()
    .collect();
    let f = EtaleMap {
        source,
        target,
        arc_map,
        vertex_map,
    };
    debug_assert!(f.check_embedding().is_ok());
    f
}

/// The corpus used by the exhaustive acceptance oracles: at least twelve
/// connected graphs with at most three vertices and four edges.
pub fn corpus() -> Vec<(&'static str, Graph)> {
    vec![
        ("star0", Graph::standard(StandardGraph::Star(0))),
        ("star1", Graph::standard(StandardGraph::Star(1))),
        ("star2", Graph::standard(StandardGraph::Star(2))),
        ("star3", Graph::standard(StandardGraph::Star(3))),
        ("star4", Graph::standard(StandardGraph::Star(4))),
        ("edge", Graph::standard(StandardGraph::Edge)),
        ("line2", Graph::standard(StandardGraph::Line(2))),
        ("line3", Graph::standard(StandardGraph::Line(3))),
        (
            "loop1",
            Graph::standard(StandardGraph::LoopWithOneVertex),
        ),
        ("nodeless", Graph::standard(StandardGraph::NodelessLoop)),
        ("corolla-loop", three_legs_one_loop()),
        ("parallel", parallel_pair()),
        ("theta", theta()),
        ("lollipop", lollipop()),
    ]
}
