//! Directed graphs as orientations of undirected graphs, oriented graphical
//! maps, acyclicity, structured subgraphs (convex inclusions), and
//! membership tests for the dendroidal, properadic, and dioperadic
//! subcategories.
//!
//! An orientation assigns an involutive sign to every arc. Signs split darts
//! into inputs and outputs of their vertex, and boundary arcs into inputs
//! and outputs of the graph; note the sign discrepancy between the two:
//! arcs attached to a vertex point towards it, boundary arcs point away.

use crate::diag::{violation, Violation};
use crate::embedding::{EmbClass, Embeddings};
use crate::gmap::NewGraphMap;
use crate::graph::{ArcId, Edge, Graph, GraphData, Mode, VertexId};
use std::collections::{BTreeMap, BTreeSet};

/// An involutive sign assignment on the arcs of a graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Orientation {
    pub sign: BTreeMap<ArcId, i8>,
}

impl Orientation {
    /// Builds the orientation whose +1 arcs are exactly `plus`; `plus` must
    /// pick one arc per edge.
    pub fn from_plus_arcs(g: &Graph, plus: &BTreeSet<ArcId>) -> Result<Orientation, Violation> {
        let mut sign = BTreeMap::new();
        for e in g.edges() {
            let (p, m) = if plus.contains(&e.lo) {
                (&e.lo, &e.hi)
            } else if plus.contains(&e.hi) {
                (&e.hi, &e.lo)
            } else {
                return violation("orientation", format!("edge {e} has no +1 arc"));
            };
            if plus.contains(p) && plus.contains(m) {
                return violation("orientation", format!("edge {e} has two +1 arcs"));
            }
            sign.insert(p.clone(), 1);
            sign.insert(m.clone(), -1);
        }
        Ok(Orientation { sign })
    }

    pub fn validate(&self, g: &Graph) -> Result<(), Violation> {
        for a in g.arcs() {
            let s = match self.sign.get(a) {
                Some(s) => *s,
                None => return violation("orientation", format!("arc {a} has no sign")),
            };
            if s != 1 && s != -1 {
                return violation("orientation", format!("arc {a} has sign {s}"));
            }
            if self.sign.get(g.involute(a)) != Some(&-s) {
                return violation("orientation", format!("signs at {a} are not involutive"));
            }
        }
        if self.sign.len() != g.arcs().len() {
            return violation("orientation", "sign table mentions unknown arcs".to_string());
        }
        Ok(())
    }

    pub fn sign(&self, a: &ArcId) -> i8 {
        self.sign[a]
    }

    pub fn is_plus(&self, a: &ArcId) -> bool {
        self.sign[a] == 1
    }
}

/// A graph together with an orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    pub graph: Graph,
    pub orientation: Orientation,
}

impl DirectedGraph {
    pub fn new(graph: Graph, orientation: Orientation) -> Result<DirectedGraph, Violation> {
        orientation.validate(&graph)?;
        Ok(DirectedGraph { graph, orientation })
    }

    /// Inputs of a vertex: darts with sign −1 (they point towards it).
    pub fn in_of_vertex(&self, v: &VertexId) -> Vec<ArcId> {
        self.graph
            .nbhd(v)
            .iter()
            .filter(|d| !self.orientation.is_plus(d))
            .cloned()
            .collect()
    }

    /// Outputs of a vertex: darts with sign +1.
    pub fn out_of_vertex(&self, v: &VertexId) -> Vec<ArcId> {
        self.graph
            .nbhd(v)
            .iter()
            .filter(|d| self.orientation.is_plus(d))
            .cloned()
            .collect()
    }

    /// Inputs of the graph: boundary arcs with sign +1 (they point away).
    pub fn in_of_graph(&self) -> Vec<ArcId> {
        self.graph
            .boundary()
            .iter()
            .filter(|a| self.orientation.is_plus(a))
            .cloned()
            .collect()
    }

    pub fn out_of_graph(&self) -> Vec<ArcId> {
        self.graph
            .boundary()
            .iter()
            .filter(|a| !self.orientation.is_plus(a))
            .cloned()
            .collect()
    }

    /// Inputs of an embedding class, as edges.
    pub fn in_of_class(&self, c: &EmbClass) -> Vec<Edge> {
        c.boundary
            .iter()
            .filter(|a| self.orientation.is_plus(a))
            .map(|a| self.graph.edge_of(a))
            .collect()
    }

    pub fn out_of_class(&self, c: &EmbClass) -> Vec<Edge> {
        c.boundary
            .iter()
            .filter(|a| !self.orientation.is_plus(a))
            .map(|a| self.graph.edge_of(a))
            .collect()
    }
}

/// All orientations of a graph: one sign choice per edge.
pub fn orientations_of(g: &Graph) -> Vec<Orientation> {
    let edges = g.edges().to_vec();
    let mut out = Vec::new();
    for bits in 0u64..(1 << edges.len()) {
        let plus: BTreeSet<ArcId> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                if bits & (1 << i) != 0 {
                    e.lo.clone()
                } else {
                    e.hi.clone()
                }
            })
            .collect();
        out.push(Orientation::from_plus_arcs(g, &plus).expect("one arc per edge"));
    }
    out
}

/// The unique source orientation making `m` oriented over the target
/// orientation: pull signs back along the arc map.
pub fn restrict_orientation(m: &NewGraphMap, target: &Orientation) -> Orientation {
    Orientation {
        sign: m
            .source
            .arcs()
            .iter()
            .map(|a| (a.clone(), target.sign(&m.arc_map[a])))
            .collect(),
    }
}

/// A map is oriented when its arc map preserves signs. Also verifies the
/// equivalent condition that the induced edge map preserves inputs and
/// outputs of every embedding class.
pub fn check_oriented_map(
    m: &NewGraphMap,
    src: &Orientation,
    tgt: &Orientation,
) -> Result<(), Violation> {
    src.validate(&m.source)?;
    tgt.validate(&m.target)?;
    for a in m.source.arcs() {
        if src.sign(a) != tgt.sign(&m.arc_map[a]) {
            return violation("signs", format!("arc {a} flips orientation"));
        }
    }
    // (iv′): in/out of classes are preserved by the induced edge map.
    let dg_src = DirectedGraph::new(m.source.clone(), src.clone())?;
    let dg_tgt = DirectedGraph::new(m.target.clone(), tgt.clone())?;
    let table = Embeddings::of(&m.source)?;
    for c in table.classes() {
        let image = &m.emb_map[c];
        for (mine, theirs) in [
            (dg_src.in_of_class(c), dg_tgt.in_of_class(image)),
            (dg_src.out_of_class(c), dg_tgt.out_of_class(image)),
        ] {
            let mut mapped: Vec<Edge> = mine
                .iter()
                .map(|e| dg_tgt.graph.edge_of(&m.arc_map[&e.lo]))
                .collect();
            mapped.sort();
            let mut expected = theirs;
            expected.sort();
            if mapped != expected {
                return violation(
                    "(iv')",
                    format!("class {c} does not preserve inputs/outputs"),
                );
            }
        }
    }
    Ok(())
}

/// A directed p-map: an étale-style natural transformation between directed
/// graphs which preserves signs (equivalently, in- and out-neighborhood
/// bijections at every vertex). Exposed as a predicate only.
pub fn check_p_map(
    f: &crate::embedding::EtaleMap,
    src: &Orientation,
    tgt: &Orientation,
) -> Result<(), Violation> {
    f.check_etale()?;
    src.validate(&f.source)?;
    tgt.validate(&f.target)?;
    for a in f.source.arcs() {
        if src.sign(a) != tgt.sign(f.arc(a)) {
            return violation("signs", format!("arc {a} flips orientation"));
        }
    }
    Ok(())
}

/// Directed one-step reachability between edges through a vertex: `e → e'`
/// when some vertex takes `e` as an input and `e'` as an output.
fn edge_successors(dg: &DirectedGraph, e: &Edge) -> Vec<(VertexId, Edge)> {
    let mut out = Vec::new();
    for a in e.arcs() {
        if let Some(v) = dg.graph.attach(a) {
            if !dg.orientation.is_plus(a) {
                // e points into v; follow each output of v.
                for d in dg.out_of_vertex(v) {
                    out.push((v.clone(), dg.graph.edge_of(&d)));
                }
            }
        }
    }
    out
}

/// Acyclicity in the directed sense: no directed edge cycle. The directed
/// nodeless loop counts as cyclic.
pub fn is_acyclic(dg: &DirectedGraph) -> bool {
    if !dg.graph.is_connected() {
        return false;
    }
    if dg.graph.is_nodeless_loop() {
        return false;
    }
    for start in dg.graph.edges() {
        // Walk forward; returning to `start` is a cycle.
        let mut stack: Vec<Edge> = edge_successors(dg, start)
            .into_iter()
            .map(|(_, e)| e)
            .collect();
        let mut seen: BTreeSet<Edge> = BTreeSet::new();
        while let Some(e) = stack.pop() {
            if e == *start {
                return false;
            }
            if !seen.insert(e.clone()) {
                continue;
            }
            for (_, next) in edge_successors(dg, &e) {
                stack.push(next);
            }
        }
    }
    true
}

/// Every vertex has exactly one output, and every embedding class has a
/// single output edge (which rules out directed cycles).
pub fn is_dendroidal(dg: &DirectedGraph) -> bool {
    if !dg.graph.is_connected() || dg.graph.is_nodeless_loop() {
        return false;
    }
    for v in dg.graph.vertices() {
        if dg.out_of_vertex(v).len() != 1 {
            return false;
        }
    }
    let table = match Embeddings::of(&dg.graph) {
        Ok(t) => t,
        Err(_) => return false,
    };
    table.classes().iter().all(|c| {
        let out: BTreeSet<Edge> = dg.out_of_class(c).into_iter().collect();
        out.len() == 1
    })
}

/// Each vertex and the graph itself have exactly one input and one output.
pub fn is_linear(dg: &DirectedGraph) -> bool {
    dg.graph.is_connected()
        && !dg.graph.is_nodeless_loop()
        && dg
            .graph
            .vertices()
            .iter()
            .all(|v| dg.in_of_vertex(v).len() == 1 && dg.out_of_vertex(v).len() == 1)
        && dg.in_of_graph().len() == 1
        && dg.out_of_graph().len() == 1
}

/// The structured subgraphs of an acyclic directed graph: embedding classes
/// whose representative is injective on arcs (no cut edges) and convex
/// (directed paths between its edges stay inside). Includes all edges, all
/// vertex stars, and the graph itself.
pub fn structured_subgraphs(dg: &DirectedGraph) -> Result<Vec<EmbClass>, Violation> {
    if !is_acyclic(dg) {
        return violation("acyclic", "structured subgraphs need an acyclic graph".to_string());
    }
    let table = Embeddings::of(&dg.graph)?;
    let mut out = Vec::new();
    for c in table.classes() {
        if is_structured(dg, c) {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// Membership of a single class in sSb(G).
pub fn is_structured(dg: &DirectedGraph, c: &EmbClass) -> bool {
    if c.is_edge() {
        return true;
    }
    if c.is_nodeless_identity() {
        return false;
    }
    // Injectivity: no cut edges, i.e. no internal edge with both arcs in the
    // class boundary and both darts attached inside.
    let g = &dg.graph;
    let s = &c.vertices;
    for e in g.internal_edges() {
        let both_inside = e
            .arcs()
            .iter()
            .all(|a| g.attach(a).map(|v| s.contains(v)).unwrap_or(false));
        if both_inside && c.boundary.contains(&e.lo) && c.boundary.contains(&e.hi) {
            return false;
        }
    }
    // Convexity: no directed path between subgraph edges through an outside
    // vertex. States are (edge, left-the-subgraph).
    let edges_of_h: BTreeSet<Edge> = s
        .iter()
        .flat_map(|v| g.nbhd(v).iter().map(|d| g.edge_of(d)))
        .collect();
    let mut stack: Vec<(Edge, bool)> = edges_of_h.iter().map(|e| (e.clone(), false)).collect();
    let mut seen: BTreeSet<(Edge, bool)> = stack.iter().cloned().collect();
    while let Some((e, tainted)) = stack.pop() {
        for (via, next) in edge_successors(dg, &e) {
            let next_taint = tainted || !s.contains(&via);
            if next_taint && edges_of_h.contains(&next) {
                return false;
            }
            if seen.insert((next.clone(), next_taint)) {
                stack.push((next, next_taint));
            }
        }
    }
    true
}

/// A map between acyclic directed graphs is properadic when the image of the
/// top class is structured; its class table then restricts to structured
/// subgraphs.
pub fn is_properadic(
    m: &NewGraphMap,
    src: &Orientation,
    tgt: &Orientation,
) -> Result<bool, Violation> {
    check_oriented_map(m, src, tgt)?;
    let dg_src = DirectedGraph::new(m.source.clone(), src.clone())?;
    let dg_tgt = DirectedGraph::new(m.target.clone(), tgt.clone())?;
    if !is_acyclic(&dg_src) || !is_acyclic(&dg_tgt) {
        return violation("acyclic", "properadic maps live between acyclic graphs".to_string());
    }
    let top = EmbClass::identity_of(&m.source);
    Ok(is_structured(&dg_tgt, &m.emb_map[&top]))
}

/// Between simply connected directed graphs every oriented map is
/// dioperadic; the predicate re-verifies the oriented-map axioms and the
/// object shapes.
pub fn is_dioperadic(
    m: &NewGraphMap,
    src: &Orientation,
    tgt: &Orientation,
) -> Result<bool, Violation> {
    check_oriented_map(m, src, tgt)?;
    if !m.source.is_tree() || !m.target.is_tree() {
        return violation(
            "simply connected",
            "dioperadic maps live between simply connected graphs".to_string(),
        );
    }
    Ok(true)
}

/// The restriction of a properadic map's class table to structured
/// subgraphs. Verifies input/output preservation and preservation of
/// structured unions.
pub fn properadic_restriction(
    m: &NewGraphMap,
    src: &Orientation,
    tgt: &Orientation,
) -> Result<BTreeMap<EmbClass, EmbClass>, Violation> {
    if !is_properadic(m, src, tgt)? {
        return violation("properadic", "the image of the top class is not structured".to_string());
    }
    let dg_src = DirectedGraph::new(m.source.clone(), src.clone())?;
    let dg_tgt = DirectedGraph::new(m.target.clone(), tgt.clone())?;
    let ssb_src = structured_subgraphs(&dg_src)?;
    let mut table = BTreeMap::new();
    for c in &ssb_src {
        let image = &m.emb_map[c];
        if !is_structured(&dg_tgt, image) {
            return violation(
                "restriction",
                format!("structured {c} maps to unstructured {image}"),
            );
        }
        // (1): the induced edge map preserves inputs and outputs.
        for (mine, theirs) in [
            (dg_src.in_of_class(c), dg_tgt.in_of_class(image)),
            (dg_src.out_of_class(c), dg_tgt.out_of_class(image)),
        ] {
            let mut mapped: Vec<Edge> = mine
                .iter()
                .map(|e| dg_tgt.graph.edge_of(&m.arc_map[&e.lo]))
                .collect();
            mapped.sort();
            let mut expected = theirs;
            expected.sort();
            if mapped != expected {
                return violation("(1)", format!("class {c} breaks input/output preservation"));
            }
        }
        table.insert(c.clone(), image.clone());
    }
    // (2): structured unions are preserved.
    for h1 in &ssb_src {
        for h2 in &ssb_src {
            if let Some(u) = structured_union(&dg_src, h1, h2) {
                let image_union = structured_union_of_images(&dg_tgt, &table[h1], &table[h2]);
                if image_union.as_ref() != Some(&table[&u]) {
                    return violation(
                        "(2)",
                        format!("structured union of {h1},{h2} is not preserved"),
                    );
                }
            }
        }
    }
    Ok(table)
}

/// The set-union of two structured subgraphs, if it is structured: vertices
/// and incident edges are unioned, and the result must be a connected,
/// convex class.
pub fn structured_union(dg: &DirectedGraph, h1: &EmbClass, h2: &EmbClass) -> Option<EmbClass> {
    structured_union_of_images(dg, h1, h2)
}

fn structured_union_of_images(
    dg: &DirectedGraph,
    h1: &EmbClass,
    h2: &EmbClass,
) -> Option<EmbClass> {
    let g = &dg.graph;
    let vertices: BTreeSet<VertexId> = h1.vertices.union(&h2.vertices).cloned().collect();
    // Edge sets of the unstructured subgraphs.
    let edge_set = |c: &EmbClass| -> BTreeSet<Edge> {
        if c.is_edge() {
            let a = c.boundary.iter().next().expect("edge class has arcs");
            [g.edge_of(a)].into_iter().collect()
        } else {
            c.vertices
                .iter()
                .flat_map(|v| g.nbhd(v).iter().map(|d| g.edge_of(d)))
                .collect()
        }
    };
    let edges: BTreeSet<Edge> = edge_set(h1).union(&edge_set(h2)).cloned().collect();
    // The union must be exactly the subgraph induced by its vertices (plus
    // the single-edge case), otherwise it is not even a candidate class.
    let candidate = if vertices.is_empty() {
        if edges.len() != 1 {
            return None;
        }
        let e = edges.iter().next().unwrap();
        EmbClass::edge_of(g, e)
    } else {
        let incident: BTreeSet<Edge> = vertices
            .iter()
            .flat_map(|v| g.nbhd(v).iter().map(|d| g.edge_of(d)))
            .collect();
        if incident != edges {
            return None;
        }
        // Boundary of the cut-free class on this vertex set.
        let mut boundary = BTreeSet::new();
        for a in g.arcs() {
            let partner_in = g
                .attach(g.involute(a))
                .map(|v| vertices.contains(v))
                .unwrap_or(false);
            let a_in = g.attach(a).map(|v| vertices.contains(v)).unwrap_or(false);
            if partner_in && !a_in {
                boundary.insert(a.clone());
            }
        }
        EmbClass {
            vertices,
            boundary,
        }
    };
    let table = Embeddings::of(g).ok()?;
    if !table.contains(&candidate) {
        return None;
    }
    if !is_structured(dg, &candidate) {
        return None;
    }
    Some(candidate)
}

/// The four-set presentation of a directed graph: edges, vertex inputs and
/// outputs, graph inputs and outputs, and loop edges. Used for
/// serialization round-trips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourSetPresentation {
    pub edges: BTreeSet<String>,
    pub vertex_in: BTreeMap<String, BTreeSet<String>>,
    pub vertex_out: BTreeMap<String, BTreeSet<String>>,
    pub graph_in: BTreeSet<String>,
    pub graph_out: BTreeSet<String>,
    pub loops: BTreeSet<String>,
}

/// Projects a directed graph onto its four-set presentation, naming each
/// edge by its +1 arc.
pub fn four_set_presentation(dg: &DirectedGraph) -> FourSetPresentation {
    let g = &dg.graph;
    let edge_name = |e: &Edge| -> String {
        if dg.orientation.is_plus(&e.lo) {
            e.lo.0.clone()
        } else {
            e.hi.0.clone()
        }
    };
    let mut p = FourSetPresentation {
        edges: g.edges().iter().map(|e| edge_name(e)).collect(),
        vertex_in: BTreeMap::new(),
        vertex_out: BTreeMap::new(),
        graph_in: BTreeSet::new(),
        graph_out: BTreeSet::new(),
        loops: BTreeSet::new(),
    };
    for v in g.vertices() {
        p.vertex_in.insert(
            v.0.clone(),
            dg.in_of_vertex(v).iter().map(|d| edge_name(&g.edge_of(d))).collect(),
        );
        p.vertex_out.insert(
            v.0.clone(),
            dg.out_of_vertex(v).iter().map(|d| edge_name(&g.edge_of(d))).collect(),
        );
    }
    for a in dg.in_of_graph() {
        p.graph_in.insert(edge_name(&g.edge_of(&a)));
    }
    for a in dg.out_of_graph() {
        p.graph_out.insert(edge_name(&g.edge_of(&a)));
    }
    for a in g.loop_arcs() {
        p.loops.insert(edge_name(&g.edge_of(&a)));
    }
    p
}

/// Rebuilds a directed graph from a four-set presentation, naming the two
/// arcs of edge `e` as `e` (+1) and `e†` (−1).
pub fn from_four_sets(p: &FourSetPresentation) -> Result<DirectedGraph, Violation> {
    let mut data = GraphData::default();
    let mut plus = BTreeSet::new();
    for e in &p.edges {
        let a = ArcId(e.clone());
        let b = ArcId(format!("{e}†"));
        data.arcs.insert(a.clone());
        data.arcs.insert(b.clone());
        data.involution.insert(a.clone(), b.clone());
        data.involution.insert(b, a.clone());
        plus.insert(a);
    }
    for (v, ins) in &p.vertex_in {
        data.vertices.insert(VertexId(v.clone()));
        for e in ins {
            // Input edges point towards the vertex: the −1 arc attaches.
            data.attach.insert(ArcId(format!("{e}†")), VertexId(v.clone()));
        }
    }
    for (v, outs) in &p.vertex_out {
        data.vertices.insert(VertexId(v.clone()));
        for e in outs {
            data.attach.insert(ArcId(e.clone()), VertexId(v.clone()));
        }
    }
    let mut boundary = BTreeSet::new();
    for e in &p.graph_in {
        boundary.insert(ArcId(e.clone()));
    }
    for e in &p.graph_out {
        boundary.insert(ArcId(format!("{e}†")));
    }
    data.boundary = Some(boundary);
    let graph = Graph::validate(data, Mode::Extended)?;
    let orientation = Orientation::from_plus_arcs(&graph, &plus)?;
    DirectedGraph::new(graph, orientation)
}

/// The acyclic directed graph whose two-vertex subgraph fails convexity:
/// x feeds z and y, z feeds y, all edges pointing down, with legs making the
/// valences 3, 3, 4. The subgraph spanned by x and y is not structured.
pub fn not_structured_example() -> (DirectedGraph, EmbClass) {
    let mut data = GraphData::default();
    let add_edge = |data: &mut GraphData, a: &str, b: &str| {
        data.arcs.insert(a.into());
        data.arcs.insert(b.into());
        data.involution.insert(a.into(), b.into());
        data.involution.insert(b.into(), a.into());
    };
    // e0: x → z, e1: z → y, e2: x → y; legs: lx into x, lz into z,
    // mz out of z, ly out of y.
    for (a, b) in [
        ("e0+", "e0-"),
        ("e1+", "e1-"),
        ("e2+", "e2-"),
        ("lx+", "lx-"),
        ("lz+", "lz-"),
        ("mz+", "mz-"),
        ("ly+", "ly-"),
    ] {
        add_edge(&mut data, a, b);
    }
    let attach = |data: &mut GraphData, arc: &str, v: &str| {
        data.vertices.insert(v.into());
        data.attach.insert(arc.into(), v.into());
    };
    attach(&mut data, "e0+", "x"); // e0 leaves x
    attach(&mut data, "e0-", "z"); // and enters z
    attach(&mut data, "e1+", "z");
    attach(&mut data, "e1-", "y");
    attach(&mut data, "e2+", "x");
    attach(&mut data, "e2-", "y");
    attach(&mut data, "lx-", "x"); // leg into x
    attach(&mut data, "lz-", "z"); // leg into z
    attach(&mut data, "mz+", "z"); // leg out of z
    attach(&mut data, "ly+", "y"); // leg out of y
    let graph = Graph::validate(data, Mode::Plain).expect("valid");
    let plus: BTreeSet<ArcId> = graph
        .arcs()
        .iter()
        .filter(|a| a.0.ends_with('+'))
        .cloned()
        .collect();
    let orientation = Orientation::from_plus_arcs(&graph, &plus).expect("one per edge");
    let dg = DirectedGraph::new(graph, orientation).expect("valid");

    let cls = EmbClass {
        vertices: [VertexId::from("x"), VertexId::from("y")].into_iter().collect(),
        boundary: [
            ArcId::from("lx+"),
            ArcId::from("e0-"),
            ArcId::from("e1+"),
            ArcId::from("ly-"),
        ]
        .into_iter()
        .collect(),
    };
    (dg, cls)
}
