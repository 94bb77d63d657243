//! Graphs with loose ends in the involutive-arc encoding.
//!
//! A graph is a finite set of arcs with a fixpoint-free involution, a subset
//! of arcs (darts) attached to vertices, and an explicit boundary set. Plain
//! graphs have `boundary = arcs \ darts`; the extended variant lets the
//! boundary be a smaller set, which adds exactly one new connected graph, the
//! nodeless loop.

use crate::diag::{violation, Violation};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

/// Opaque arc identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub String);

/// Opaque vertex identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub String);

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for ArcId {
    fn from(s: &str) -> Self {
        ArcId(s.to_string())
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

/// An edge is an unordered pair `{a, a†}`, stored with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub lo: ArcId,
    pub hi: ArcId,
}

impl Edge {
    pub fn new(a: ArcId, b: ArcId) -> Self {
        if a <= b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn arcs(&self) -> [&ArcId; 2] {
        [&self.lo, &self.hi]
    }

    pub fn contains(&self, a: &ArcId) -> bool {
        &self.lo == a || &self.hi == a
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Validation mode: plain graphs have `boundary = arcs \ darts`; extended
/// graphs carry the boundary as data and admit the nodeless loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Extended,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Plain => write!(f, "plain"),
            Mode::Extended => write!(f, "extended"),
        }
    }
}

/// Raw graph data, before validation. Construct one of these (by hand or from
/// a parsed file) and call [`Graph::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphData {
    pub arcs: BTreeSet<ArcId>,
    pub involution: BTreeMap<ArcId, ArcId>,
    pub vertices: BTreeSet<VertexId>,
    /// Attachment of darts; the key set is the dart set.
    pub attach: BTreeMap<ArcId, VertexId>,
    /// Explicit boundary. For plain graphs this must equal `arcs \ darts`,
    /// and `None` means "use that default".
    pub boundary: Option<BTreeSet<ArcId>>,
}

/// A validated, immutable graph. All derived data (edges, neighborhoods) is
/// computed once at validation.
pub struct Graph {
    arcs: BTreeSet<ArcId>,
    involution: BTreeMap<ArcId, ArcId>,
    vertices: BTreeSet<VertexId>,
    attach: BTreeMap<ArcId, VertexId>,
    boundary: BTreeSet<ArcId>,
    edges: Vec<Edge>,
    nbhd: BTreeMap<VertexId, Vec<ArcId>>,
    emb_cache: OnceLock<crate::embedding::Embeddings>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            arcs: self.arcs.clone(),
            involution: self.involution.clone(),
            vertices: self.vertices.clone(),
            attach: self.attach.clone(),
            boundary: self.boundary.clone(),
            edges: self.edges.clone(),
            nbhd: self.nbhd.clone(),
            emb_cache: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.arcs == other.arcs
            && self.involution == other.involution
            && self.vertices == other.vertices
            && self.attach == other.attach
            && self.boundary == other.boundary
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("arcs", &self.arcs)
            .field("involution", &self.involution)
            .field("vertices", &self.vertices)
            .field("attach", &self.attach)
            .field("boundary", &self.boundary)
            .finish()
    }
}

/// The named standard graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGraph {
    /// The edge `↕`: two boundary arcs, no vertices.
    Edge,
    /// The n-star: one vertex with n legs.
    Star(usize),
    /// Two arcs forming a circle, no vertices, empty boundary.
    NodelessLoop,
    /// n vertices in a row, n+1 edges, one free end on each side.
    Line(usize),
    /// One vertex with a single loop edge.
    LoopWithOneVertex,
}

impl Graph {
    /// Validates raw data under the given mode and builds the derived caches.
    /// The returned diagnostics name the first violated clause.
    pub fn validate(data: GraphData, mode: Mode) -> Result<Graph, Violation> {
        let GraphData {
            arcs,
            involution,
            vertices,
            attach,
            boundary,
        } = data;

        // Involution: total, self-inverse, fixpoint-free.
        if involution.len() != arcs.len() {
            return violation(
                "involution",
                format!(
                    "involution table has {} entries for {} arcs",
                    involution.len(),
                    arcs.len()
                ),
            );
        }
        for (a, b) in &involution {
            if !arcs.contains(a) || !arcs.contains(b) {
                return violation("involution", format!("entry {a} -> {b} leaves the arc set"));
            }
            if a == b {
                return violation("involution", format!("fixpoint at {a}"));
            }
            match involution.get(b) {
                Some(back) if back == a => {}
                _ => return violation("involution", format!("{a} -> {b} is not self-inverse")),
            }
        }

        // Darts and attachment.
        for (d, v) in &attach {
            if !arcs.contains(d) {
                return violation("darts", format!("dart {d} is not an arc"));
            }
            if !vertices.contains(v) {
                return violation("darts", format!("dart {d} attached to unknown vertex {v}"));
            }
        }

        let darts: BTreeSet<ArcId> = attach.keys().cloned().collect();
        let complement: BTreeSet<ArcId> = arcs.difference(&darts).cloned().collect();
        let boundary = match boundary {
            None => complement.clone(),
            Some(b) => b,
        };

        match mode {
            Mode::Plain => {
                if boundary != complement {
                    return violation(
                        "plain boundary",
                        "boundary must equal arcs minus darts in plain mode".to_string(),
                    );
                }
            }
            Mode::Extended => {
                // darts† \ darts ⊆ boundary ⊆ arcs \ darts, and
                // boundary \ darts† is involution-closed.
                let darts_dagger: BTreeSet<ArcId> =
                    darts.iter().map(|d| involution[d].clone()).collect();
                for a in darts_dagger.difference(&darts) {
                    if !boundary.contains(a) {
                        return violation(
                            "extended boundary",
                            format!("arc {a} is an involute of a dart but not in the boundary"),
                        );
                    }
                }
                for a in &boundary {
                    if !arcs.contains(a) {
                        return violation("extended boundary", format!("{a} is not an arc"));
                    }
                    if darts.contains(a) {
                        return violation("extended boundary", format!("boundary arc {a} is a dart"));
                    }
                }
                for a in &boundary {
                    if !darts_dagger.contains(a) {
                        let partner = &involution[a];
                        if !(boundary.contains(partner) && !darts_dagger.contains(partner)) {
                            return violation(
                                "extended boundary",
                                format!("boundary minus darts† is not involution-closed at {a}"),
                            );
                        }
                    }
                }
            }
        }

        // Edges = involution orbits.
        let mut edges = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &arcs {
            if seen.contains(a) {
                continue;
            }
            let b = involution[a].clone();
            seen.insert(a.clone());
            seen.insert(b.clone());
            edges.push(Edge::new(a.clone(), b));
        }
        edges.sort();

        let mut nbhd: BTreeMap<VertexId, Vec<ArcId>> = BTreeMap::new();
        for v in &vertices {
            nbhd.insert(v.clone(), Vec::new());
        }
        for (d, v) in &attach {
            nbhd.get_mut(v).expect("vertex checked above").push(d.clone());
        }
        for legs in nbhd.values_mut() {
            legs.sort();
        }

        Ok(Graph {
            arcs,
            involution,
            vertices,
            attach,
            boundary,
            edges,
            nbhd,
            emb_cache: OnceLock::new(),
        })
    }

    /// Builds one of the named standard graphs with its deterministic
    /// identifier scheme (arcs of the n-star are named `1..n`, `1†..n†`).
    pub fn standard(kind: StandardGraph) -> Graph {
        let mut data = GraphData::default();
        let mut mode = Mode::Plain;
        match kind {
            StandardGraph::Edge => {
                data.arcs = ["♯", "♭"].iter().map(|s| ArcId::from(*s)).collect();
                data.involution.insert("♯".into(), "♭".into());
                data.involution.insert("♭".into(), "♯".into());
            }
            StandardGraph::Star(n) => {
                data.vertices.insert("v".into());
                for i in 1..=n {
                    let d = ArcId(format!("{i}"));
                    let b = ArcId(format!("{i}†"));
                    data.arcs.insert(d.clone());
                    data.arcs.insert(b.clone());
                    data.involution.insert(d.clone(), b.clone());
                    data.involution.insert(b, d.clone());
                    data.attach.insert(d, "v".into());
                }
            }
            StandardGraph::NodelessLoop => {
                data.arcs = ["a", "a†"].iter().map(|s| ArcId::from(*s)).collect();
                data.involution.insert("a".into(), "a†".into());
                data.involution.insert("a†".into(), "a".into());
                data.boundary = Some(BTreeSet::new());
                mode = Mode::Extended;
            }
            StandardGraph::Line(n) => {
                if n == 0 {
                    return Graph::standard(StandardGraph::Edge);
                }
                for i in 1..=n {
                    data.vertices.insert(VertexId(format!("v{i}")));
                }
                // Edge i runs between v_i and v_{i+1}; edges 0 and n are the
                // free ends.
                for i in 0..=n {
                    let a = ArcId(format!("e{i}"));
                    let b = ArcId(format!("e{i}†"));
                    data.arcs.insert(a.clone());
                    data.arcs.insert(b.clone());
                    data.involution.insert(a.clone(), b.clone());
                    data.involution.insert(b.clone(), a.clone());
                    if i > 0 {
                        data.attach.insert(a, VertexId(format!("v{i}")));
                    }
                    if i < n {
                        data.attach.insert(b, VertexId(format!("v{}", i + 1)));
                    }
                }
            }
            StandardGraph::LoopWithOneVertex => {
                data.vertices.insert("v".into());
                data.arcs = ["1", "1†"].iter().map(|s| ArcId::from(*s)).collect();
                data.involution.insert("1".into(), "1†".into());
                data.involution.insert("1†".into(), "1".into());
                data.attach.insert("1".into(), "v".into());
                data.attach.insert("1†".into(), "v".into());
            }
        }
        Graph::validate(data, mode).expect("standard graphs are valid")
    }

    pub fn arcs(&self) -> &BTreeSet<ArcId> {
        &self.arcs
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn boundary(&self) -> &BTreeSet<ArcId> {
        &self.boundary
    }

    pub fn involute(&self, a: &ArcId) -> &ArcId {
        &self.involution[a]
    }

    pub fn involution(&self) -> &BTreeMap<ArcId, ArcId> {
        &self.involution
    }

    pub fn is_dart(&self, a: &ArcId) -> bool {
        self.attach.contains_key(a)
    }

    pub fn attach(&self, a: &ArcId) -> Option<&VertexId> {
        self.attach.get(a)
    }

    pub fn attach_table(&self) -> &BTreeMap<ArcId, VertexId> {
        &self.attach
    }

    pub fn nbhd(&self, v: &VertexId) -> &[ArcId] {
        self.nbhd
            .get(v)
            .map(|legs| legs.as_slice())
            .unwrap_or(&[])
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_of(&self, a: &ArcId) -> Edge {
        Edge::new(a.clone(), self.involute(a).clone())
    }

    pub fn internal_edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .filter(|e| !self.boundary.contains(&e.lo) && !self.boundary.contains(&e.hi))
            .cloned()
            .collect()
    }

    /// Arcs that are neither darts nor boundary; nonempty only on nodeless
    /// loops among connected graphs.
    pub fn loop_arcs(&self) -> BTreeSet<ArcId> {
        self.arcs
            .iter()
            .filter(|a| !self.is_dart(a) && !self.boundary.contains(*a))
            .cloned()
            .collect()
    }

    pub fn is_nodeless_loop(&self) -> bool {
        self.vertices.is_empty()
            && self.arcs.len() == 2
            && self.boundary.is_empty()
            && self.attach.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && self.vertices.is_empty()
    }

    /// Connectivity in the coproduct sense: non-empty, and the union-find
    /// over arcs and vertices (arc ~ involute, dart ~ its vertex) has a
    /// single class.
    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new();
        for a in &self.arcs {
            uf.add(Item::Arc(a.clone()));
        }
        for v in &self.vertices {
            uf.add(Item::Vertex(v.clone()));
        }
        for (a, b) in &self.involution {
            uf.union(&Item::Arc(a.clone()), &Item::Arc(b.clone()));
        }
        for (d, v) in &self.attach {
            uf.union(&Item::Arc(d.clone()), &Item::Vertex(v.clone()));
        }
        uf.class_count() == 1
    }

    /// True when the realization is simply connected: connected, not a
    /// nodeless loop, and the dart-incidence count satisfies the forest
    /// equation |V| + |E| - |darts| = 1.
    pub fn is_tree(&self) -> bool {
        self.is_connected()
            && !self.is_nodeless_loop()
            && self.vertices.len() + self.edges.len() == self.attach.len() + 1
    }

    pub(crate) fn emb_cache(&self) -> &OnceLock<crate::embedding::Embeddings> {
        &self.emb_cache
    }

    /// Stable textual encoding used for hashing, golden tests, and canonical
    /// form comparison.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        out.push_str("arcs:");
        for a in &self.arcs {
            out.push_str(&format!(" {a}"));
        }
        out.push_str("\ninv:");
        for (a, b) in &self.involution {
            out.push_str(&format!(" {a}={b}"));
        }
        out.push_str("\nvertices:");
        for v in &self.vertices {
            out.push_str(&format!(" {v}"));
        }
        out.push_str("\nattach:");
        for (a, v) in &self.attach {
            out.push_str(&format!(" {a}@{v}"));
        }
        out.push_str("\nboundary:");
        for a in &self.boundary {
            out.push_str(&format!(" {a}"));
        }
        out.push('\n');
        out
    }

    /// Relabels arcs and vertices deterministically. Arcs are ordered by an
    /// iterated refinement of `(annotation, structural role)` colors with
    /// individualization on ties, so two isomorphic graphs whose isomorphism
    /// preserves the annotations receive identical labels.
    pub fn canonical_relabel(
        &self,
        annotations: &BTreeMap<ArcId, String>,
    ) -> (Graph, BTreeMap<ArcId, ArcId>, BTreeMap<VertexId, VertexId>) {
        let order = canonical_arc_order(self, annotations);
        let mut arc_rename: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for (i, a) in order.iter().enumerate() {
            arc_rename.insert(a.clone(), ArcId(format!("a{i}")));
        }
        // Vertices ordered by the first renamed dart attached to them;
        // isolated vertices (only the 0-star has one) keep a fixed name.
        let mut vertex_rank: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, a) in order.iter().enumerate() {
            if let Some(v) = self.attach.get(a) {
                vertex_rank.entry(v.clone()).or_insert(i);
            }
        }
        let mut ranked: Vec<(usize, VertexId)> = self
            .vertices
            .iter()
            .map(|v| (*vertex_rank.get(v).unwrap_or(&usize::MAX), v.clone()))
            .collect();
        ranked.sort();
        let mut vertex_rename: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (i, (_, v)) in ranked.iter().enumerate() {
            vertex_rename.insert(v.clone(), VertexId(format!("n{i}")));
        }

        let data = GraphData {
            arcs: self.arcs.iter().map(|a| arc_rename[a].clone()).collect(),
            involution: self
                .involution
                .iter()
                .map(|(a, b)| (arc_rename[a].clone(), arc_rename[b].clone()))
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| vertex_rename[v].clone())
                .collect(),
            attach: self
                .attach
                .iter()
                .map(|(a, v)| (arc_rename[a].clone(), vertex_rename[v].clone()))
                .collect(),
            boundary: Some(
                self.boundary
                    .iter()
                    .map(|a| arc_rename[a].clone())
                    .collect(),
            ),
        };
        let g = Graph::validate(data, Mode::Extended).expect("relabeling preserves validity");
        (g, arc_rename, vertex_rename)
    }
}

fn canonical_arc_order(g: &Graph, annotations: &BTreeMap<ArcId, String>) -> Vec<ArcId> {
    let arcs: Vec<ArcId> = g.arcs().iter().cloned().collect();
    if arcs.is_empty() {
        return arcs;
    }
    let base: BTreeMap<ArcId, String> = arcs
        .iter()
        .map(|a| {
            let ann = annotations.get(a).cloned().unwrap_or_default();
            let role = format!(
                "{}|{}|{}",
                ann,
                if g.is_dart(a) { "d" } else if g.boundary().contains(a) { "b" } else { "l" },
                g.attach(a).map(|v| g.nbhd(v).len()).unwrap_or(0)
            );
            (a.clone(), role)
        })
        .collect();
    best_order(g, base)
}

/// Refine colors to a stable partition; if discrete, read off the order;
/// otherwise individualize each member of the first tied class and keep the
/// branch whose final encoding is lexicographically smallest.
fn best_order(g: &Graph, colors: BTreeMap<ArcId, String>) -> Vec<ArcId> {
    let stable = refine(g, colors);
    let mut classes: BTreeMap<String, Vec<ArcId>> = BTreeMap::new();
    for (a, c) in &stable {
        classes.entry(c.clone()).or_default().push(a.clone());
    }
    if classes.values().all(|v| v.len() == 1) {
        let mut order: Vec<ArcId> = g.arcs().iter().cloned().collect();
        order.sort_by(|x, y| stable[x].cmp(&stable[y]));
        return order;
    }
    let tied = classes
        .values()
        .find(|v| v.len() > 1)
        .expect("some class is tied")
        .clone();
    let mut best: Option<(String, Vec<ArcId>)> = None;
    for pick in &tied {
        let mut branch = stable.clone();
        branch.insert(pick.clone(), format!("!{}", branch[pick]));
        let order = best_order(g, branch);
        let key = encode_in_order(g, &order);
        if best.as_ref().map(|(k, _)| key < *k).unwrap_or(true) {
            best = Some((key, order));
        }
    }
    best.expect("tied class is nonempty").1
}

fn refine(g: &Graph, mut colors: BTreeMap<ArcId, String>) -> BTreeMap<ArcId, String> {
    loop {
        let mut next: BTreeMap<ArcId, String> = BTreeMap::new();
        for a in g.arcs() {
            let partner = &colors[g.involute(a)];
            let sibling = match g.attach(a) {
                Some(v) => {
                    let mut sib: Vec<&String> =
                        g.nbhd(v).iter().filter(|d| *d != a).map(|d| &colors[d]).collect();
                    sib.sort();
                    sib.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")
                }
                None => String::new(),
            };
            next.insert(a.clone(), format!("{}#{}#{}", colors[a], partner, sibling));
        }
        // Compress color strings to ranks to keep them short.
        let mut palette: Vec<&String> = next.values().collect();
        palette.sort();
        palette.dedup();
        let rank: BTreeMap<String, usize> = palette
            .iter()
            .enumerate()
            .map(|(i, s)| ((*s).clone(), i))
            .collect();
        let compressed: BTreeMap<ArcId, String> = next
            .iter()
            .map(|(a, s)| (a.clone(), format!("{:04}", rank[s])))
            .collect();
        let old_classes = class_count(&colors);
        let new_classes = class_count(&compressed);
        let done = new_classes == old_classes;
        colors = compressed;
        if done {
            return colors;
        }
    }
}

fn class_count(colors: &BTreeMap<ArcId, String>) -> usize {
    let mut seen: BTreeSet<&String> = BTreeSet::new();
    for c in colors.values() {
        seen.insert(c);
    }
    seen.len()
}

fn encode_in_order(g: &Graph, order: &[ArcId]) -> String {
    let pos: BTreeMap<&ArcId, usize> = order.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut out = String::new();
    for a in order {
        let p = pos[g.involute(a)];
        let v = g
            .attach(a)
            .map(|v| {
                let legs: Vec<usize> = g.nbhd(v).iter().map(|d| pos[d]).collect();
                format!("{legs:?}")
            })
            .unwrap_or_default();
        let b = g.boundary().contains(a);
        out.push_str(&format!("{p}:{v}:{b};"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Arc(ArcId),
    Vertex(VertexId),
}

struct UnionFind {
    parent: BTreeMap<Item, Item>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind {
            parent: BTreeMap::new(),
        }
    }

    fn add(&mut self, x: Item) {
        self.parent.entry(x.clone()).or_insert(x);
    }

    fn find(&mut self, x: &Item) -> Item {
        let p = self.parent[x].clone();
        if p == *x {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(x.clone(), root.clone());
        root
    }

    fn union(&mut self, x: &Item, y: &Item) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            self.parent.insert(rx, ry);
        }
    }

    fn class_count(&mut self) -> usize {
        let keys: Vec<Item> = self.parent.keys().cloned().collect();
        let mut roots = BTreeSet::new();
        for k in keys {
            roots.insert(self.find(&k));
        }
        roots.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_arc_no_dart(boundary: Option<&[&str]>) -> GraphData {
        let mut data = GraphData::default();
        data.arcs = ["a", "a†"].iter().map(|s| ArcId::from(*s)).collect();
        data.involution.insert("a".into(), "a†".into());
        data.involution.insert("a†".into(), "a".into());
        data.boundary = boundary.map(|b| b.iter().map(|s| ArcId::from(*s)).collect());
        data
    }

    #[test]
    fn five_star_is_valid() {
        let g = Graph::standard(StandardGraph::Star(5));
        assert_eq!(g.arcs().len(), 10);
        assert_eq!(g.vertices().len(), 1);
        assert_eq!(g.edges().len(), 5);
        assert_eq!(g.boundary().len(), 5);
        assert!(g.is_connected());
    }

    #[test]
    fn edge_is_smallest_plain_graph() {
        let g = Graph::standard(StandardGraph::Edge);
        assert_eq!(g.arcs().len(), 2);
        assert!(g.vertices().is_empty());
        assert_eq!(g.boundary().len(), 2);
        assert!(g.is_connected());
        assert!(g.is_tree());
    }

    /// Enumerate every boundary subset of the two-arc, zero-dart graph and
    /// check which ones each mode accepts. Only `boundary = arcs` (the edge)
    /// passes plain validation; extended validation additionally accepts the
    /// empty boundary (the nodeless loop) and rejects the two half-closed
    /// choices.
    #[test]
    fn two_arc_no_dart_boundary_subsets() {
        let subsets: Vec<Vec<&str>> = vec![vec![], vec!["a"], vec!["a†"], vec!["a", "a†"]];
        for sub in subsets {
            let data = two_arc_no_dart(Some(&sub));
            let plain = Graph::validate(data.clone(), Mode::Plain);
            let extended = Graph::validate(data, Mode::Extended);
            match sub.len() {
                0 => {
                    assert!(plain.is_err());
                    let g = extended.expect("nodeless loop is extended-valid");
                    assert!(g.is_nodeless_loop());
                    assert!(g.is_connected());
                    assert!(!g.is_tree());
                }
                1 => {
                    assert!(plain.is_err());
                    assert!(extended.is_err());
                }
                2 => {
                    assert!(plain.is_ok());
                    assert!(extended.is_ok());
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn star_zero_is_isolated_vertex() {
        let g = Graph::standard(StandardGraph::Star(0));
        assert!(g.arcs().is_empty());
        assert_eq!(g.vertices().len(), 1);
        assert!(g.is_connected());
        assert!(g.is_tree());
    }

    #[test]
    fn nodeless_loop_shape() {
        let g = Graph::standard(StandardGraph::NodelessLoop);
        assert_eq!(g.arcs().len(), 2);
        assert!(g.vertices().is_empty());
        assert!(g.boundary().is_empty());
        assert!(g.is_connected());
        assert_eq!(g.loop_arcs().len(), 2);
        assert_eq!(g.internal_edges().len(), 1);
    }

    #[test]
    fn loop_with_one_vertex_shape() {
        let g = Graph::standard(StandardGraph::LoopWithOneVertex);
        assert_eq!(g.vertices().len(), 1);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.internal_edges().len(), 1);
        assert!(!g.is_tree());
    }

    #[test]
    fn line_two_counts() {
        let g = Graph::standard(StandardGraph::Line(2));
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.internal_edges().len(), 1);
        assert!(g.is_tree());
    }

    #[test]
    fn disjoint_edges_are_disconnected() {
        let mut data = GraphData::default();
        for name in ["p", "p†", "q", "q†"] {
            data.arcs.insert(name.into());
        }
        data.involution.insert("p".into(), "p†".into());
        data.involution.insert("p†".into(), "p".into());
        data.involution.insert("q".into(), "q†".into());
        data.involution.insert("q†".into(), "q".into());
        let g = Graph::validate(data, Mode::Plain).unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn involution_fixpoint_is_rejected() {
        let mut data = GraphData::default();
        data.arcs.insert("a".into());
        data.involution.insert("a".into(), "a".into());
        let err = Graph::validate(data, Mode::Plain).unwrap_err();
        assert_eq!(err.clause, "involution");
    }

    #[test]
    fn standard_graphs_validate_in_both_modes() {
        let kinds = [
            StandardGraph::Edge,
            StandardGraph::Star(0),
            StandardGraph::Star(3),
            StandardGraph::Line(3),
            StandardGraph::LoopWithOneVertex,
        ];
        for kind in kinds {
            let g = Graph::standard(kind);
            let data = GraphData {
                arcs: g.arcs().clone(),
                involution: g.involution().clone(),
                vertices: g.vertices().clone(),
                attach: g.attach_table().clone(),
                boundary: Some(g.boundary().clone()),
            };
            assert!(Graph::validate(data.clone(), Mode::Plain).is_ok());
            assert!(Graph::validate(data, Mode::Extended).is_ok());
        }
        // The nodeless loop is extended-only.
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let data = GraphData {
            arcs: k.arcs().clone(),
            involution: k.involution().clone(),
            vertices: k.vertices().clone(),
            attach: k.attach_table().clone(),
            boundary: Some(k.boundary().clone()),
        };
        assert!(Graph::validate(data.clone(), Mode::Plain).is_err());
        assert!(Graph::validate(data, Mode::Extended).is_ok());
    }

    #[test]
    fn arc_count_is_even_and_edges_halve_it() {
        for kind in [
            StandardGraph::Edge,
            StandardGraph::Star(4),
            StandardGraph::Line(2),
            StandardGraph::NodelessLoop,
        ] {
            let g = Graph::standard(kind);
            assert_eq!(g.arcs().len() % 2, 0);
            assert_eq!(g.edges().len(), g.arcs().len() / 2);
        }
    }

    #[test]
    fn canonical_relabel_is_iso_invariant() {
        // Rename the 3-star's arcs arbitrarily; canonical forms must agree.
        let g = Graph::standard(StandardGraph::Star(3));
        let mut data = GraphData::default();
        data.vertices.insert("w".into());
        for (old, new) in [("1", "x"), ("2", "yy"), ("3", "z")] {
            let d = ArcId::from(new);
            let b = ArcId(format!("{new}^"));
            data.arcs.insert(d.clone());
            data.arcs.insert(b.clone());
            data.involution.insert(d.clone(), b.clone());
            data.involution.insert(b, d.clone());
            data.attach.insert(d, "w".into());
            let _ = old;
        }
        let h = Graph::validate(data, Mode::Plain).unwrap();
        let (gc, _, _) = g.canonical_relabel(&BTreeMap::new());
        let (hc, _, _) = h.canonical_relabel(&BTreeMap::new());
        assert_eq!(gc.encode(), hc.encode());
    }
}
