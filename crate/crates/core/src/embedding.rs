//! Étale maps, embeddings, and the poset `Emb(G)` of embedding classes.
//!
//! An embedding class is stored canonically as a pair (vertex set, boundary
//! set) of subsets of the target graph; representatives are reconstructed on
//! demand by building the cut graph. Unions and the pullback–pushout
//! construction operate on concrete étale maps.

use crate::diag::{violation, Violation};
use crate::graph::{ArcId, Edge, Graph, GraphData, Mode, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A natural transformation of graph diagrams: an arc map plus a vertex map.
/// Étaleness and the embedding conditions are checked separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleMap {
    pub source: Graph,
    pub target: Graph,
    pub arc_map: BTreeMap<ArcId, ArcId>,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
}

impl EtaleMap {
    pub fn identity(g: &Graph) -> EtaleMap {
        EtaleMap {
            source: g.clone(),
            target: g.clone(),
            arc_map: g.arcs().iter().map(|a| (a.clone(), a.clone())).collect(),
            vertex_map: g.vertices().iter().map(|v| (v.clone(), v.clone())).collect(),
        }
    }

    pub fn arc(&self, a: &ArcId) -> &ArcId {
        &self.arc_map[a]
    }

    pub fn vertex(&self, v: &VertexId) -> &VertexId {
        &self.vertex_map[v]
    }

    /// Checks the étale conditions: naturality of both maps, darts to darts,
    /// loop-type arcs to loop-type arcs, and the pullback condition (the arc
    /// map restricts to a bijection on each vertex neighborhood).
    pub fn check_etale(&self) -> Result<(), Violation> {
        for a in self.source.arcs() {
            let fa = match self.arc_map.get(a) {
                Some(fa) => fa,
                None => return violation("totality", format!("arc {a} has no image")),
            };
            if !self.target.arcs().contains(fa) {
                return violation("totality", format!("image {fa} of {a} is not a target arc"));
            }
            let expected = self.target.involute(&self.arc_map[a]);
            let got = &self.arc_map[self.source.involute(a)];
            if expected != got {
                return violation(
                    "naturality",
                    format!("arc map does not commute with involution at {a}"),
                );
            }
        }
        for v in self.source.vertices() {
            if !self.vertex_map.contains_key(v) {
                return violation("totality", format!("vertex {v} has no image"));
            }
            if !self.target.vertices().contains(&self.vertex_map[v]) {
                return violation(
                    "totality",
                    format!("image of vertex {v} is not a target vertex"),
                );
            }
        }
        for (d, v) in self.source.attach_table() {
            let fd = &self.arc_map[d];
            match self.target.attach(fd) {
                Some(w) if w == &self.vertex_map[v] => {}
                Some(w) => {
                    return violation(
                        "naturality",
                        format!("dart {d} attaches at {v} but its image attaches at {w}"),
                    )
                }
                None => {
                    return violation(
                        "darts",
                        format!("dart {d} maps to non-dart arc {fd}"),
                    )
                }
            }
        }
        let src_loops = self.source.loop_arcs();
        for a in &src_loops {
            let fa = &self.arc_map[a];
            if self.target.is_dart(fa) || self.target.boundary().contains(fa) {
                return violation(
                    "loop arcs",
                    format!("loop-type arc {a} maps to non-loop arc {fa}"),
                );
            }
        }
        for v in self.source.vertices() {
            let w = &self.vertex_map[v];
            let image: BTreeSet<&ArcId> = self.source.nbhd(v).iter().map(|d| &self.arc_map[d]).collect();
            let nbhd_w: BTreeSet<&ArcId> = self.target.nbhd(w).iter().collect();
            if image.len() != self.source.nbhd(v).len() || image != nbhd_w {
                return violation(
                    "pullback",
                    format!("neighborhood of {v} does not biject onto neighborhood of {w}"),
                );
            }
        }
        Ok(())
    }

    /// Checks the embedding conditions: étale, both graphs connected, and
    /// injective on vertices.
    pub fn check_embedding(&self) -> Result<(), Violation> {
        self.check_etale()?;
        if !self.source.is_connected() {
            return violation("connectivity", "source is not connected".to_string());
        }
        if !self.target.is_connected() {
            return violation("connectivity", "target is not connected".to_string());
        }
        let mut seen: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
        for (v, w) in &self.vertex_map {
            if let Some(prev) = seen.insert(w, v) {
                return violation(
                    "vertex injectivity",
                    format!("vertices {prev} and {v} share the image {w}"),
                );
            }
        }
        Ok(())
    }

    /// Composition `self ∘ inner` (apply `inner` first).
    pub fn compose(&self, inner: &EtaleMap) -> EtaleMap {
        assert_eq!(inner.target, self.source, "composition mismatch");
        EtaleMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            arc_map: inner
                .arc_map
                .iter()
                .map(|(a, b)| (a.clone(), self.arc_map[b].clone()))
                .collect(),
            vertex_map: inner
                .vertex_map
                .iter()
                .map(|(v, w)| (v.clone(), self.vertex_map[w].clone()))
                .collect(),
        }
    }
}

/// Canonical key of an element of `Emb(G)`: the image vertex set and the
/// image of the source boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmbClass {
    pub vertices: BTreeSet<VertexId>,
    pub boundary: BTreeSet<ArcId>,
}

impl EmbClass {
    pub fn new(vertices: BTreeSet<VertexId>, boundary: BTreeSet<ArcId>) -> Self {
        EmbClass { vertices, boundary }
    }

    /// Edge classes have no vertices but a nonempty boundary; the class with
    /// both sets empty is the identity class of a nodeless loop.
    pub fn is_edge(&self) -> bool {
        self.vertices.is_empty() && !self.boundary.is_empty()
    }

    pub fn is_nodeless_identity(&self) -> bool {
        self.vertices.is_empty() && self.boundary.is_empty()
    }

    /// The vertex-star class of `v` in `g`.
    pub fn star_of(g: &Graph, v: &VertexId) -> EmbClass {
        let boundary = g.nbhd(v).iter().map(|d| g.involute(d).clone()).collect();
        EmbClass {
            vertices: [v.clone()].into_iter().collect(),
            boundary,
        }
    }

    /// The edge class of `e` in `g`.
    pub fn edge_of(g: &Graph, e: &Edge) -> EmbClass {
        let _ = g;
        EmbClass {
            vertices: BTreeSet::new(),
            boundary: [e.lo.clone(), e.hi.clone()].into_iter().collect(),
        }
    }

    pub fn identity_of(g: &Graph) -> EmbClass {
        EmbClass {
            vertices: g.vertices().clone(),
            boundary: if g.is_nodeless_loop() {
                BTreeSet::new()
            } else {
                g.boundary().clone()
            },
        }
    }

    /// If this is a vertex-star class, its vertex.
    pub fn star_vertex<'a>(&'a self, g: &Graph) -> Option<&'a VertexId> {
        if self.vertices.len() != 1 {
            return None;
        }
        let v = self.vertices.iter().next().unwrap();
        if *self == EmbClass::star_of(g, v) {
            Some(v)
        } else {
            None
        }
    }
}

impl fmt::Display for EmbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        let bs: Vec<String> = self.boundary.iter().map(|a| a.to_string()).collect();
        write!(f, "({{{}}},{{{}}})", vs.join(" "), bs.join(" "))
    }
}

/// The class of an embedding: image vertex set and image of the source
/// boundary.
pub fn class_of(f: &EtaleMap) -> EmbClass {
    EmbClass {
        vertices: f.vertex_map.values().cloned().collect(),
        boundary: f
            .source
            .boundary()
            .iter()
            .map(|b| f.arc_map[b].clone())
            .collect(),
    }
}

/// The poset `Emb(G)`, fully enumerated, with the order relation tabulated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embeddings {
    classes: Vec<EmbClass>,
    index: BTreeMap<EmbClass, usize>,
    leq: Vec<Vec<bool>>,
}

impl Embeddings {
    /// Returns the cached table for a connected graph, computing it on first
    /// use. Rejects disconnected input.
    pub fn of(g: &Graph) -> Result<&Embeddings, Violation> {
        if let Some(table) = g.emb_cache().get() {
            return Ok(table);
        }
        if !g.is_connected() {
            return violation("connectivity", "Emb(G) requires a connected graph".to_string());
        }
        let table = Embeddings::compute(g);
        let _ = g.emb_cache().set(table);
        Ok(g.emb_cache().get().expect("just set"))
    }

    fn compute(g: &Graph) -> Embeddings {
        let classes = enumerate_classes(g);
        let index: BTreeMap<EmbClass, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        let n = classes.len();
        let mut leq = vec![vec![false; n]; n];
        for (j, k) in classes.iter().enumerate() {
            let rep = representative(g, k);
            for c in enumerate_classes(&rep.source) {
                let pushed = push_forward(&rep, &c);
                let i = index[&pushed];
                leq[i][j] = true;
            }
        }
        Embeddings { classes, index, leq }
    }

    pub fn classes(&self) -> &[EmbClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, c: &EmbClass) -> bool {
        self.index.contains_key(c)
    }

    pub fn index_of(&self, c: &EmbClass) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// The partial order: `h ≤ k` when some class of a representative of `k`
    /// pushes forward to `h`.
    pub fn leq(&self, h: &EmbClass, k: &EmbClass) -> Result<bool, Violation> {
        let (i, j) = match (self.index.get(h), self.index.get(k)) {
            (Some(i), Some(j)) => (*i, *j),
            _ => return violation("membership", "class is not in Emb(G)".to_string()),
        };
        Ok(self.leq[i][j])
    }

    pub fn is_vertex_disjoint(&self, h: &EmbClass, k: &EmbClass) -> bool {
        h.vertices.is_disjoint(&k.vertices)
    }

    /// `l` is a union of `h` and `k` when it bounds both and its vertex set
    /// is exactly the union of theirs.
    pub fn is_union(&self, l: &EmbClass, h: &EmbClass, k: &EmbClass) -> Result<bool, Violation> {
        Ok(self.leq(h, l)? && self.leq(k, l)? && {
            let mut both = h.vertices.clone();
            both.extend(k.vertices.iter().cloned());
            l.vertices == both
        })
    }

    pub fn all_unions(&self, h: &EmbClass, k: &EmbClass) -> Result<Vec<EmbClass>, Violation> {
        let mut out = Vec::new();
        for l in &self.classes {
            if self.is_union(l, h, k)? {
                out.push(l.clone());
            }
        }
        Ok(out)
    }

    /// All triples `(l, h, k)` with `l` a union of `h` and `k`, by index.
    pub fn union_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.classes.len() {
            for j in 0..self.classes.len() {
                for l in 0..self.classes.len() {
                    if self
                        .is_union(&self.classes[l], &self.classes[i], &self.classes[j])
                        .expect("indices in range")
                    {
                        out.push((l, i, j));
                    }
                }
            }
        }
        out
    }
}

/// The elements of `Emb(g)` for a connected graph: one edge class per edge,
/// one class per connected cut (a nonempty vertex subset plus a set of cut
/// internal edges), and for the nodeless loop the identity class.
pub fn enumerate_embeddings(g: &Graph) -> Result<Vec<EmbClass>, Violation> {
    Ok(Embeddings::of(g)?.classes().to_vec())
}

fn enumerate_classes(g: &Graph) -> Vec<EmbClass> {
    let mut out: BTreeSet<EmbClass> = BTreeSet::new();
    for e in g.edges() {
        out.insert(EmbClass::edge_of(g, e));
    }
    if g.is_nodeless_loop() {
        out.insert(EmbClass::identity_of(g));
        return out.into_iter().collect();
    }
    let vertices: Vec<VertexId> = g.vertices().iter().cloned().collect();
    for s_bits in 1u64..(1 << vertices.len()) {
        let s: BTreeSet<VertexId> = vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| s_bits & (1 << i) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        let cuttable: Vec<Edge> = g
            .internal_edges()
            .into_iter()
            .filter(|e| {
                e.arcs().iter().all(|a| {
                    g.attach(a).map(|v| s.contains(v)).unwrap_or(false)
                })
            })
            .collect();
        for c_bits in 0u64..(1 << cuttable.len()) {
            let cut: BTreeSet<Edge> = cuttable
                .iter()
                .enumerate()
                .filter(|(i, _)| c_bits & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect();
            if cut_is_connected(g, &s, &cut) {
                out.insert(class_from_cut(g, &s, &cut));
            }
        }
    }
    out.into_iter().collect()
}

/// Boundary of the `(S, C)` class: arcs whose involute is a dart attached in
/// `S`, and which are themselves either not darts, darts attached outside
/// `S`, or arcs of a cut edge.
fn class_from_cut(g: &Graph, s: &BTreeSet<VertexId>, cut: &BTreeSet<Edge>) -> EmbClass {
    let mut boundary = BTreeSet::new();
    for a in g.arcs() {
        let partner = g.involute(a);
        let partner_in_s = g.attach(partner).map(|v| s.contains(v)).unwrap_or(false);
        if !partner_in_s {
            continue;
        }
        let a_in_s = g.attach(a).map(|v| s.contains(v)).unwrap_or(false);
        if !a_in_s || cut.contains(&g.edge_of(a)) {
            boundary.insert(a.clone());
        }
    }
    EmbClass {
        vertices: s.clone(),
        boundary,
    }
}

fn cut_is_connected(g: &Graph, s: &BTreeSet<VertexId>, cut: &BTreeSet<Edge>) -> bool {
    // Walk the vertex set along internal edges with both ends in S that are
    // not cut.
    let start = match s.iter().next() {
        Some(v) => v.clone(),
        None => return false,
    };
    let mut seen: BTreeSet<VertexId> = [start.clone()].into_iter().collect();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for d in g.nbhd(&v) {
            let partner = g.involute(d);
            if cut.contains(&g.edge_of(d)) {
                continue;
            }
            if let Some(w) = g.attach(partner) {
                if s.contains(w) && !seen.contains(w) {
                    seen.insert(w.clone());
                    stack.push(w.clone());
                }
            }
        }
    }
    seen.len() == s.len()
}

/// Reconstructs the canonical representative embedding of a class: the cut
/// graph, with cut-arc duplicates named deterministically by suffixing the
/// dart id.
pub fn representative(g: &Graph, class: &EmbClass) -> EtaleMap {
    if class.is_nodeless_identity() {
        assert!(g.is_nodeless_loop(), "identity class with empty data needs a nodeless loop");
        return EtaleMap::identity(g);
    }
    if class.is_edge() {
        let mut arcs: Vec<ArcId> = class.boundary.iter().cloned().collect();
        assert_eq!(arcs.len(), 2, "edge class has two boundary arcs");
        let (a, b) = (arcs.remove(0), arcs.remove(0));
        assert_eq!(g.involute(&a), &b, "edge class arcs must be involutes");
        let mut data = GraphData::default();
        data.arcs = [a.clone(), b.clone()].into_iter().collect();
        data.involution.insert(a.clone(), b.clone());
        data.involution.insert(b.clone(), a.clone());
        let source = Graph::validate(data, Mode::Plain).expect("edge graph is valid");
        return EtaleMap {
            source,
            target: g.clone(),
            arc_map: [(a.clone(), a), (b.clone(), b)].into_iter().collect(),
            vertex_map: BTreeMap::new(),
        };
    }

    let s = &class.vertices;
    // Recover the cut set: internal edges with both arcs in the class
    // boundary and both darts attached in S.
    let cut: BTreeSet<Edge> = g
        .internal_edges()
        .into_iter()
        .filter(|e| {
            e.arcs().iter().all(|a| {
                class.boundary.contains(*a)
                    && g.attach(a).map(|v| s.contains(v)).unwrap_or(false)
            })
        })
        .collect();

    let mut data = GraphData::default();
    let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
    data.vertices = s.clone();
    let used: BTreeSet<ArcId> = g.arcs().clone();
    for v in s {
        for d in g.nbhd(v) {
            data.arcs.insert(d.clone());
            data.attach.insert(d.clone(), v.clone());
            arc_map.insert(d.clone(), d.clone());
        }
    }
    for v in s {
        for d in g.nbhd(v) {
            let partner = g.involute(d);
            let partner_inside = g
                .attach(partner)
                .map(|w| s.contains(w))
                .unwrap_or(false);
            if partner_inside && !cut.contains(&g.edge_of(d)) {
                data.involution.insert(d.clone(), partner.clone());
            } else {
                let fresh = fresh_cut_name(d, &used, &data.arcs);
                data.arcs.insert(fresh.clone());
                data.involution.insert(d.clone(), fresh.clone());
                data.involution.insert(fresh.clone(), d.clone());
                arc_map.insert(fresh, partner.clone());
            }
        }
    }
    let source = Graph::validate(data, Mode::Plain).expect("cut graph is valid");
    let rep = EtaleMap {
        source,
        target: g.clone(),
        arc_map,
        vertex_map: s.iter().map(|v| (v.clone(), v.clone())).collect(),
    };
    debug_assert_eq!(&class_of(&rep), class);
    rep
}

fn fresh_cut_name(d: &ArcId, used: &BTreeSet<ArcId>, also: &BTreeSet<ArcId>) -> ArcId {
    let mut name = format!("{}*", d.0);
    while used.contains(&ArcId(name.clone())) || also.contains(&ArcId(name.clone())) {
        name.push('*');
    }
    ArcId(name)
}

/// A decomposition of a class as a union of one vertex star and a
/// complementary class on the remaining vertices: exists whenever the
/// representative has an internal edge.
pub fn deletable_vertex_split(
    g: &Graph,
    class: &EmbClass,
) -> Option<(VertexId, EmbClass, EmbClass)> {
    let table = Embeddings::of(g).ok()?;
    let rep = representative(g, class);
    if rep.source.internal_edges().is_empty() || rep.source.vertices().is_empty() {
        return None;
    }
    let rest: BTreeSet<VertexId> = rep.source.vertices().iter().cloned().collect();
    for v in &rest {
        let star = push_forward(&rep, &EmbClass::star_of(&rep.source, v));
        let sub_table = Embeddings::of(&rep.source).ok()?;
        for c in sub_table.classes() {
            if c.vertices.iter().cloned().collect::<BTreeSet<_>>()
                != rest.iter().filter(|w| *w != v).cloned().collect::<BTreeSet<_>>()
            {
                continue;
            }
            let k = push_forward(&rep, c);
            if table.is_vertex_disjoint(&star, &k)
                && table.is_union(class, &star, &k).unwrap_or(false)
            {
                return Some((rep.vertex(v).clone(), star, k));
            }
        }
    }
    None
}

/// Image of a class under an embedding: elementwise image of both sets.
pub fn push_forward(f: &EtaleMap, class: &EmbClass) -> EmbClass {
    EmbClass {
        vertices: class.vertices.iter().map(|v| f.vertex(v).clone()).collect(),
        boundary: class.boundary.iter().map(|a| f.arc(a).clone()).collect(),
    }
}

/// Tags for elements of the pushout of two maps with common target.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    H(String),
    K(String),
}

impl Side {
    fn label(&self) -> String {
        match self {
            Side::H(s) => format!("h:{s}"),
            Side::K(s) => format!("k:{s}"),
        }
    }
}

/// Component-wise pullback of two embeddings followed by a pushout. Returns
/// the induced embedding into the common target, or `None` when the pullback
/// is empty. When the pullback is inhabited the result is a union of the two
/// inputs.
pub fn pullback_pushout_union(h: &EtaleMap, k: &EtaleMap) -> Option<EtaleMap> {
    assert_eq!(h.target, k.target, "embeddings must share a target");
    let g = &h.target;

    let mut arc_pairs = Vec::new();
    for a in h.source.arcs() {
        for b in k.source.arcs() {
            if h.arc(a) == k.arc(b) {
                arc_pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let mut vertex_pairs = Vec::new();
    for v in h.source.vertices() {
        for w in k.source.vertices() {
            if h.vertex(v) == k.vertex(w) {
                vertex_pairs.push((v.clone(), w.clone()));
            }
        }
    }
    if arc_pairs.is_empty() && vertex_pairs.is_empty() {
        return None;
    }

    let mut arcs_uf: BTreeMap<Side, Side> = BTreeMap::new();
    for a in h.source.arcs() {
        arcs_uf.insert(Side::H(a.0.clone()), Side::H(a.0.clone()));
    }
    for b in k.source.arcs() {
        arcs_uf.insert(Side::K(b.0.clone()), Side::K(b.0.clone()));
    }
    for (a, b) in &arc_pairs {
        uf_union(&mut arcs_uf, &Side::H(a.0.clone()), &Side::K(b.0.clone()));
    }
    let mut verts_uf: BTreeMap<Side, Side> = BTreeMap::new();
    for v in h.source.vertices() {
        verts_uf.insert(Side::H(v.0.clone()), Side::H(v.0.clone()));
    }
    for w in k.source.vertices() {
        verts_uf.insert(Side::K(w.0.clone()), Side::K(w.0.clone()));
    }
    for (v, w) in &vertex_pairs {
        uf_union(&mut verts_uf, &Side::H(v.0.clone()), &Side::K(w.0.clone()));
    }

    let arc_class = |x: &Side, uf: &mut BTreeMap<Side, Side>| -> ArcId {
        let root = uf_find(uf, x);
        let mut members: Vec<String> = uf
            .keys()
            .cloned()
            .collect::<Vec<_>>()
            .into_iter()
            .filter(|y| uf_find(uf, y) == root)
            .map(|y| y.label())
            .collect();
        members.sort();
        ArcId(members.join(","))
    };
    let vert_class = |x: &Side, uf: &mut BTreeMap<Side, Side>| -> VertexId {
        let root = uf_find(uf, x);
        let mut members: Vec<String> = uf
            .keys()
            .cloned()
            .collect::<Vec<_>>()
            .into_iter()
            .filter(|y| uf_find(uf, y) == root)
            .map(|y| y.label())
            .collect();
        members.sort();
        VertexId(members.join(","))
    };

    let mut data = GraphData::default();
    let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
    let mut vertex_map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut kind: BTreeMap<ArcId, (bool, bool, bool)> = BTreeMap::new(); // (dart, loop, boundary)
    let mut attach_of: BTreeMap<ArcId, VertexId> = BTreeMap::new();

    let sides: Vec<(Side, ArcId, bool)> = h
        .source
        .arcs()
        .iter()
        .map(|a| (Side::H(a.0.clone()), a.clone(), true))
        .chain(
            k.source
                .arcs()
                .iter()
                .map(|b| (Side::K(b.0.clone()), b.clone(), false)),
        )
        .collect();
    for (tag, orig, is_h) in &sides {
        let cls = arc_class(tag, &mut arcs_uf);
        data.arcs.insert(cls.clone());
        let src = if *is_h { &h.source } else { &k.source };
        let f = if *is_h { h } else { k };
        arc_map.insert(cls.clone(), f.arc(orig).clone());
        let entry = kind.entry(cls.clone()).or_insert((false, false, false));
        if src.is_dart(orig) {
            entry.0 = true;
            let v_tag = Side::new_vertex(*is_h, &src.attach(orig).unwrap().0);
            let vc = vert_class(&v_tag, &mut verts_uf);
            attach_of.insert(cls.clone(), vc);
        } else if src.boundary().contains(orig) {
            entry.2 = true;
        } else {
            entry.1 = true;
        }
        // Involution.
        let partner_tag = match tag {
            Side::H(s) => Side::H(h.source.involute(&ArcId(s.clone())).0.clone()),
            Side::K(s) => Side::K(k.source.involute(&ArcId(s.clone())).0.clone()),
        };
        let partner_cls = arc_class(&partner_tag, &mut arcs_uf);
        data.involution.insert(cls, partner_cls);
    }
    for (tag, orig, is_h) in sides {
        let _ = (tag, orig, is_h);
    }

    for v in h.source.vertices() {
        let cls = vert_class(&Side::H(v.0.clone()), &mut verts_uf);
        data.vertices.insert(cls.clone());
        vertex_map.insert(cls, h.vertex(v).clone());
    }
    for w in k.source.vertices() {
        let cls = vert_class(&Side::K(w.0.clone()), &mut verts_uf);
        data.vertices.insert(cls.clone());
        vertex_map.insert(cls, k.vertex(w).clone());
    }

    let mut boundary = BTreeSet::new();
    for (cls, (is_dart, is_loop, is_bdry)) in &kind {
        if *is_dart {
            data.attach.insert(cls.clone(), attach_of[cls].clone());
        } else if !*is_loop && *is_bdry {
            boundary.insert(cls.clone());
        }
    }
    data.boundary = Some(boundary);

    let source = Graph::validate(data, Mode::Extended).expect("pushout of embeddings is a graph");
    let ell = EtaleMap {
        source,
        target: g.clone(),
        arc_map,
        vertex_map,
    };
    debug_assert!(ell.check_embedding().is_ok());
    Some(ell)
}

impl Side {
    fn new_vertex(is_h: bool, name: &str) -> Side {
        if is_h {
            Side::H(name.to_string())
        } else {
            Side::K(name.to_string())
        }
    }
}

fn uf_find(uf: &mut BTreeMap<Side, Side>, x: &Side) -> Side {
    let p = uf[x].clone();
    if p == *x {
        return p;
    }
    let root = uf_find(uf, &p);
    uf.insert(x.clone(), root.clone());
    root
}

fn uf_union(uf: &mut BTreeMap<Side, Side>, x: &Side, y: &Side) {
    let rx = uf_find(uf, x);
    let ry = uf_find(uf, y);
    if rx != ry {
        uf.insert(rx, ry);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StandardGraph;

    fn star(n: usize) -> Graph {
        Graph::standard(StandardGraph::Star(n))
    }

    /// The quotient of the 5-star identifying arcs 2 ~ 5† and 2† ~ 5: one
    /// vertex, three legs, one loop edge.
    pub(crate) fn contracted_corolla() -> (Graph, EtaleMap) {
        let mut data = GraphData::default();
        data.vertices.insert("v".into());
        for (d, b) in [("1", "1†"), ("3", "3†"), ("4", "4†")] {
            data.arcs.insert(d.into());
            data.arcs.insert(b.into());
            data.involution.insert(d.into(), b.into());
            data.involution.insert(b.into(), d.into());
            data.attach.insert(d.into(), "v".into());
        }
        for a in ["2~", "5~"] {
            data.arcs.insert(a.into());
            data.attach.insert(a.into(), "v".into());
        }
        data.involution.insert("2~".into(), "5~".into());
        data.involution.insert("5~".into(), "2~".into());
        let g = Graph::validate(data, Mode::Plain).unwrap();

        let src = star(5);
        let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for (a, fa) in [
            ("1", "1"),
            ("1†", "1†"),
            ("2", "2~"),
            ("2†", "5~"),
            ("3", "3"),
            ("3†", "3†"),
            ("4", "4"),
            ("4†", "4†"),
            ("5", "5~"),
            ("5†", "2~"),
        ] {
            arc_map.insert(a.into(), fa.into());
        }
        let f = EtaleMap {
            source: src,
            target: g.clone(),
            arc_map,
            vertex_map: [(VertexId::from("v"), VertexId::from("v"))].into_iter().collect(),
        };
        (g, f)
    }

    #[test]
    fn contracted_corolla_is_embedding_not_mono() {
        let (_, f) = contracted_corolla();
        f.check_embedding().unwrap();
        let images: BTreeSet<&ArcId> = f.arc_map.values().collect();
        assert!(images.len() < f.arc_map.len(), "not injective on arcs");
    }

    #[test]
    fn identity_is_embedding() {
        for kind in [
            StandardGraph::Edge,
            StandardGraph::Star(3),
            StandardGraph::LoopWithOneVertex,
            StandardGraph::NodelessLoop,
        ] {
            let g = Graph::standard(kind);
            EtaleMap::identity(&g).check_embedding().unwrap();
        }
    }

    #[test]
    fn vertex_collapse_is_rejected() {
        // Two stars mapping onto one: send both vertices of line(2)'s cut to
        // the same star... simplest: map star(0) ⊔-like data is impossible,
        // so collapse two vertices of line(2) onto one vertex of star(2).
        let line = Graph::standard(StandardGraph::Line(2));
        // line(2): arcs e0,e0†,e1,e1†,e2,e2†; v1 has {e0†,e1}, v2 has {e1†,e2}.
        let tgt = Graph::standard(StandardGraph::LoopWithOneVertex);
        // Not étale-compatible in general; build a map collapsing v1,v2 ↦ v.
        let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for (a, fa) in [
            ("e0", "1†"),
            ("e0†", "1"),
            ("e1", "1†"),
            ("e1†", "1"),
            ("e2", "1†"),
            ("e2†", "1"),
        ] {
            arc_map.insert(a.into(), fa.into());
        }
        let f = EtaleMap {
            source: line,
            target: tgt,
            arc_map,
            vertex_map: [
                (VertexId::from("v1"), VertexId::from("v")),
                (VertexId::from("v2"), VertexId::from("v")),
            ]
            .into_iter()
            .collect(),
        };
        let err = f.check_embedding().unwrap_err();
        assert!(err.clause == "vertex injectivity" || err.clause == "pullback");
    }

    #[test]
    fn class_of_star_inclusion() {
        let g = Graph::standard(StandardGraph::LoopWithOneVertex);
        let v = VertexId::from("v");
        let cls = EmbClass::star_of(&g, &v);
        assert_eq!(cls.vertices.len(), 1);
        // nbhd(v)† = {1†,1}† = both arcs.
        assert_eq!(cls.boundary.len(), 2);
    }

    #[test]
    fn emb_star_counts() {
        for n in 0..=4 {
            let g = star(n);
            let classes = enumerate_embeddings(&g).unwrap();
            assert_eq!(classes.len(), n + 1, "|Emb(star {n})|");
        }
    }

    #[test]
    fn emb_loop_with_one_vertex_is_chain() {
        let g = Graph::standard(StandardGraph::LoopWithOneVertex);
        let table = Embeddings::of(&g).unwrap();
        assert_eq!(table.len(), 3);
        let edge = EmbClass::edge_of(&g, &g.edges()[0]);
        let cut_star = EmbClass::star_of(&g, &VertexId::from("v"));
        let id = EmbClass::identity_of(&g);
        assert!(table.leq(&edge, &cut_star).unwrap());
        assert!(table.leq(&cut_star, &id).unwrap());
        assert!(table.leq(&edge, &id).unwrap());
        assert!(!table.leq(&id, &cut_star).unwrap());
        assert!(!table.leq(&cut_star, &edge).unwrap());
    }

    #[test]
    fn emb_nodeless_loop_has_two_elements() {
        let g = Graph::standard(StandardGraph::NodelessLoop);
        let table = Embeddings::of(&g).unwrap();
        assert_eq!(table.len(), 2);
        let edge = EmbClass::edge_of(&g, &g.edges()[0]);
        let id = EmbClass::identity_of(&g);
        assert!(table.leq(&edge, &id).unwrap());
        assert!(!table.leq(&id, &edge).unwrap());
        assert_eq!(edge.boundary.len(), 2);
        assert!(id.boundary.is_empty());
    }

    #[test]
    fn emb_rejects_disconnected() {
        let mut data = GraphData::default();
        for name in ["p", "p†", "q", "q†"] {
            data.arcs.insert(name.into());
        }
        data.involution.insert("p".into(), "p†".into());
        data.involution.insert("p†".into(), "p".into());
        data.involution.insert("q".into(), "q†".into());
        data.involution.insert("q†".into(), "q".into());
        let g = Graph::validate(data, Mode::Plain).unwrap();
        assert!(enumerate_embeddings(&g).is_err());
    }

    #[test]
    fn boundary_inside_target_boundary_forces_identity() {
        // A class whose boundary lies inside ð(G) is the identity class.
        for kind in [
            StandardGraph::Star(3),
            StandardGraph::Line(2),
            StandardGraph::LoopWithOneVertex,
            StandardGraph::NodelessLoop,
        ] {
            let g = Graph::standard(kind);
            let id = EmbClass::identity_of(&g);
            for c in enumerate_embeddings(&g).unwrap() {
                if c.boundary.iter().all(|a| g.boundary().contains(a)) {
                    assert_eq!(c, id, "in {kind:?}");
                }
            }
        }
    }

    #[test]
    fn boundary_injective_on_edges_and_non_edges_separately() {
        for kind in [
            StandardGraph::Star(4),
            StandardGraph::Line(3),
            StandardGraph::LoopWithOneVertex,
        ] {
            let g = Graph::standard(kind);
            let classes = enumerate_embeddings(&g).unwrap();
            let mut seen_edge: BTreeMap<BTreeSet<ArcId>, EmbClass> = BTreeMap::new();
            let mut seen_rest: BTreeMap<BTreeSet<ArcId>, EmbClass> = BTreeMap::new();
            for c in classes {
                let book = if c.is_edge() { &mut seen_edge } else { &mut seen_rest };
                if let Some(prev) = book.insert(c.boundary.clone(), c.clone()) {
                    panic!("{kind:?}: classes {prev} and {c} share a boundary");
                }
            }
        }
    }

    #[test]
    fn pullback_pushout_on_loop_vertex_star_is_identity_class() {
        let g = Graph::standard(StandardGraph::LoopWithOneVertex);
        let v = VertexId::from("v");
        let iota = representative(&g, &EmbClass::star_of(&g, &v));
        let ell = pullback_pushout_union(&iota, &iota).expect("overlapping");
        assert_eq!(class_of(&ell), EmbClass::identity_of(&g));
    }

    #[test]
    fn pullback_pushout_identity_and_edges() {
        let g = Graph::standard(StandardGraph::Line(2));
        let id = EtaleMap::identity(&g);
        let ell = pullback_pushout_union(&id, &id).unwrap();
        assert_eq!(class_of(&ell), EmbClass::identity_of(&g));

        let e = EmbClass::edge_of(&g, &g.edges()[0]);
        let rep = representative(&g, &e);
        let ell = pullback_pushout_union(&rep, &rep).unwrap();
        assert_eq!(class_of(&ell), e);
    }

    #[test]
    fn pullback_pushout_disjoint_is_none() {
        let g = Graph::standard(StandardGraph::Line(2));
        // The two free ends share nothing.
        let e0 = representative(&g, &EmbClass::edge_of(&g, &g.edge_of(&"e0".into())));
        let e2 = representative(&g, &EmbClass::edge_of(&g, &g.edge_of(&"e2".into())));
        assert!(pullback_pushout_union(&e0, &e2).is_none());
    }

    #[test]
    fn pullback_pushout_output_is_union() {
        let g = Graph::standard(StandardGraph::Line(3));
        let table = Embeddings::of(&g).unwrap();
        let classes = table.classes().to_vec();
        for h in &classes {
            for k in &classes {
                let rh = representative(&g, h);
                let rk = representative(&g, k);
                if let Some(ell) = pullback_pushout_union(&rh, &rk) {
                    ell.check_embedding().unwrap();
                    let l = class_of(&ell);
                    assert!(table.is_union(&l, h, k).unwrap(), "{l} not a union of {h},{k}");
                }
            }
        }
    }

    #[test]
    fn classes_with_internal_edges_split_off_a_vertex() {
        for (name, g) in crate::corpus::corpus() {
            let table = Embeddings::of(&g).unwrap();
            for c in table.classes() {
                let rep = representative(&g, c);
                if rep.source.internal_edges().is_empty() || rep.source.vertices().is_empty() {
                    continue;
                }
                let (v, star, rest) = super::deletable_vertex_split(&g, c)
                    .unwrap_or_else(|| panic!("{name}: no split for {c}"));
                assert!(table.is_union(c, &star, &rest).unwrap());
                assert!(table.is_vertex_disjoint(&star, &rest));
                assert!(c.vertices.contains(&v) || c.is_nodeless_identity());
            }
        }
    }

    #[test]
    fn vertex_sum_inequality_with_equality_iff_union() {
        for (_, g) in crate::corpus::corpus() {
            let table = Embeddings::of(&g).unwrap();
            for l in table.classes() {
                for h in table.classes() {
                    for k in table.classes() {
                        if !(table.leq(h, l).unwrap() && table.leq(k, l).unwrap()) {
                            continue;
                        }
                        let overlap: BTreeSet<_> =
                            h.vertices.intersection(&k.vertices).collect();
                        let bound = h.vertices.len() + k.vertices.len() - overlap.len();
                        assert!(l.vertices.len() >= bound);
                        let is_union = table.is_union(l, h, k).unwrap();
                        assert_eq!(l.vertices.len() == bound, is_union);
                    }
                }
            }
        }
    }

    #[test]
    fn connected_boundaryless_vertexless_graph_is_nodeless_loop() {
        for (_, g) in crate::corpus::corpus() {
            if g.is_connected() && g.boundary().is_empty() && g.vertices().is_empty() {
                assert!(g.is_nodeless_loop());
            }
        }
        let k = Graph::standard(StandardGraph::NodelessLoop);
        assert!(k.is_connected() && k.boundary().is_empty() && k.vertices().is_empty());
    }

    #[test]
    fn far_apart_edges_have_no_union() {
        // The two free ends of line(3) bound no common class with an empty
        // vertex set, so their union set is empty.
        let g = Graph::standard(StandardGraph::Line(3));
        let table = Embeddings::of(&g).unwrap();
        let e0 = EmbClass::edge_of(&g, &g.edge_of(&"e0".into()));
        let e3 = EmbClass::edge_of(&g, &g.edge_of(&"e3".into()));
        assert!(table.all_unions(&e0, &e3).unwrap().is_empty());
    }

    #[test]
    fn leq_is_a_partial_order() {
        for kind in [
            StandardGraph::Star(3),
            StandardGraph::Line(2),
            StandardGraph::LoopWithOneVertex,
            StandardGraph::NodelessLoop,
        ] {
            let g = Graph::standard(kind);
            let table = Embeddings::of(&g).unwrap();
            let cs = table.classes();
            for a in cs {
                assert!(table.leq(a, a).unwrap(), "reflexive at {a}");
                for b in cs {
                    if table.leq(a, b).unwrap() && table.leq(b, a).unwrap() {
                        assert_eq!(a, b, "antisymmetry");
                    }
                    for c in cs {
                        if table.leq(a, b).unwrap() && table.leq(b, c).unwrap() {
                            assert!(table.leq(a, c).unwrap(), "transitivity");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn self_isomorphic_class_is_identity() {
        // An embedding with isomorphic source and target is an isomorphism:
        // any class whose representative has the same arc/vertex counts and
        // boundary size as G must be the identity class.
        for kind in [
            StandardGraph::Star(3),
            StandardGraph::LoopWithOneVertex,
            StandardGraph::NodelessLoop,
            StandardGraph::Line(2),
        ] {
            let g = Graph::standard(kind);
            for c in enumerate_embeddings(&g).unwrap() {
                let rep = representative(&g, &c);
                let same_shape = rep.source.arcs().len() == g.arcs().len()
                    && rep.source.vertices().len() == g.vertices().len()
                    && rep.source.boundary().len() == g.boundary().len()
                    && rep.source.edges().len() == g.edges().len();
                if same_shape {
                    assert_eq!(c, EmbClass::identity_of(&g), "in {kind:?}");
                }
            }
        }
    }
}
