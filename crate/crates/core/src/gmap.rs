//! Graphical maps in two presentations and the translations between them.
//!
//! A new graph map is a pair: an involutive arc function plus a total
//! function on embedding classes that preserves edges, unions, vertex
//! disjointness, and boundaries. The classical presentation stores a vertex
//! map into embedding classes instead. Translating classical to new goes
//! through graph substitution; the other direction restricts to vertex
//! stars. Graph substitution is also the engine behind active-inert
//! factorization and graph complements.

use crate::diag::{violation, Violation};
use crate::embedding::{class_of, push_forward, representative, EmbClass, Embeddings, EtaleMap};
use crate::graph::{ArcId, Graph, GraphData, Mode, VertexId};
use std::collections::{BTreeMap, BTreeSet};

/// A map in the (extended) graphical category, new presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewGraphMap {
    pub source: Graph,
    pub target: Graph,
    /// φ₀, involutive.
    pub arc_map: BTreeMap<ArcId, ArcId>,
    /// φ̂, total on Emb(source).
    pub emb_map: BTreeMap<EmbClass, EmbClass>,
}

/// The classical presentation: arc map plus vertex map into Emb(target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalMap {
    pub source: Graph,
    pub target: Graph,
    pub arc_map: BTreeMap<ArcId, ArcId>,
    pub vertex_map: BTreeMap<VertexId, EmbClass>,
}

/// Which of the two factorization classes a map belongs to. Isomorphisms are
/// both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub active: bool,
    pub inert: bool,
}

impl NewGraphMap {
    pub fn identity(g: &Graph) -> NewGraphMap {
        let table = Embeddings::of(g).expect("connected graph");
        NewGraphMap {
            source: g.clone(),
            target: g.clone(),
            arc_map: g.arcs().iter().map(|a| (a.clone(), a.clone())).collect(),
            emb_map: table
                .classes()
                .iter()
                .map(|c| (c.clone(), c.clone()))
                .collect(),
        }
    }

    /// The inert map associated to an embedding: the arc map of `f` plus the
    /// pushforward of classes.
    pub fn of_embedding(f: &EtaleMap) -> NewGraphMap {
        debug_assert!(f.check_embedding().is_ok());
        let table = Embeddings::of(&f.source).expect("connected source");
        NewGraphMap {
            source: f.source.clone(),
            target: f.target.clone(),
            arc_map: f.arc_map.clone(),
            emb_map: table
                .classes()
                .iter()
                .map(|c| (c.clone(), push_forward(f, c)))
                .collect(),
        }
    }

    pub fn apply_class(&self, c: &EmbClass) -> &EmbClass {
        &self.emb_map[c]
    }

    pub fn apply_arc(&self, a: &ArcId) -> &ArcId {
        &self.arc_map[a]
    }

    /// A stable textual key, used to sort and deduplicate hom-sets.
    pub fn encode(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.arc_map {
            out.push_str(&format!("{a}>{b};"));
        }
        out.push('/');
        for (c, d) in &self.emb_map {
            out.push_str(&format!("{c}>{d};"));
        }
        out
    }
}

/// Checks the four axioms of a new graph map. In plain mode, nodeless loops
/// are rejected as objects.
pub fn check_new_map(m: &NewGraphMap, mode: Mode) -> Result<(), Violation> {
    if mode == Mode::Plain && (m.source.is_nodeless_loop() || m.target.is_nodeless_loop()) {
        return violation("objects", "nodeless loops are not plain-mode objects".to_string());
    }
    if !m.source.is_connected() || !m.target.is_connected() {
        return violation("objects", "graphs must be connected".to_string());
    }
    let src = Embeddings::of(&m.source)?;
    let tgt = Embeddings::of(&m.target)?;

    // φ₀ total and involutive.
    for a in m.source.arcs() {
        let fa = match m.arc_map.get(a) {
            Some(fa) => fa,
            None => return violation("arc totality", format!("arc {a} has no image")),
        };
        if !m.target.arcs().contains(fa) {
            return violation("arc totality", format!("image {fa} is not a target arc"));
        }
        if m.arc_map[m.source.involute(a)] != *m.target.involute(fa) {
            return violation(
                "involutive",
                format!("arc map does not commute with involution at {a}"),
            );
        }
    }

    // φ̂ total on Emb(source), valued in Emb(target).
    for c in src.classes() {
        match m.emb_map.get(c) {
            None => {
                return violation("emb totality", format!("class {c} has no image"));
            }
            Some(d) if !tgt.contains(d) => {
                return violation("emb totality", format!("image {d} is not in Emb(target)"));
            }
            _ => {}
        }
    }

    // (i) edges to edges.
    for c in src.classes() {
        if c.is_edge() && !m.emb_map[c].is_edge() {
            return violation("(i)", format!("edge class {c} maps to non-edge {}", m.emb_map[c]));
        }
    }

    // (iv) boundaries: φ₀ restricted to ð(c) is injective with image ð(φ̂ c).
    for c in src.classes() {
        let image: Vec<ArcId> = c.boundary.iter().map(|a| m.arc_map[a].clone()).collect();
        let image_set: BTreeSet<ArcId> = image.iter().cloned().collect();
        if image_set.len() != image.len() {
            return violation("(iv)", format!("φ₀ is not injective on the boundary of {c}"));
        }
        if image_set != m.emb_map[c].boundary {
            return violation(
                "(iv)",
                format!(
                    "boundary of {} differs from the φ₀-image of the boundary of {c}",
                    m.emb_map[c]
                ),
            );
        }
    }

    // (ii) unions preserved.
    for (l, h, k) in src.union_triples() {
        let (cl, ch, ck) = (&src.classes()[l], &src.classes()[h], &src.classes()[k]);
        if !tgt.is_union(&m.emb_map[cl], &m.emb_map[ch], &m.emb_map[ck])? {
            return violation(
                "(ii)",
                format!("{cl} is a union of {ch},{ck} but the images are not"),
            );
        }
    }

    // (iii) vertex disjointness preserved.
    for h in src.classes() {
        for k in src.classes() {
            if src.is_vertex_disjoint(h, k) && !tgt.is_vertex_disjoint(&m.emb_map[h], &m.emb_map[k])
            {
                return violation(
                    "(iii)",
                    format!("{h},{k} are vertex disjoint but their images are not"),
                );
            }
        }
    }
    Ok(())
}

/// Componentwise composition `outer ∘ inner`.
pub fn compose(outer: &NewGraphMap, inner: &NewGraphMap) -> Result<NewGraphMap, Violation> {
    if inner.target != outer.source {
        return violation(
            "composition",
            "target of inner differs from source of outer".to_string(),
        );
    }
    Ok(NewGraphMap {
        source: inner.source.clone(),
        target: outer.target.clone(),
        arc_map: inner
            .arc_map
            .iter()
            .map(|(a, b)| (a.clone(), outer.arc_map[b].clone()))
            .collect(),
        emb_map: inner
            .emb_map
            .iter()
            .map(|(c, d)| (c.clone(), outer.emb_map[d].clone()))
            .collect(),
    })
}

/// Restriction to vertex stars: φ₁(v) = φ̂([ι_v]).
pub fn to_classical(m: &NewGraphMap) -> ClassicalMap {
    ClassicalMap {
        source: m.source.clone(),
        target: m.target.clone(),
        arc_map: m.arc_map.clone(),
        vertex_map: m
            .source
            .vertices()
            .iter()
            .map(|v| {
                let star = EmbClass::star_of(&m.source, v);
                (v.clone(), m.emb_map[&star].clone())
            })
            .collect(),
    }
}

/// Checks the classical axioms: pairwise vertex-disjoint vertex images, a
/// boundary bijection at each vertex over φ₀, and the collapse clause
/// (plain: some image is not an edge when ð(source) is empty; extended: an
/// all-edge image with empty source boundary forces a nodeless-loop target).
pub fn check_classical(c: &ClassicalMap, mode: Mode) -> Result<(), Violation> {
    if mode == Mode::Plain && (c.source.is_nodeless_loop() || c.target.is_nodeless_loop()) {
        return violation("objects", "nodeless loops are not plain-mode objects".to_string());
    }
    if !c.source.is_connected() || !c.target.is_connected() {
        return violation("objects", "graphs must be connected".to_string());
    }
    let tgt = Embeddings::of(&c.target)?;

    for a in c.source.arcs() {
        let fa = match c.arc_map.get(a) {
            Some(fa) => fa,
            None => return violation("arc totality", format!("arc {a} has no image")),
        };
        if !c.target.arcs().contains(fa) {
            return violation("arc totality", format!("image {fa} is not a target arc"));
        }
        if c.arc_map[c.source.involute(a)] != *c.target.involute(fa) {
            return violation(
                "involutive",
                format!("arc map does not commute with involution at {a}"),
            );
        }
    }

    for v in c.source.vertices() {
        let cls = match c.vertex_map.get(v) {
            Some(cls) => cls,
            None => return violation("vertex totality", format!("vertex {v} has no image")),
        };
        if !tgt.contains(cls) {
            return violation("vertex totality", format!("image {cls} is not in Emb(target)"));
        }
    }

    // (i) vertex images pairwise vertex disjoint.
    let mut used: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    for (v, cls) in &c.vertex_map {
        for w in &cls.vertices {
            if let Some(prev) = used.insert(w, v) {
                if prev != v {
                    return violation("(i)", format!("images of {prev} and {v} share the vertex {w}"));
                }
            }
        }
    }

    // (ii) boundary bijection at each vertex: d ↦ φ₀(d†) is injective from
    // nbhd(v) onto ð(φ₁(v)).
    for (v, cls) in &c.vertex_map {
        let mut image = BTreeSet::new();
        for d in c.source.nbhd(v) {
            let out = c.arc_map[c.source.involute(d)].clone();
            if !image.insert(out) {
                return violation("(ii)", format!("boundary bijection at {v} is not injective"));
            }
        }
        if image != cls.boundary {
            return violation(
                "(ii)",
                format!("boundary of φ₁({v}) does not match φ₀(nbhd({v})†)"),
            );
        }
    }

    // (iii) / (iii′) collapse clause.
    if c.source.boundary().is_empty() {
        let all_edges = c.vertex_map.values().all(|cls| cls.is_edge());
        match mode {
            Mode::Plain => {
                if all_edges {
                    return violation(
                        "(iii)",
                        "source has empty boundary but every vertex image is an edge".to_string(),
                    );
                }
            }
            Mode::Extended => {
                if all_edges && !c.target.is_nodeless_loop() {
                    return violation(
                        "(iii')",
                        "an all-edge image with empty source boundary needs a nodeless-loop target"
                            .to_string(),
                    );
                }
            }
        }
    }
    Ok(())
}

/// One piece of a substitution: a graph to insert at a vertex, with the leg
/// bijection keyed by the outward arcs `nbhd(v)†` of the base vertex.
#[derive(Debug, Clone)]
pub struct Piece {
    pub graph: Graph,
    /// outward arc of the base vertex ↦ boundary arc of `graph`.
    pub legs: BTreeMap<ArcId, ArcId>,
}

/// Result of substituting pieces into the vertices of a base graph.
#[derive(Debug, Clone)]
pub struct Substitution {
    pub graph: Graph,
    /// Canonical embeddings of the pieces into the substituted graph.
    pub piece_embeddings: BTreeMap<VertexId, EtaleMap>,
    /// Arcs of the substituted graph corresponding to base boundary arcs.
    pub residual: BTreeMap<ArcId, ArcId>,
    /// Members of each arc class, for deriving maps out of the result.
    pub members: BTreeMap<ArcId, Vec<SubMember>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubMember {
    /// Arc of the piece sitting at the given base vertex.
    Piece(VertexId, ArcId),
    /// Copy of a base boundary arc.
    Residual(ArcId),
}

impl SubMember {
    fn label(&self) -> String {
        match self {
            SubMember::Piece(v, a) => format!("p:{v}:{a}"),
            SubMember::Residual(a) => format!("r:{a}"),
        }
    }
}

/// Graph substitution: replace every vertex of `base` by its piece, gluing
/// piece boundaries along the leg bijections. Fails when a piece has the
/// wrong arity, a bijection is ill-typed, or (in plain mode) the result is a
/// nodeless loop.
pub fn substitute(
    base: &Graph,
    pieces: &BTreeMap<VertexId, Piece>,
    mode: Mode,
) -> Result<Substitution, Violation> {
    for v in base.vertices() {
        let piece = match pieces.get(v) {
            Some(p) => p,
            None => return violation("arity", format!("no piece assigned to vertex {v}")),
        };
        if !piece.graph.is_connected() {
            return violation("pieces", format!("piece at {v} is not connected"));
        }
        let outward: BTreeSet<ArcId> = base
            .nbhd(v)
            .iter()
            .map(|d| base.involute(d).clone())
            .collect();
        let keys: BTreeSet<ArcId> = piece.legs.keys().cloned().collect();
        if keys != outward {
            return violation(
                "arity",
                format!("legs of the piece at {v} are not keyed by nbhd({v})†"),
            );
        }
        let values: BTreeSet<ArcId> = piece.legs.values().cloned().collect();
        if values.len() != piece.legs.len() || values != *piece.graph.boundary() {
            return violation(
                "arity",
                format!("legs of the piece at {v} do not biject onto its boundary"),
            );
        }
    }

    // Union-find over tagged arcs of all pieces plus base boundary copies.
    let mut uf: BTreeMap<SubMember, SubMember> = BTreeMap::new();
    for (v, piece) in pieces {
        for a in piece.graph.arcs() {
            let m = SubMember::Piece(v.clone(), a.clone());
            uf.insert(m.clone(), m);
        }
    }
    for a in base.boundary() {
        let m = SubMember::Residual(a.clone());
        uf.insert(m.clone(), m);
    }
    // Loop-type arcs of the base (a nodeless-loop base) are never glued but
    // must survive into the result.
    for a in base.loop_arcs() {
        let m = SubMember::Residual(a.clone());
        uf.insert(m.clone(), m);
    }

    // For each dart d at v, the piece leg replacing the outward arc d† is
    // glued to whatever sits on the other side of the base edge.
    for v in base.vertices() {
        let piece = &pieces[v];
        for d in base.nbhd(v) {
            let outward = base.involute(d);
            let leg = piece.legs[outward].clone();
            let me = SubMember::Piece(v.clone(), leg);
            let other = if base.boundary().contains(outward) {
                SubMember::Residual(outward.clone())
            } else {
                let w = base
                    .attach(outward)
                    .expect("outward arc of a dart is a dart or boundary")
                    .clone();
                let w_piece = &pieces[&w];
                let w_leg = w_piece.legs[d].clone();
                SubMember::Piece(w.clone(), w_piece.graph.involute(&w_leg).clone())
            };
            sub_union(&mut uf, &me, &other);
        }
    }

    // Collect classes and name them by their sorted member labels.
    let keys: Vec<SubMember> = uf.keys().cloned().collect();
    let mut class_members: BTreeMap<SubMember, Vec<SubMember>> = BTreeMap::new();
    for k in &keys {
        let root = sub_find(&mut uf, k);
        class_members.entry(root).or_default().push(k.clone());
    }
    let mut name_of: BTreeMap<SubMember, ArcId> = BTreeMap::new();
    let mut members_of: BTreeMap<ArcId, Vec<SubMember>> = BTreeMap::new();
    for members in class_members.values() {
        let mut sorted = members.clone();
        sorted.sort();
        let labels: Vec<String> = sorted.iter().map(|m| m.label()).collect();
        let name = ArcId(labels.join(","));
        for m in &sorted {
            name_of.insert(m.clone(), name.clone());
        }
        members_of.insert(name, sorted);
    }

    let piece_vertex = |v: &VertexId, w: &VertexId| VertexId(format!("p:{v}:{w}"));

    let mut data = GraphData::default();
    let mut boundary = BTreeSet::new();
    for (name, members) in &members_of {
        data.arcs.insert(name.clone());
        let rep = &members[0];
        let partner = match rep {
            SubMember::Piece(v, a) => SubMember::Piece(v.clone(), pieces[v].graph.involute(a).clone()),
            SubMember::Residual(a) => {
                let b = base.involute(a);
                if let Some(v) = base.attach(b) {
                    let v = v.clone();
                    let leg = pieces[&v].legs[a].clone();
                    SubMember::Piece(v.clone(), pieces[&v].graph.involute(&leg).clone())
                } else {
                    SubMember::Residual(b.clone())
                }
            }
        };
        data.involution.insert(name.clone(), name_of[&partner].clone());

        let mut attach_at = None;
        let mut has_residual = false;
        let mut has_loop = false;
        for m in members {
            match m {
                SubMember::Piece(v, a) => {
                    if let Some(w) = pieces[v].graph.attach(a) {
                        attach_at = Some(piece_vertex(v, w));
                    } else if !pieces[v].graph.boundary().contains(a) {
                        has_loop = true;
                    }
                }
                SubMember::Residual(a) => {
                    if base.boundary().contains(a) {
                        has_residual = true;
                    } else {
                        has_loop = true;
                    }
                }
            }
        }
        if let Some(at) = attach_at {
            data.attach.insert(name.clone(), at);
        } else if has_residual && !has_loop {
            boundary.insert(name.clone());
        }
        // Classes with neither a dart nor a residual member are loop type:
        // cycles of edge pieces, or loop arcs of a nodeless piece.
    }
    for (v, piece) in pieces {
        for w in piece.graph.vertices() {
            data.vertices.insert(piece_vertex(v, w));
        }
    }
    data.boundary = Some(boundary);

    let graph = Graph::validate(data, Mode::Extended)?;
    if mode == Mode::Plain && graph.is_nodeless_loop() {
        return violation(
            "collapse",
            "substitution yields a nodeless loop, which plain mode rejects".to_string(),
        );
    }

    let mut piece_embeddings = BTreeMap::new();
    for (v, piece) in pieces {
        let emb = EtaleMap {
            source: piece.graph.clone(),
            target: graph.clone(),
            arc_map: piece
                .graph
                .arcs()
                .iter()
                .map(|a| {
                    (
                        a.clone(),
                        name_of[&SubMember::Piece(v.clone(), a.clone())].clone(),
                    )
                })
                .collect(),
            vertex_map: piece
                .graph
                .vertices()
                .iter()
                .map(|w| (w.clone(), piece_vertex(v, w)))
                .collect(),
        };
        debug_assert!(emb.check_etale().is_ok());
        piece_embeddings.insert(v.clone(), emb);
    }
    let base_loops = base.loop_arcs();
    let residual: BTreeMap<ArcId, ArcId> = base
        .boundary()
        .iter()
        .chain(base_loops.iter())
        .map(|a| (a.clone(), name_of[&SubMember::Residual(a.clone())].clone()))
        .collect();

    Ok(Substitution {
        graph,
        piece_embeddings,
        residual,
        members: members_of,
    })
}

fn sub_find(uf: &mut BTreeMap<SubMember, SubMember>, x: &SubMember) -> SubMember {
    let p = uf[x].clone();
    if p == *x {
        return p;
    }
    let root = sub_find(uf, &p);
    uf.insert(x.clone(), root.clone());
    root
}

fn sub_union(uf: &mut BTreeMap<SubMember, SubMember>, x: &SubMember, y: &SubMember) {
    let rx = sub_find(uf, x);
    let ry = sub_find(uf, y);
    if rx != ry {
        uf.insert(rx, ry);
    }
}

/// The substitution encoding a classical map composed with an embedding of
/// `base_rep` into its source: pieces are the representatives of the vertex
/// images of the classical map, legs come from the boundary bijections.
/// Returns the substitution together with the induced embedding of the
/// substituted graph into the target.
fn substitution_along(
    c: &ClassicalMap,
    base_rep: &EtaleMap,
) -> Result<(Substitution, EtaleMap), Violation> {
    let base = &base_rep.source;
    let mut pieces: BTreeMap<VertexId, Piece> = BTreeMap::new();
    let mut reps: BTreeMap<VertexId, EtaleMap> = BTreeMap::new();
    for v in base.vertices() {
        let gv = base_rep.vertex(v);
        let cls = &c.vertex_map[gv];
        let rep = representative(&c.target, cls);
        let by_image: BTreeMap<ArcId, ArcId> = rep
            .source
            .boundary()
            .iter()
            .map(|b| (rep.arc(b).clone(), b.clone()))
            .collect();
        let mut legs = BTreeMap::new();
        for d in base.nbhd(v) {
            let outward = base.involute(d).clone();
            let image = c.arc_map[base_rep.arc(&outward)].clone();
            let leg = match by_image.get(&image) {
                Some(leg) => leg.clone(),
                None => {
                    return violation(
                        "(ii)",
                        format!("no boundary arc of φ₁({gv}) lies over {image}"),
                    )
                }
            };
            legs.insert(outward, leg);
        }
        pieces.insert(
            v.clone(),
            Piece {
                graph: rep.source.clone(),
                legs,
            },
        );
        reps.insert(v.clone(), rep);
    }
    let sub = substitute(base, &pieces, Mode::Extended)?;

    // Induced embedding into the target: piece members map through their
    // representatives, residual members through φ₀ ∘ (base inclusion).
    let mut arc_map = BTreeMap::new();
    for (name, members) in &sub.members {
        let image_of = |m: &SubMember| match m {
            SubMember::Piece(v, a) => reps[v].arc(a).clone(),
            SubMember::Residual(a) => c.arc_map[base_rep.arc(a)].clone(),
        };
        let image = image_of(&members[0]);
        debug_assert!(
            members.iter().all(|m| image_of(m) == image),
            "gluing is compatible with target images"
        );
        arc_map.insert(name.clone(), image);
    }
    let mut vertex_map = BTreeMap::new();
    for (v, emb) in &sub.piece_embeddings {
        for w in emb.source.vertices() {
            vertex_map.insert(emb.vertex(w).clone(), reps[v].vertex(w).clone());
        }
    }
    let inert = EtaleMap {
        source: sub.graph.clone(),
        target: c.target.clone(),
        arc_map,
        vertex_map,
    };
    Ok((sub, inert))
}

/// Construction 𝔑: the new graph map of a classical map. Each class image is
/// computed by substituting the vertex images into the class representative
/// and taking the class of the induced embedding.
pub fn from_classical(c: &ClassicalMap) -> Result<NewGraphMap, Violation> {
    let src = Embeddings::of(&c.source)?;
    let _ = Embeddings::of(&c.target)?;
    let mut emb_map = BTreeMap::new();
    for cls in src.classes() {
        let rep = representative(&c.source, cls);
        let (_, inert) = substitution_along(c, &rep)?;
        debug_assert!(inert.check_embedding().is_ok());
        emb_map.insert(cls.clone(), class_of(&inert));
    }
    Ok(NewGraphMap {
        source: c.source.clone(),
        target: c.target.clone(),
        arc_map: c.arc_map.clone(),
        emb_map,
    })
}

/// Composition of classical maps through graph substitution: the composite
/// vertex map sends `v` to the 𝔑-image of `inner`'s vertex class under
/// `outer`.
pub fn compose_classical(
    outer: &ClassicalMap,
    inner: &ClassicalMap,
) -> Result<ClassicalMap, Violation> {
    if inner.target != outer.source {
        return violation(
            "composition",
            "target of inner differs from source of outer".to_string(),
        );
    }
    let outer_new = from_classical(outer)?;
    Ok(ClassicalMap {
        source: inner.source.clone(),
        target: outer.target.clone(),
        arc_map: inner
            .arc_map
            .iter()
            .map(|(a, b)| (a.clone(), outer.arc_map[b].clone()))
            .collect(),
        vertex_map: inner
            .vertex_map
            .iter()
            .map(|(v, cls)| (v.clone(), outer_new.emb_map[cls].clone()))
            .collect(),
    })
}

/// Active iff φ̂ preserves the top element; inert iff φ̂ restricts to vertex
/// stars and the pair is the map of an embedding.
pub fn classify(m: &NewGraphMap) -> Classification {
    let id_src = EmbClass::identity_of(&m.source);
    let id_tgt = EmbClass::identity_of(&m.target);
    let active = m.emb_map[&id_src] == id_tgt;

    let mut inert = true;
    let mut vertex_map = BTreeMap::new();
    for v in m.source.vertices() {
        let star = EmbClass::star_of(&m.source, v);
        match m.emb_map[&star].star_vertex(&m.target) {
            Some(w) => {
                vertex_map.insert(v.clone(), w.clone());
            }
            None => {
                inert = false;
                break;
            }
        }
    }
    if inert {
        let f = EtaleMap {
            source: m.source.clone(),
            target: m.target.clone(),
            arc_map: m.arc_map.clone(),
            vertex_map,
        };
        inert = f.check_embedding().is_ok() && NewGraphMap::of_embedding(&f) == *m;
    }
    Classification { active, inert }
}

/// Active-inert factorization through the substitution of the vertex images
/// into the source. The middle object is canonicalized by a deterministic
/// relabeling keyed on the inert images and active preimages, so factoring
/// the same map in different presentations yields equal middles.
pub fn factor(m: &NewGraphMap) -> Result<(NewGraphMap, NewGraphMap, Graph), Violation> {
    let c = to_classical(m);
    let id_rep = EtaleMap::identity(&m.source);
    let (sub, inert_raw) = substitution_along(&c, &id_rep)?;

    // Active part on arcs: a boundary arc maps to its residual copy; a dart
    // maps to the class of the piece arc replacing it (the involute of the
    // leg glued along its outward arc).
    let mut alpha_arc: BTreeMap<ArcId, ArcId> = BTreeMap::new();
    for a in m.source.arcs() {
        let image = if let Some(v) = m.source.attach(a) {
            let piece = &sub.piece_embeddings[v];
            let cls = &c.vertex_map[v];
            let rep = representative(&m.target, cls);
            let by_image: BTreeMap<ArcId, ArcId> = rep
                .source
                .boundary()
                .iter()
                .map(|b| (rep.arc(b).clone(), b.clone()))
                .collect();
            let outward = m.source.involute(a);
            let leg = by_image[&m.arc_map[outward]].clone();
            piece.arc(piece.source.involute(&leg)).clone()
        } else {
            sub.residual[a].clone()
        };
        alpha_arc.insert(a.clone(), image);
    }
    let alpha_classical = ClassicalMap {
        source: m.source.clone(),
        target: sub.graph.clone(),
        arc_map: alpha_arc,
        vertex_map: m
            .source
            .vertices()
            .iter()
            .map(|v| (v.clone(), class_of(&sub.piece_embeddings[v])))
            .collect(),
    };
    let alpha = from_classical(&alpha_classical)?;
    let iota = NewGraphMap::of_embedding(&inert_raw);

    // Canonicalize the middle object, pinning arcs by their inert image and
    // active preimages; the unique factorization isomorphism preserves both.
    let mut annotations: BTreeMap<ArcId, String> = BTreeMap::new();
    for arc in sub.graph.arcs() {
        let image = inert_raw.arc(arc);
        let mut preimages: Vec<String> = alpha
            .arc_map
            .iter()
            .filter(|(_, b)| *b == arc)
            .map(|(a, _)| a.to_string())
            .collect();
        preimages.sort();
        annotations.insert(arc.clone(), format!("i={image};p={}", preimages.join(",")));
    }
    let (middle, arc_ren, vert_ren) = sub.graph.canonical_relabel(&annotations);

    let alpha = NewGraphMap {
        source: m.source.clone(),
        target: middle.clone(),
        arc_map: alpha
            .arc_map
            .iter()
            .map(|(a, b)| (a.clone(), arc_ren[b].clone()))
            .collect(),
        emb_map: alpha
            .emb_map
            .iter()
            .map(|(c1, d)| (c1.clone(), rename_class(d, &arc_ren, &vert_ren)))
            .collect(),
    };
    let iota = NewGraphMap {
        source: middle.clone(),
        target: m.target.clone(),
        arc_map: iota
            .arc_map
            .iter()
            .map(|(a, b)| (arc_ren[a].clone(), b.clone()))
            .collect(),
        emb_map: iota
            .emb_map
            .iter()
            .map(|(c1, d)| (rename_class(c1, &arc_ren, &vert_ren), d.clone()))
            .collect(),
    };
    Ok((alpha, iota, middle))
}

fn rename_class(
    c: &EmbClass,
    arc_ren: &BTreeMap<ArcId, ArcId>,
    vert_ren: &BTreeMap<VertexId, VertexId>,
) -> EmbClass {
    EmbClass {
        vertices: c.vertices.iter().map(|v| vert_ren[v].clone()).collect(),
        boundary: c.boundary.iter().map(|a| arc_ren[a].clone()).collect(),
    }
}

/// Graph complement of an embedding `f: G ↣ H`: a graph `K` with a
/// distinguished vertex standing for the image of `G`, and an active map
/// `K ⇸ H` sending that vertex to the class of `f` and every other vertex to
/// its own star.
pub fn complement(f: &EtaleMap) -> Result<(Graph, VertexId, NewGraphMap), Violation> {
    f.check_embedding()?;
    let g = &f.source;
    let h = &f.target;
    let v_g = fresh_vertex(h, "vG");

    if g.is_nodeless_loop() {
        // f is an isomorphism of nodeless loops; the complement is an
        // isolated vertex mapping to the identity class.
        let mut data = GraphData::default();
        data.vertices.insert(v_g.clone());
        let k = Graph::validate(data, Mode::Plain).expect("isolated vertex");
        let alpha = ClassicalMap {
            source: k.clone(),
            target: h.clone(),
            arc_map: BTreeMap::new(),
            vertex_map: [(v_g.clone(), EmbClass::identity_of(h))]
                .into_iter()
                .collect(),
        };
        let alpha = from_classical(&alpha)?;
        return Ok((k, v_g, alpha));
    }

    if g.vertices().is_empty() {
        // f classifies an edge of H hitting arcs a0 and a1.
        let arcs: Vec<ArcId> = g.arcs().iter().cloned().collect();
        let a0 = f.arc(&arcs[0]).clone();
        let a1 = f.arc(&arcs[1]).clone();
        if h.is_nodeless_loop() {
            // Splitting the circle at one point gives the loop with one
            // vertex.
            let mut data = GraphData::default();
            data.vertices.insert(v_g.clone());
            data.arcs = [a0.clone(), a1.clone()].into_iter().collect();
            data.involution.insert(a0.clone(), a1.clone());
            data.involution.insert(a1.clone(), a0.clone());
            data.attach.insert(a0.clone(), v_g.clone());
            data.attach.insert(a1.clone(), v_g.clone());
            let k = Graph::validate(data, Mode::Plain)?;
            let alpha = ClassicalMap {
                source: k.clone(),
                target: h.clone(),
                arc_map: [(a0.clone(), a0), (a1.clone(), a1)].into_iter().collect(),
                vertex_map: [(v_g.clone(), class_of(f))].into_iter().collect(),
            };
            let alpha = from_classical(&alpha)?;
            return Ok((k, v_g, alpha));
        }
        // Insert a two-valent vertex splitting the edge: each a_i is
        // re-paired with a fresh dart d_i.
        let d0 = fresh_arc(h, &format!("{}·0", v_g.0));
        let d1 = fresh_arc(h, &format!("{}·1", v_g.0));
        let mut data = GraphData::default();
        data.vertices = h.vertices().clone();
        data.vertices.insert(v_g.clone());
        data.arcs = h.arcs().clone();
        data.arcs.insert(d0.clone());
        data.arcs.insert(d1.clone());
        for (a, b) in h.involution() {
            data.involution.insert(a.clone(), b.clone());
        }
        data.involution.insert(a0.clone(), d0.clone());
        data.involution.insert(d0.clone(), a0.clone());
        data.involution.insert(a1.clone(), d1.clone());
        data.involution.insert(d1.clone(), a1.clone());
        data.attach = h.attach_table().clone();
        data.attach.insert(d0.clone(), v_g.clone());
        data.attach.insert(d1.clone(), v_g.clone());
        let k = Graph::validate(data, Mode::Plain)?;
        let mut arc_map: BTreeMap<ArcId, ArcId> =
            h.arcs().iter().map(|a| (a.clone(), a.clone())).collect();
        arc_map.insert(d0.clone(), a1.clone());
        arc_map.insert(d1.clone(), a0.clone());
        let mut vertex_map: BTreeMap<VertexId, EmbClass> = h
            .vertices()
            .iter()
            .map(|v| (v.clone(), EmbClass::star_of(h, v)))
            .collect();
        vertex_map.insert(v_g.clone(), class_of(f));
        let alpha = ClassicalMap {
            source: k.clone(),
            target: h.clone(),
            arc_map,
            vertex_map,
        };
        let alpha = from_classical(&alpha)?;
        return Ok((k, v_g, alpha));
    }

    // General case: G has a vertex. Remove the images of internal darts of G
    // and collapse the image vertices to v_g.
    let removed: BTreeSet<ArcId> = g
        .attach_table()
        .keys()
        .filter(|d| g.is_dart(g.involute(d)))
        .map(|d| f.arc(d).clone())
        .collect();
    let image_vertices: BTreeSet<VertexId> = f.vertex_map.values().cloned().collect();
    let boundary_darts: BTreeSet<ArcId> = g
        .boundary()
        .iter()
        .map(|b| f.arc(g.involute(b)).clone())
        .collect();

    let mut data = GraphData::default();
    data.arcs = h.arcs().difference(&removed).cloned().collect();
    for a in data.arcs.clone() {
        data.involution.insert(a.clone(), h.involute(&a).clone());
    }
    data.vertices = h
        .vertices()
        .iter()
        .filter(|v| !image_vertices.contains(v))
        .cloned()
        .collect();
    data.vertices.insert(v_g.clone());
    for (d, v) in h.attach_table() {
        if removed.contains(d) {
            continue;
        }
        if boundary_darts.contains(d) {
            data.attach.insert(d.clone(), v_g.clone());
        } else if image_vertices.contains(v) {
            return violation("complement", format!("dart {d} is stranded at {v}"));
        } else {
            data.attach.insert(d.clone(), v.clone());
        }
    }
    data.boundary = Some(h.boundary().clone());
    let k = Graph::validate(data, Mode::Extended)?;
    let mut vertex_map: BTreeMap<VertexId, EmbClass> = k
        .vertices()
        .iter()
        .filter(|v| **v != v_g)
        .map(|v| (v.clone(), EmbClass::star_of(h, v)))
        .collect();
    vertex_map.insert(v_g.clone(), class_of(f));
    let alpha = ClassicalMap {
        source: k.clone(),
        target: h.clone(),
        arc_map: k.arcs().iter().map(|a| (a.clone(), a.clone())).collect(),
        vertex_map,
    };
    let alpha = from_classical(&alpha)?;
    Ok((k, v_g, alpha))
}

fn fresh_vertex(g: &Graph, base: &str) -> VertexId {
    let mut name = base.to_string();
    while g.vertices().contains(&VertexId(name.clone())) {
        name.push('\'');
    }
    VertexId(name)
}

fn fresh_arc(g: &Graph, base: &str) -> ArcId {
    let mut name = base.to_string();
    while g.arcs().contains(&ArcId(name.clone())) {
        name.push('\'');
    }
    ArcId(name)
}

/// Size caps for hom-set enumeration; the exhaustive search refuses larger
/// inputs.
#[derive(Debug, Clone, Copy)]
pub struct EnumCaps {
    pub max_arcs: usize,
    pub max_vertices: usize,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps {
            max_arcs: 8,
            max_vertices: 3,
        }
    }
}

/// Enumerates the full hom-set of graphical maps from `g` to `g2` by
/// exhausting boundary-compatible classical presentations and translating
/// with 𝔑. Deterministically ordered output.
pub fn enumerate_maps(
    g: &Graph,
    g2: &Graph,
    mode: Mode,
    caps: EnumCaps,
) -> Result<Vec<NewGraphMap>, Violation> {
    if g.arcs().len() > caps.max_arcs
        || g2.arcs().len() > caps.max_arcs
        || g.vertices().len() > caps.max_vertices
        || g2.vertices().len() > caps.max_vertices
    {
        return violation(
            "caps",
            format!(
                "enumeration caps exceeded (≤{} arcs, ≤{} vertices)",
                caps.max_arcs, caps.max_vertices
            ),
        );
    }
    if mode == Mode::Plain && (g.is_nodeless_loop() || g2.is_nodeless_loop()) {
        return violation("objects", "nodeless loops are not plain-mode objects".to_string());
    }
    if !g.is_connected() || !g2.is_connected() {
        return violation("objects", "graphs must be connected".to_string());
    }

    let tgt = Embeddings::of(g2)?;
    let mut out: Vec<NewGraphMap> = Vec::new();

    if g.vertices().is_empty() {
        // Sources without vertices: the arc map determines everything.
        let arcs: Vec<ArcId> = g.arcs().iter().cloned().collect();
        let a = arcs[0].clone();
        for image in g2.arcs() {
            let mut arc_map = BTreeMap::new();
            arc_map.insert(a.clone(), image.clone());
            arc_map.insert(g.involute(&a).clone(), g2.involute(image).clone());
            let c = ClassicalMap {
                source: g.clone(),
                target: g2.clone(),
                arc_map,
                vertex_map: BTreeMap::new(),
            };
            if check_classical(&c, mode).is_ok() {
                let m = from_classical(&c)?;
                if check_new_map(&m, mode).is_ok() {
                    out.push(m);
                }
            }
        }
    } else {
        // Assign to each vertex a class with matching boundary size and a
        // leg bijection; the bijections determine φ₀, with conflicts pruned.
        let vertices: Vec<VertexId> = g.vertices().iter().cloned().collect();
        let mut candidates: Vec<Vec<(EmbClass, Vec<BTreeMap<ArcId, ArcId>>)>> = Vec::new();
        for v in &vertices {
            let n = g.nbhd(v).len();
            let mut per_class = Vec::new();
            for cls in tgt.classes() {
                if cls.boundary.len() != n {
                    continue;
                }
                let targets: Vec<ArcId> = cls.boundary.iter().cloned().collect();
                let mut bijections = Vec::new();
                permute(&targets, &mut |perm| {
                    let lambda: BTreeMap<ArcId, ArcId> = g
                        .nbhd(v)
                        .iter()
                        .cloned()
                        .zip(perm.iter().cloned())
                        .collect();
                    bijections.push(lambda);
                });
                bijections.sort();
                bijections.dedup();
                per_class.push((cls.clone(), bijections));
            }
            candidates.push(per_class);
        }

        let mut assignment: Vec<EmbClass> = Vec::new();
        search_maps(
            g,
            g2,
            mode,
            &vertices,
            &candidates,
            &mut assignment,
            &mut BTreeMap::new(),
            &mut out,
        )?;
    }

    out.sort_by_key(|m| m.encode());
    out.dedup_by_key(|m| m.encode());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_maps(
    g: &Graph,
    g2: &Graph,
    mode: Mode,
    vertices: &[VertexId],
    candidates: &[Vec<(EmbClass, Vec<BTreeMap<ArcId, ArcId>>)>],
    assignment: &mut Vec<EmbClass>,
    arc_map: &mut BTreeMap<ArcId, ArcId>,
    out: &mut Vec<NewGraphMap>,
) -> Result<(), Violation> {
    let i = assignment.len();
    if i == vertices.len() {
        let c = ClassicalMap {
            source: g.clone(),
            target: g2.clone(),
            arc_map: arc_map.clone(),
            vertex_map: vertices.iter().cloned().zip(assignment.iter().cloned()).collect(),
        };
        if check_classical(&c, mode).is_ok() {
            let m = from_classical(&c)?;
            if check_new_map(&m, mode).is_ok() {
                out.push(m);
            }
        }
        return Ok(());
    }
    let v = &vertices[i];
    for (cls, bijections) in &candidates[i] {
        'bij: for lambda in bijections {
            // λ assigns φ₀(d†) = λ(d) and φ₀(d) = λ(d)†.
            let mut added: Vec<ArcId> = Vec::new();
            for d in g.nbhd(v) {
                let outward = g.involute(d).clone();
                let image = lambda[d].clone();
                let image_in = g2.involute(&image).clone();
                for (key, val) in [(outward, image), (d.clone(), image_in)] {
                    match arc_map.get(&key) {
                        Some(existing) if *existing != val => {
                            for k in added {
                                arc_map.remove(&k);
                            }
                            continue 'bij;
                        }
                        Some(_) => {}
                        None => {
                            arc_map.insert(key.clone(), val);
                            added.push(key);
                        }
                    }
                }
            }
            assignment.push(cls.clone());
            search_maps(g, g2, mode, vertices, candidates, assignment, arc_map, out)?;
            assignment.pop();
            for k in added {
                arc_map.remove(&k);
            }
        }
    }
    Ok(())
}

fn permute<T: Clone>(items: &[T], f: &mut impl FnMut(&[T])) {
    let mut items = items.to_vec();
    let n = items.len();
    permute_rec(&mut items, n, f);
}

fn permute_rec<T: Clone>(items: &mut [T], k: usize, f: &mut impl FnMut(&[T])) {
    if k <= 1 {
        f(items);
        return;
    }
    for i in 0..k {
        items.swap(i, k - 1);
        permute_rec(items, k - 1, f);
        items.swap(i, k - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::StandardGraph;

    fn star(n: usize) -> Graph {
        Graph::standard(StandardGraph::Star(n))
    }

    #[test]
    fn identity_checks_and_is_both_active_and_inert() {
        for (name, g) in corpus::corpus() {
            let id = NewGraphMap::identity(&g);
            check_new_map(&id, Mode::Extended).unwrap_or_else(|e| panic!("{name}: {e}"));
            let cls = classify(&id);
            assert!(cls.active && cls.inert, "{name}");
        }
    }

    #[test]
    fn edge_to_star_image_violates_axiom_one() {
        let g = star(2);
        let mut m = NewGraphMap::identity(&g);
        let table = Embeddings::of(&g).unwrap();
        let edge_cls = table.classes().iter().find(|c| c.is_edge()).unwrap().clone();
        let star_cls = EmbClass::star_of(&g, &VertexId::from("v"));
        m.emb_map.insert(edge_cls, star_cls);
        let err = check_new_map(&m, Mode::Plain).unwrap_err();
        // Depending on the edge chosen, (i) or (iv) trips first on clause
        // order; both name the broken axiom.
        assert!(err.clause == "(i)" || err.clause == "(iv)", "{err}");
    }

    #[test]
    fn composing_with_identities_is_neutral() {
        let f = crate::corpus::snipped_into_parallel_pair();
        let m = NewGraphMap::of_embedding(&f);
        let id_src = NewGraphMap::identity(&m.source);
        let id_tgt = NewGraphMap::identity(&m.target);
        assert_eq!(compose(&m, &id_src).unwrap(), m);
        assert_eq!(compose(&id_tgt, &m).unwrap(), m);
    }

    #[test]
    fn error_paths_name_their_clauses() {
        let s2 = star(2);
        let w = Graph::standard(StandardGraph::LoopWithOneVertex);
        // Partial class table.
        let mut m = NewGraphMap::identity(&s2);
        let some_class = m.emb_map.keys().next().unwrap().clone();
        m.emb_map.remove(&some_class);
        assert_eq!(check_new_map(&m, Mode::Plain).unwrap_err().clause, "emb totality");
        // Composition endpoint mismatch.
        let id_s2 = NewGraphMap::identity(&s2);
        let id_w = NewGraphMap::identity(&w);
        assert_eq!(compose(&id_s2, &id_w).unwrap_err().clause, "composition");
        // Arity mismatch in substitution.
        let pieces: BTreeMap<VertexId, Piece> = [(
            VertexId::from("v"),
            Piece {
                graph: Graph::standard(StandardGraph::Edge),
                legs: BTreeMap::new(),
            },
        )]
        .into_iter()
        .collect();
        assert_eq!(substitute(&s2, &pieces, Mode::Plain).unwrap_err().clause, "arity");
        // Enumeration caps.
        let caps = EnumCaps { max_arcs: 2, max_vertices: 1 };
        assert_eq!(enumerate_maps(&s2, &s2, Mode::Plain, caps).unwrap_err().clause, "caps");
    }

    #[test]
    fn hom_edge_to_edge_has_two_maps() {
        let e = Graph::standard(StandardGraph::Edge);
        let maps = enumerate_maps(&e, &e, Mode::Plain, EnumCaps::default()).unwrap();
        assert_eq!(maps.len(), 2);
        for m in &maps {
            check_new_map(m, Mode::Plain).unwrap();
        }
    }

    #[test]
    fn nodeless_loop_has_two_automorphisms_and_no_other_escapes() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let maps = enumerate_maps(&k, &k, Mode::Extended, EnumCaps::default()).unwrap();
        assert_eq!(maps.len(), 2);
        for (name, g) in corpus::corpus() {
            if g.is_nodeless_loop() {
                continue;
            }
            let out = enumerate_maps(&k, &g, Mode::Extended, EnumCaps::default()).unwrap();
            assert!(out.is_empty(), "maps K -> {name} must not exist");
        }
    }

    #[test]
    fn cycle_to_nodeless_loop_has_two_maps() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        for n in [1usize, 2, 3] {
            let c = corpus::cycle(n);
            let maps = enumerate_maps(&c, &k, Mode::Extended, EnumCaps::default()).unwrap();
            assert_eq!(maps.len(), 2, "cycle({n}) -> K");
            for m in &maps {
                check_new_map(m, Mode::Extended).unwrap();
                assert!(classify(m).active);
            }
        }
    }

    #[test]
    fn isolated_vertex_to_nodeless_loop_is_unique() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let s0 = star(0);
        let maps = enumerate_maps(&s0, &k, Mode::Extended, EnumCaps::default()).unwrap();
        assert_eq!(maps.len(), 1);
        let id_cls = EmbClass::identity_of(&s0);
        assert_eq!(maps[0].emb_map[&id_cls], EmbClass::identity_of(&k));
    }

    #[test]
    fn active_star_maps_count_factorial() {
        let fact = |n: usize| (1..=n).product::<usize>().max(1);
        for (name, g) in corpus::corpus() {
            let n = g.boundary().len();
            if n > 4 || g.is_nodeless_loop() {
                continue;
            }
            let s = star(n);
            let maps = enumerate_maps(&s, &g, Mode::Extended, EnumCaps::default()).unwrap();
            let active: Vec<_> = maps.iter().filter(|m| classify(m).active).collect();
            assert_eq!(active.len(), fact(n), "{name}: expected {n}! active maps");
        }
    }

    #[test]
    fn snipped_embedding_image_is_a_union_but_not_least() {
        let f = corpus::snipped_into_parallel_pair();
        let m = NewGraphMap::of_embedding(&f);
        check_new_map(&m, Mode::Plain).unwrap();
        let g = &f.source;
        let g2 = &f.target;
        let tgt = Embeddings::of(g2).unwrap();
        let v1 = EmbClass::star_of(g, &VertexId::from("v1"));
        let v2 = EmbClass::star_of(g, &VertexId::from("v2"));
        let iv = &m.emb_map[&v1];
        let iw = &m.emb_map[&v2];
        assert_eq!(*iv, EmbClass::star_of(g2, &VertexId::from("v")));
        assert_eq!(*iw, EmbClass::star_of(g2, &VertexId::from("w")));
        let id_img = &m.emb_map[&EmbClass::identity_of(g)];
        assert!(tgt.is_union(id_img, iv, iw).unwrap());
        // Another union exists which the image does not bound: no least
        // upper bound.
        let unions = tgt.all_unions(iv, iw).unwrap();
        assert!(unions.len() >= 3, "expected several unions, got {unions:?}");
        let least = unions.iter().find(|u| {
            unions
                .iter()
                .all(|other| tgt.leq(u, other).unwrap())
        });
        assert!(least.is_none(), "no least union may exist");
    }

    #[test]
    fn parallel_pair_union_certificates() {
        let g2 = corpus::parallel_pair();
        let tgt = Embeddings::of(&g2).unwrap();
        let iv = EmbClass::star_of(&g2, &VertexId::from("v"));
        let iw = EmbClass::star_of(&g2, &VertexId::from("w"));
        assert!(tgt.is_vertex_disjoint(&iv, &iw));
        let unions = tgt.all_unions(&iv, &iw).unwrap();
        // The two snipped classes and the identity.
        assert_eq!(unions.len(), 3);
        assert!(unions.contains(&EmbClass::identity_of(&g2)));
    }

    #[test]
    fn roundtrip_new_old_on_small_homsets() {
        let pairs = [
            (star(2), star(2)),
            (star(2), Graph::standard(StandardGraph::LoopWithOneVertex)),
            (Graph::standard(StandardGraph::Line(2)), star(1)),
        ];
        for (g, g2) in pairs {
            let maps = enumerate_maps(&g, &g2, Mode::Plain, EnumCaps::default()).unwrap();
            for m in maps {
                let c = to_classical(&m);
                check_classical(&c, Mode::Plain).unwrap();
                let back = from_classical(&c).unwrap();
                assert_eq!(back, m);
            }
        }
    }

    #[test]
    fn identity_substitution_reproduces_the_graph() {
        for (name, g) in corpus::corpus() {
            if g.vertices().is_empty() {
                continue;
            }
            let pieces: BTreeMap<VertexId, Piece> = g
                .vertices()
                .iter()
                .map(|v| {
                    let rep = representative(&g, &EmbClass::star_of(&g, v));
                    let legs: BTreeMap<ArcId, ArcId> = rep
                        .source
                        .boundary()
                        .iter()
                        .map(|b| (rep.arc(b).clone(), b.clone()))
                        .collect();
                    (
                        v.clone(),
                        Piece {
                            graph: rep.source.clone(),
                            legs,
                        },
                    )
                })
                .collect();
            let sub = substitute(&g, &pieces, Mode::Extended).unwrap();
            assert_eq!(sub.graph.vertices().len(), g.vertices().len(), "{name}");
            assert_eq!(sub.graph.edges().len(), g.edges().len(), "{name}");
            assert_eq!(sub.graph.boundary().len(), g.boundary().len(), "{name}");
        }
    }

    #[test]
    fn substituting_edge_into_wheel_vertex_gives_nodeless_loop() {
        let w = Graph::standard(StandardGraph::LoopWithOneVertex);
        let e = Graph::standard(StandardGraph::Edge);
        let legs: BTreeMap<ArcId, ArcId> = [
            (ArcId::from("1†"), ArcId::from("♯")),
            (ArcId::from("1"), ArcId::from("♭")),
        ]
        .into_iter()
        .collect();
        let pieces: BTreeMap<VertexId, Piece> = [(
            VertexId::from("v"),
            Piece {
                graph: e.clone(),
                legs,
            },
        )]
        .into_iter()
        .collect();
        let sub = substitute(&w, &pieces, Mode::Extended).unwrap();
        assert!(sub.graph.is_nodeless_loop());
        let err = substitute(&w, &pieces, Mode::Plain).unwrap_err();
        assert_eq!(err.clause, "collapse");
    }

    #[test]
    fn grafting_star_into_star_adds_vertices() {
        // Replace the vertex of a 2-star by a line(2)-shaped piece.
        let g = star(2);
        let piece = Graph::standard(StandardGraph::Line(2));
        // ð(line2) = {e0, e2†}.
        let legs: BTreeMap<ArcId, ArcId> = [
            (ArcId::from("1†"), ArcId::from("e0")),
            (ArcId::from("2†"), ArcId::from("e2†")),
        ]
        .into_iter()
        .collect();
        let pieces: BTreeMap<VertexId, Piece> =
            [(VertexId::from("v"), Piece { graph: piece, legs })]
                .into_iter()
                .collect();
        let sub = substitute(&g, &pieces, Mode::Plain).unwrap();
        assert_eq!(sub.graph.vertices().len(), 2);
        assert_eq!(sub.graph.boundary().len(), 2);
        assert_eq!(sub.graph.edges().len(), 3);
        for emb in sub.piece_embeddings.values() {
            emb.check_embedding().unwrap();
        }
    }

    #[test]
    fn factor_recomposes_and_classifies() {
        let pairs = [
            (star(2), Graph::standard(StandardGraph::LoopWithOneVertex)),
            (Graph::standard(StandardGraph::Line(2)), star(1)),
            (star(0), star(0)),
        ];
        for (g, g2) in pairs {
            let maps = enumerate_maps(&g, &g2, Mode::Plain, EnumCaps::default()).unwrap();
            for m in maps {
                let (alpha, iota, middle) = factor(&m).unwrap();
                check_new_map(&alpha, Mode::Extended).unwrap();
                check_new_map(&iota, Mode::Extended).unwrap();
                assert!(classify(&alpha).active, "active part of {}", m.encode());
                assert!(classify(&iota).inert, "inert part of {}", m.encode());
                let recomposed = compose(&iota, &alpha).unwrap();
                assert_eq!(recomposed, m);
                assert!(middle.is_connected());
            }
        }
    }

    #[test]
    fn factor_of_embedding_has_iso_active_part() {
        let f = corpus::snipped_into_parallel_pair();
        let m = NewGraphMap::of_embedding(&f);
        let (alpha, iota, _) = factor(&m).unwrap();
        let cls = classify(&alpha);
        assert!(cls.active && cls.inert, "iso active part");
        assert!(classify(&iota).inert);
        assert_eq!(compose(&iota, &alpha).unwrap(), m);
    }

    #[test]
    fn complement_of_identity_is_star() {
        let g = corpus::three_legs_one_loop();
        let f = EtaleMap::identity(&g);
        let (k, v_g, alpha) = complement(&f).unwrap();
        assert_eq!(k.vertices().len(), 1);
        assert_eq!(k.nbhd(&v_g).len(), g.boundary().len());
        assert!(classify(&alpha).active);
        let star_cls = to_classical(&alpha).vertex_map[&v_g].clone();
        assert_eq!(star_cls, EmbClass::identity_of(&g));
    }

    #[test]
    fn complement_of_internal_edge_splits_it() {
        let g = Graph::standard(StandardGraph::Line(2));
        let internal = g.internal_edges()[0].clone();
        let rep = representative(&g, &EmbClass::edge_of(&g, &internal));
        let (k, v_g, alpha) = complement(&rep).unwrap();
        assert_eq!(k.vertices().len(), g.vertices().len() + 1);
        assert_eq!(k.nbhd(&v_g).len(), 2);
        assert!(classify(&alpha).active);
    }

    #[test]
    fn complement_of_two_vertex_subgraph_collapses_it() {
        // Inside line(3), take the subgraph spanned by v1 and v2.
        let g = Graph::standard(StandardGraph::Line(3));
        let cls = EmbClass {
            vertices: [VertexId::from("v1"), VertexId::from("v2")].into_iter().collect(),
            boundary: [ArcId::from("e0"), ArcId::from("e2†")].into_iter().collect(),
        };
        let table = Embeddings::of(&g).unwrap();
        assert!(table.contains(&cls));
        let rep = representative(&g, &cls);
        let (k, v_g, alpha) = complement(&rep).unwrap();
        assert_eq!(k.vertices().len(), 2, "collapsed to v_g plus v3");
        assert!(k.vertices().contains(&v_g));
        assert!(classify(&alpha).active);
        let c = to_classical(&alpha);
        assert_eq!(c.vertex_map[&v_g], cls);
    }

    #[test]
    fn complement_edge_into_nodeless_loop_is_wheel() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let e = EmbClass::edge_of(&k, &k.edges()[0]);
        let rep = representative(&k, &e);
        let (w, v_g, alpha) = complement(&rep).unwrap();
        assert_eq!(w.vertices().len(), 1);
        assert_eq!(w.nbhd(&v_g).len(), 2);
        assert!(w.boundary().is_empty());
        assert!(classify(&alpha).active);
    }

    #[test]
    fn complement_of_nodeless_identity_is_isolated_vertex() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let f = EtaleMap::identity(&k);
        let (s0, _, alpha) = complement(&f).unwrap();
        assert_eq!(s0.vertices().len(), 1);
        assert!(s0.arcs().is_empty());
        assert!(classify(&alpha).active);
    }

    #[test]
    fn vertex_sums_split_over_star_images() {
        // ς(φ̂(ℓ)) is the disjoint union of the star image vertex sets over
        // the vertices of ℓ.
        let pairs = [
            (star(2), Graph::standard(StandardGraph::LoopWithOneVertex)),
            (Graph::standard(StandardGraph::Line(2)), Graph::standard(StandardGraph::Line(2))),
            (crate::corpus::parallel_pair(), crate::corpus::parallel_pair()),
        ];
        for (g, g2) in pairs {
            let maps = enumerate_maps(&g, &g2, Mode::Plain, EnumCaps::default()).unwrap();
            let table = Embeddings::of(&g).unwrap();
            for m in maps {
                for c in table.classes() {
                    let image = &m.emb_map[c];
                    let mut union: BTreeSet<VertexId> = BTreeSet::new();
                    let mut total = 0usize;
                    for v in &c.vertices {
                        let star_img = &m.emb_map[&EmbClass::star_of(&g, v)];
                        total += star_img.vertices.len();
                        union.extend(star_img.vertices.iter().cloned());
                    }
                    assert_eq!(union, image.vertices, "splitting at {c}");
                    assert_eq!(total, union.len(), "disjointness at {c}");
                }
            }
        }
    }

    #[test]
    fn wheel_vertex_images_are_cut_star_or_edge() {
        // The only boundary-compatible non-edge image for the 2-star's
        // vertex in the wheel is the cut star.
        let s2 = star(2);
        let w = Graph::standard(StandardGraph::LoopWithOneVertex);
        let maps = enumerate_maps(&s2, &w, Mode::Plain, EnumCaps::default()).unwrap();
        let cut_star = EmbClass::star_of(&w, &VertexId::from("v"));
        assert!(!maps.is_empty());
        let mut saw_cut_star = false;
        for m in &maps {
            let c = to_classical(m);
            let image = &c.vertex_map[&VertexId::from("v")];
            if image.is_edge() {
                continue;
            }
            assert_eq!(image, &cut_star);
            saw_cut_star = true;
        }
        assert!(saw_cut_star);
    }

    #[test]
    fn composition_of_inerts_matches_composed_embeddings() {
        let g = Graph::standard(StandardGraph::LoopWithOneVertex);
        let star_cls = EmbClass::star_of(&g, &VertexId::from("v"));
        let inner = representative(&g, &star_cls);
        // inner: star2-shaped ↣ loop. Take an edge of the star into it.
        let e = inner.source.edges()[0].clone();
        let edge_rep = representative(&inner.source, &EmbClass::edge_of(&inner.source, &e));
        let composed_etale = inner.compose(&edge_rep);
        let m1 = NewGraphMap::of_embedding(&edge_rep);
        let m2 = NewGraphMap::of_embedding(&inner);
        let composed_maps = compose(&m2, &m1).unwrap();
        assert_eq!(composed_maps, NewGraphMap::of_embedding(&composed_etale));
    }
}
