//! Finite presheaf toolkit: explicit catalogs of graph objects and all maps
//! between them, the pointed-set functor γ, the Segal condition computed as
//! a limit over elementary inert covers, restriction along catalog functors,
//! and the orientation-summing left Kan extensions.
//!
//! Catalogs are finite by construction: all theorems checked here are
//! object-wise, so a corpus of small graphs with complete hom-sets is enough
//! to exercise them.

use crate::diag::{violation, Violation};
use crate::directed::{orientations_of, restrict_orientation, DirectedGraph, Orientation};
use crate::embedding::EmbClass;
use crate::gmap::{classify, compose, enumerate_maps, EnumCaps, NewGraphMap};
use crate::graph::{ArcId, Graph, Mode, StandardGraph, VertexId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub String);

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
pub struct CatObject {
    pub id: ObjId,
    pub graph: Graph,
    pub orientation: Option<Orientation>,
}

impl CatObject {
    pub fn is_star(&self) -> bool {
        self.graph.vertices().len() == 1 && self.graph.internal_edges().is_empty()
    }

    pub fn is_edge(&self) -> bool {
        self.graph.vertices().is_empty() && !self.graph.is_nodeless_loop()
    }

    /// Elementary objects are the edges and stars; nodeless loops are not
    /// elementary.
    pub fn is_elementary(&self) -> bool {
        self.is_star() || self.is_edge()
    }
}

#[derive(Debug, Clone)]
pub struct CatMorphism {
    pub id: MorId,
    pub src: ObjId,
    pub tgt: ObjId,
    pub map: NewGraphMap,
    pub active: bool,
    pub inert: bool,
}

/// A finite category of graphs: a set of objects closed under elementary
/// covers, all graphical maps between them, and the composition table.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub mode: Mode,
    pub objects: Vec<CatObject>,
    pub morphisms: Vec<CatMorphism>,
    obj_index: BTreeMap<ObjId, usize>,
    mor_index: BTreeMap<MorId, usize>,
    by_encode: BTreeMap<(ObjId, ObjId, String), MorId>,
    composition: BTreeMap<(MorId, MorId), MorId>,
    identities: BTreeMap<ObjId, MorId>,
}

impl Catalog {
    /// Builds a plain catalog: the given graphs plus whatever elementary
    /// objects (the edge, stars of every occurring valence and boundary
    /// size) are missing, with every graphical map between every ordered
    /// pair of objects.
    pub fn build_plain(mode: Mode, graphs: Vec<(String, Graph)>) -> Result<Catalog, Violation> {
        let objects = close_under_elementaries(mode, graphs)?
            .into_iter()
            .map(|(name, graph)| CatObject {
                id: ObjId(name),
                graph,
                orientation: None,
            })
            .collect();
        Catalog::finish(mode, objects)
    }

    /// Builds an oriented catalog: every orientation of every given graph
    /// (and of the missing elementaries) is an object; morphisms are the
    /// orientation-compatible graphical maps.
    pub fn build_oriented(mode: Mode, graphs: Vec<(String, Graph)>) -> Result<Catalog, Violation> {
        let underlying = close_under_elementaries(mode, graphs)?;
        let mut objects = Vec::new();
        for (name, graph) in underlying {
            for (i, x) in orientations_of(&graph).into_iter().enumerate() {
                objects.push(CatObject {
                    id: ObjId(format!("{name}~o{i}")),
                    graph: graph.clone(),
                    orientation: Some(x),
                });
            }
        }
        Catalog::finish(mode, objects)
    }

    /// The full subcatalog on the objects satisfying `keep`.
    pub fn restrict_objects(&self, keep: impl Fn(&CatObject) -> bool) -> Catalog {
        let objects: Vec<CatObject> = self.objects.iter().filter(|o| keep(o)).cloned().collect();
        let kept: BTreeSet<ObjId> = objects.iter().map(|o| o.id.clone()).collect();
        let morphisms: Vec<CatMorphism> = self
            .morphisms
            .iter()
            .filter(|m| kept.contains(&m.src) && kept.contains(&m.tgt))
            .cloned()
            .collect();
        let mut cat = Catalog {
            mode: self.mode,
            objects,
            morphisms,
            obj_index: BTreeMap::new(),
            mor_index: BTreeMap::new(),
            by_encode: BTreeMap::new(),
            composition: BTreeMap::new(),
            identities: BTreeMap::new(),
        };
        cat.reindex();
        cat.composition = self
            .composition
            .iter()
            .filter(|((o, i), c)| {
                cat.mor_index.contains_key(o)
                    && cat.mor_index.contains_key(i)
                    && cat.mor_index.contains_key(c)
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        cat.identities = self
            .identities
            .iter()
            .filter(|(o, m)| kept.contains(o) && cat.mor_index.contains_key(m))
            .map(|(o, m)| (o.clone(), m.clone()))
            .collect();
        cat
    }

    fn finish(mode: Mode, objects: Vec<CatObject>) -> Result<Catalog, Violation> {
        let mut cat = Catalog {
            mode,
            objects,
            morphisms: Vec::new(),
            obj_index: BTreeMap::new(),
            mor_index: BTreeMap::new(),
            by_encode: BTreeMap::new(),
            composition: BTreeMap::new(),
            identities: BTreeMap::new(),
        };
        // Hom-sets of the underlying graphs, enumerated once per pair of
        // underlying shapes.
        let caps = EnumCaps {
            max_arcs: 10,
            max_vertices: 4,
        };
        let mut counter = 0usize;
        let n = cat.objects.len();
        let mut plain_homs: BTreeMap<(String, String), Vec<NewGraphMap>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let (src, tgt) = (&cat.objects[i], &cat.objects[j]);
                let key = (src.graph.encode(), tgt.graph.encode());
                if !plain_homs.contains_key(&key) {
                    let maps = enumerate_maps(&src.graph, &tgt.graph, mode, caps)?;
                    plain_homs.insert(key.clone(), maps);
                }
                let maps = &plain_homs[&key];
                for m in maps {
                    if let (Some(x), Some(y)) = (&src.orientation, &tgt.orientation) {
                        if restrict_orientation(m, y) != *x {
                            continue;
                        }
                    }
                    let cls = classify(m);
                    let id = MorId(format!("m{counter}"));
                    counter += 1;
                    cat.morphisms.push(CatMorphism {
                        id,
                        src: src.id.clone(),
                        tgt: tgt.id.clone(),
                        map: m.clone(),
                        active: cls.active,
                        inert: cls.inert,
                    });
                }
            }
        }
        cat.reindex();
        cat.close()?;
        Ok(cat)
    }

    /// Rebuilds a catalog from explicitly listed objects and morphisms
    /// (e.g. parsed from a serialized manifest). Classification is
    /// recomputed; the morphism list must be closed under identities and
    /// composition.
    pub fn from_parts(
        mode: Mode,
        objects: Vec<CatObject>,
        morphisms: Vec<(MorId, ObjId, ObjId, NewGraphMap)>,
    ) -> Result<Catalog, Violation> {
        let mut cat = Catalog {
            mode,
            objects,
            morphisms: Vec::new(),
            obj_index: BTreeMap::new(),
            mor_index: BTreeMap::new(),
            by_encode: BTreeMap::new(),
            composition: BTreeMap::new(),
            identities: BTreeMap::new(),
        };
        for (id, src, tgt, map) in morphisms {
            let cls = classify(&map);
            cat.morphisms.push(CatMorphism {
                id,
                src,
                tgt,
                map,
                active: cls.active,
                inert: cls.inert,
            });
        }
        cat.reindex();
        cat.close()?;
        Ok(cat)
    }

    /// Computes identities and the composition table, verifying closure.
    fn close(&mut self) -> Result<(), Violation> {
        let cat = self;
        // Identities and the composition table.
        for o in &cat.objects {
            let id_map = NewGraphMap::identity(&o.graph);
            let mid = cat
                .find_morphism(&o.id, &o.id, &id_map)
                .ok_or_else(|| Violation::new("catalog", format!("identity of {} missing", o.id)))?;
            cat.identities.insert(o.id.clone(), mid.clone());
        }
        let mut table = BTreeMap::new();
        for outer in &cat.morphisms {
            for inner in &cat.morphisms {
                if inner.tgt != outer.src {
                    continue;
                }
                let composite = compose(&outer.map, &inner.map)?;
                let found = cat
                    .find_morphism(&inner.src, &outer.tgt, &composite)
                    .ok_or_else(|| {
                        Violation::new(
                            "catalog",
                            format!("composite of {} and {} missing", outer.id, inner.id),
                        )
                    })?;
                table.insert((outer.id.clone(), inner.id.clone()), found);
            }
        }
        cat.composition = table;
        Ok(())
    }

    fn reindex(&mut self) {
        self.obj_index = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.id.clone(), i))
            .collect();
        self.mor_index = self
            .morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        self.by_encode = self
            .morphisms
            .iter()
            .map(|m| ((m.src.clone(), m.tgt.clone(), m.map.encode()), m.id.clone()))
            .collect();
    }

    pub fn object(&self, id: &ObjId) -> &CatObject {
        &self.objects[self.obj_index[id]]
    }

    pub fn morphism(&self, id: &MorId) -> &CatMorphism {
        &self.morphisms[self.mor_index[id]]
    }

    pub fn identity_of(&self, id: &ObjId) -> &MorId {
        &self.identities[id]
    }

    pub fn find_object_by(&self, graph: &Graph, orientation: Option<&Orientation>) -> Option<ObjId> {
        self.objects
            .iter()
            .find(|o| &o.graph == graph && o.orientation.as_ref() == orientation)
            .map(|o| o.id.clone())
    }

    pub fn find_morphism(&self, src: &ObjId, tgt: &ObjId, map: &NewGraphMap) -> Option<MorId> {
        self.by_encode
            .get(&(src.clone(), tgt.clone(), map.encode()))
            .cloned()
    }

    /// The composite `outer ∘ inner`, looked up in the table.
    pub fn composite(&self, outer: &MorId, inner: &MorId) -> Option<&MorId> {
        self.composition.get(&(outer.clone(), inner.clone()))
    }

    pub fn homs(&self, src: &ObjId, tgt: &ObjId) -> Vec<&CatMorphism> {
        self.morphisms
            .iter()
            .filter(|m| &m.src == src && &m.tgt == tgt)
            .collect()
    }

    /// The elementary inert covers of an object: all inert morphisms from
    /// elementary objects (stars only, when `flat`), together with the inert
    /// morphisms between them over the object.
    pub fn elementary_covers(&self, c: &ObjId, flat: bool) -> ElCover {
        let cover_objects: Vec<MorId> = self
            .morphisms
            .iter()
            .filter(|m| {
                m.tgt == *c && m.inert && {
                    let o = self.object(&m.src);
                    if flat {
                        o.is_star()
                    } else {
                        o.is_elementary()
                    }
                }
            })
            .map(|m| m.id.clone())
            .collect();
        let index: BTreeMap<MorId, usize> = cover_objects
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut arrows = Vec::new();
        for m in &cover_objects {
            let m_mor = self.morphism(m);
            for m2 in &cover_objects {
                let m2_mor = self.morphism(m2);
                for g in self.homs(&m_mor.src, &m2_mor.src) {
                    if !g.inert {
                        continue;
                    }
                    if self.composite(&m2_mor.id, &g.id) == Some(&m_mor.id) {
                        arrows.push(ElArrow {
                            from: index[m],
                            to: index[m2],
                            via: g.id.clone(),
                        });
                    }
                }
            }
        }
        ElCover {
            objects: cover_objects,
            arrows,
        }
    }
}

/// The category of elementary inert covers of one object.
#[derive(Debug, Clone)]
pub struct ElCover {
    /// Inert morphisms from elementary objects into the object.
    pub objects: Vec<MorId>,
    pub arrows: Vec<ElArrow>,
}

/// An arrow of the cover category: `via: e → e'` with `m' ∘ via = m`.
#[derive(Debug, Clone)]
pub struct ElArrow {
    pub from: usize,
    pub to: usize,
    pub via: MorId,
}

/// A finite presheaf on a catalog: one element set per object, one
/// restriction function per morphism (from the target's set to the
/// source's).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presheaf {
    pub elements: BTreeMap<ObjId, Vec<String>>,
    pub restrictions: BTreeMap<MorId, BTreeMap<String, String>>,
}

impl Presheaf {
    pub fn terminal(cat: &Catalog) -> Presheaf {
        Presheaf {
            elements: cat
                .objects
                .iter()
                .map(|o| (o.id.clone(), vec!["*".to_string()]))
                .collect(),
            restrictions: cat
                .morphisms
                .iter()
                .map(|m| {
                    (
                        m.id.clone(),
                        [("*".to_string(), "*".to_string())].into_iter().collect(),
                    )
                })
                .collect(),
        }
    }

    /// The orientation presheaf on a plain catalog: elements are the
    /// orientations, restriction pulls signs back along the arc map.
    pub fn orientations(cat: &Catalog) -> Presheaf {
        let token = |x: &Orientation| -> String {
            let plus: Vec<String> = x
                .sign
                .iter()
                .filter(|(_, s)| **s == 1)
                .map(|(a, _)| a.0.clone())
                .collect();
            format!("o[{}]", plus.join(","))
        };
        let elements: BTreeMap<ObjId, Vec<String>> = cat
            .objects
            .iter()
            .map(|o| {
                let mut toks: Vec<String> =
                    orientations_of(&o.graph).iter().map(token).collect();
                toks.sort();
                (o.id.clone(), toks)
            })
            .collect();
        let restrictions: BTreeMap<MorId, BTreeMap<String, String>> = cat
            .morphisms
            .iter()
            .map(|m| {
                let table: BTreeMap<String, String> = orientations_of(&m.map.target)
                    .iter()
                    .map(|y| (token(y), token(&restrict_orientation(&m.map, y))))
                    .collect();
                (m.id.clone(), table)
            })
            .collect();
        Presheaf {
            elements,
            restrictions,
        }
    }

    /// The representable presheaf at `d`: elements are morphism ids into
    /// `d`, restriction is precomposition.
    pub fn representable(cat: &Catalog, d: &ObjId) -> Presheaf {
        let elements: BTreeMap<ObjId, Vec<String>> = cat
            .objects
            .iter()
            .map(|o| {
                let toks: Vec<String> =
                    cat.homs(&o.id, d).iter().map(|m| m.id.0.clone()).collect();
                (o.id.clone(), toks)
            })
            .collect();
        let restrictions: BTreeMap<MorId, BTreeMap<String, String>> = cat
            .morphisms
            .iter()
            .map(|m| {
                let table: BTreeMap<String, String> = cat
                    .homs(&m.tgt, d)
                    .iter()
                    .map(|f| {
                        let composite = cat
                            .composite(&f.id, &m.id)
                            .expect("catalog is closed under composition");
                        (f.id.0.clone(), composite.0.clone())
                    })
                    .collect();
                (m.id.clone(), table)
            })
            .collect();
        Presheaf {
            elements,
            restrictions,
        }
    }

    pub fn at(&self, o: &ObjId) -> &[String] {
        &self.elements[o]
    }

    pub fn restrict_along(&self, m: &MorId, token: &str) -> &str {
        &self.restrictions[m][token]
    }

    /// Componentwise product.
    pub fn product(&self, other: &Presheaf) -> Presheaf {
        let elements: BTreeMap<ObjId, Vec<String>> = self
            .elements
            .iter()
            .map(|(o, xs)| {
                let mut toks = Vec::new();
                for x in xs {
                    for y in &other.elements[o] {
                        toks.push(format!("({x}&{y})"));
                    }
                }
                (o.clone(), toks)
            })
            .collect();
        let restrictions: BTreeMap<MorId, BTreeMap<String, String>> = self
            .restrictions
            .iter()
            .map(|(m, table)| {
                let mut combined = BTreeMap::new();
                for (x, x2) in table {
                    for (y, y2) in &other.restrictions[m] {
                        combined.insert(format!("({x}&{y})"), format!("({x2}&{y2})"));
                    }
                }
                (m.clone(), combined)
            })
            .collect();
        Presheaf {
            elements,
            restrictions,
        }
    }

    /// Componentwise coproduct.
    pub fn coproduct(&self, other: &Presheaf) -> Presheaf {
        let elements: BTreeMap<ObjId, Vec<String>> = self
            .elements
            .iter()
            .map(|(o, xs)| {
                let mut toks: Vec<String> = xs.iter().map(|x| format!("L{x}")).collect();
                toks.extend(other.elements[o].iter().map(|y| format!("R{y}")));
                (o.clone(), toks)
            })
            .collect();
        let restrictions: BTreeMap<MorId, BTreeMap<String, String>> = self
            .restrictions
            .iter()
            .map(|(m, table)| {
                let mut combined: BTreeMap<String, String> = table
                    .iter()
                    .map(|(x, x2)| (format!("L{x}"), format!("L{x2}")))
                    .collect();
                for (y, y2) in &other.restrictions[m] {
                    combined.insert(format!("R{y}"), format!("R{y2}"));
                }
                (m.clone(), combined)
            })
            .collect();
        Presheaf {
            elements,
            restrictions,
        }
    }
}

/// Functoriality of a presheaf over a catalog: totality of the tables,
/// identities to identities, composites to reversed composites.
pub fn check_presheaf(cat: &Catalog, x: &Presheaf) -> Result<(), Violation> {
    for o in &cat.objects {
        if !x.elements.contains_key(&o.id) {
            return violation("presheaf", format!("no element set at {}", o.id));
        }
    }
    for m in &cat.morphisms {
        let table = match x.restrictions.get(&m.id) {
            Some(t) => t,
            None => return violation("presheaf", format!("no restriction along {}", m.id)),
        };
        let dom: BTreeSet<&String> = x.elements[&m.tgt].iter().collect();
        let cod: BTreeSet<&String> = x.elements[&m.src].iter().collect();
        if table.len() != dom.len() {
            return violation("presheaf", format!("restriction along {} is not total", m.id));
        }
        for (from, to) in table {
            if !dom.contains(from) || !cod.contains(to) {
                return violation("presheaf", format!("restriction along {} leaves the sets", m.id));
            }
        }
    }
    for o in &cat.objects {
        let idm = cat.identity_of(&o.id);
        for tok in &x.elements[&o.id] {
            if x.restrict_along(idm, tok) != tok {
                return violation("presheaf", format!("identity at {} does not fix {tok}", o.id));
            }
        }
    }
    for outer in &cat.morphisms {
        for inner in &cat.morphisms {
            if inner.tgt != outer.src {
                continue;
            }
            let composite = cat
                .composite(&outer.id, &inner.id)
                .expect("catalog is closed under composition");
            for tok in &x.elements[&outer.tgt] {
                let two_step = x.restrict_along(&inner.id, x.restrict_along(&outer.id, tok));
                let one_step = x.restrict_along(composite, tok);
                if two_step != one_step {
                    return violation(
                        "presheaf",
                        format!(
                            "functoriality fails on {} ∘ {} at {tok}",
                            outer.id, inner.id
                        ),
                    );
                }
            }
        }
    }
    Ok(())
}

/// Per-object outcome of the Segal check.
#[derive(Debug, Clone)]
pub struct SegalWitness {
    pub object: ObjId,
    pub value_count: usize,
    pub limit_count: usize,
    pub ok: bool,
}

/// Whether the canonical map into the limit of elementary covers is a
/// bijection at every object.
pub fn is_segal(cat: &Catalog, x: &Presheaf, flat: bool) -> Result<(bool, Vec<SegalWitness>), Violation> {
    check_presheaf(cat, x)?;
    let mut all_ok = true;
    let mut witnesses = Vec::new();
    for o in &cat.objects {
        let cover = cat.elementary_covers(&o.id, flat);
        if !flat && !o.graph.is_nodeless_loop() {
            // Configuration check: every vertex has a star cover and every
            // edge an edge cover.
            for v in o.graph.vertices() {
                let cls = EmbClass::star_of(&o.graph, v);
                let found = cover.objects.iter().any(|m| {
                    let mor = cat.morphism(m);
                    let top = EmbClass::identity_of(&mor.map.source);
                    cat.object(&mor.src).is_star() && mor.map.emb_map[&top] == cls
                });
                if !found {
                    return violation(
                        "covers",
                        format!("no star cover of {v} in {} is in the catalog", o.id),
                    );
                }
            }
            for e in o.graph.edges() {
                let cls = EmbClass::edge_of(&o.graph, e);
                let found = cover.objects.iter().any(|m| {
                    let mor = cat.morphism(m);
                    let top = EmbClass::identity_of(&mor.map.source);
                    cat.object(&mor.src).is_edge() && mor.map.emb_map[&top] == cls
                });
                if !found {
                    return violation(
                        "covers",
                        format!("no edge cover of {e} in {} is in the catalog", o.id),
                    );
                }
            }
        }
        let tuples = limit_tuples(cat, x, &cover);
        // The canonical map sends s to its restrictions along the covers.
        let mut image: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut injective = true;
        for tok in &x.elements[&o.id] {
            let tuple: Vec<String> = cover
                .objects
                .iter()
                .map(|m| x.restrict_along(m, tok).to_string())
                .collect();
            if !image.insert(tuple) {
                injective = false;
            }
        }
        let ok = injective && image.len() == tuples.len() && image.iter().all(|t| tuples.contains(t));
        all_ok &= ok;
        witnesses.push(SegalWitness {
            object: o.id.clone(),
            value_count: x.elements[&o.id].len(),
            limit_count: tuples.len(),
            ok,
        });
    }
    Ok((all_ok, witnesses))
}

/// The limit over a cover category: tuples indexed by cover objects,
/// compatible along every arrow. Computed by depth-first assignment with
/// incremental constraint checking.
fn limit_tuples(cat: &Catalog, x: &Presheaf, cover: &ElCover) -> BTreeSet<Vec<String>> {
    let n = cover.objects.len();
    // Constraints touching each object index.
    let mut constraints: Vec<Vec<&ElArrow>> = vec![Vec::new(); n];
    for a in &cover.arrows {
        constraints[a.from].push(a);
        constraints[a.to].push(a);
    }
    let domains: Vec<&[String]> = cover
        .objects
        .iter()
        .map(|m| x.elements[&cat.morphism(m).src].as_slice())
        .collect();
    let mut out = BTreeSet::new();
    let mut assign: Vec<Option<String>> = vec![None; n];
    fn consistent(
        x: &Presheaf,
        arrows: &[&ElArrow],
        assign: &[Option<String>],
    ) -> bool {
        for a in arrows {
            if let (Some(sf), Some(st)) = (&assign[a.from], &assign[a.to]) {
                // via: e_from → e_to over c, so the tuple entry at `from` is
                // the restriction of the entry at `to`.
                if x.restrict_along(&a.via, st) != sf {
                    return false;
                }
            }
        }
        true
    }
    fn dfs(
        x: &Presheaf,
        domains: &[&[String]],
        constraints: &[Vec<&ElArrow>],
        i: usize,
        assign: &mut Vec<Option<String>>,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        if i == domains.len() {
            out.insert(assign.iter().map(|s| s.clone().unwrap()).collect());
            return;
        }
        for tok in domains[i] {
            assign[i] = Some(tok.clone());
            if consistent(x, &constraints[i], assign) {
                dfs(x, domains, constraints, i + 1, assign, out);
            }
            assign[i] = None;
        }
    }
    dfs(x, &domains, &constraints, 0, &mut assign, &mut out);
    out
}

/// The pointed function of a map: each target vertex goes to the source
/// vertex whose star image contains it, or to the basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedMap {
    /// target vertex ↦ source vertex or basepoint.
    pub map: BTreeMap<VertexId, Option<VertexId>>,
}

impl PointedMap {
    pub fn identity(g: &Graph) -> PointedMap {
        PointedMap {
            map: g
                .vertices()
                .iter()
                .map(|v| (v.clone(), Some(v.clone())))
                .collect(),
        }
    }

    /// Active pointed functions hit no basepoint.
    pub fn is_active(&self) -> bool {
        self.map.values().all(|v| v.is_some())
    }

    /// Inert pointed functions have singleton fibers over every non-basepoint.
    pub fn is_inert(&self, source: &Graph) -> bool {
        source.vertices().iter().all(|v| {
            self.map
                .values()
                .filter(|w| w.as_deref() == Some(v))
                .count()
                == 1
        })
    }

    /// `self ∘ other` where `other` lands in the domain of `self`:
    /// the composite pointed function γ(m) ∘ γ(n) for n ∘ m.
    pub fn then(&self, outer: &PointedMap) -> PointedMap {
        PointedMap {
            map: outer
                .map
                .iter()
                .map(|(w, v)| {
                    let image = v.as_ref().and_then(|u| self.map[u].clone());
                    (w.clone(), image)
                })
                .collect(),
        }
    }
}

trait OptionDeref {
    fn as_deref(&self) -> Option<&VertexId>;
}

impl OptionDeref for Option<VertexId> {
    fn as_deref(&self) -> Option<&VertexId> {
        self.as_ref()
    }
}

/// γ on a map: reads the star images off the class table.
pub fn gamma(m: &NewGraphMap) -> PointedMap {
    let mut map: BTreeMap<VertexId, Option<VertexId>> = m
        .target
        .vertices()
        .iter()
        .map(|w| (w.clone(), None))
        .collect();
    for v in m.source.vertices() {
        let star = EmbClass::star_of(&m.source, v);
        for w in &m.emb_map[&star].vertices {
            map.insert(w.clone(), Some(v.clone()));
        }
    }
    PointedMap { map }
}

/// Report of the γ-functor checks over a catalog.
#[derive(Debug, Clone, Default)]
pub struct GammaReport {
    pub composable_pairs: usize,
    pub unit_sections_checked: usize,
    pub inert_lifts_checked: usize,
    pub substitution_squares: usize,
}

/// Verifies that γ is functorial, respects the factorization classes,
/// satisfies the star unit axiom, and sends substitution squares to
/// pullbacks of pointed sets.
pub fn gamma_properties(cat: &Catalog) -> Result<GammaReport, Violation> {
    let mut report = GammaReport::default();

    // Functoriality and factorization respect.
    for outer in &cat.morphisms {
        let pm = gamma(&outer.map);
        if outer.active && !pm.is_active() {
            return violation("gamma", format!("{} is active but γ hits the basepoint", outer.id));
        }
        if outer.inert && !pm.is_inert(&outer.map.source) {
            return violation("gamma", format!("{} is inert but γ has a fat fiber", outer.id));
        }
        for inner in &cat.morphisms {
            if inner.tgt != outer.src {
                continue;
            }
            let composite = cat
                .composite(&outer.id, &inner.id)
                .expect("closed under composition");
            let lhs = gamma(&cat.morphism(composite).map);
            let rhs = gamma(&inner.map).then(&gamma(&outer.map));
            if lhs != rhs {
                return violation(
                    "gamma",
                    format!("γ is not functorial on {} ∘ {}", outer.id, inner.id),
                );
            }
            report.composable_pairs += 1;
        }
    }

    // Star units: every active map onto a star has exactly one inert
    // section.
    for star in cat.objects.iter().filter(|o| o.is_star()) {
        for alpha in cat.morphisms.iter().filter(|m| m.active && m.tgt == star.id) {
            let id_star = cat.identity_of(&star.id);
            let sections: Vec<&CatMorphism> = cat
                .homs(&star.id, &alpha.src)
                .into_iter()
                .filter(|s| s.inert && cat.composite(&alpha.id, &s.id) == Some(id_star))
                .collect();
            if sections.len() != 1 {
                return violation(
                    "units",
                    format!(
                        "active {} onto {} has {} inert sections",
                        alpha.id,
                        star.id,
                        sections.len()
                    ),
                );
            }
            report.unit_sections_checked += 1;
        }
    }

    // Nilobjects: γ of an edge is the empty pointed set.
    for o in cat.objects.iter().filter(|o| o.is_edge()) {
        if !o.graph.vertices().is_empty() {
            return violation("nilobjects", format!("{} is not vertex-free", o.id));
        }
    }

    // Essentially unique inert star lifts: every vertex of every object is
    // classified by at least one inert map from a star, and any two such
    // lifts differ by a unique star automorphism.
    for c in &cat.objects {
        for v in c.graph.vertices() {
            let cls = EmbClass::star_of(&c.graph, v);
            let lifts: Vec<&CatMorphism> = cat
                .morphisms
                .iter()
                .filter(|m| {
                    m.inert && m.tgt == c.id && cat.object(&m.src).is_star() && {
                        let top = EmbClass::identity_of(&m.map.source);
                        m.map.emb_map[&top] == cls
                    }
                })
                .collect();
            if lifts.is_empty() {
                return violation("lifts", format!("no inert star lift classifies {v} in {}", c.id));
            }
            for s in &lifts {
                for s2 in &lifts {
                    if s.src != s2.src {
                        return violation(
                            "lifts",
                            format!("lifts of {v} in {} come from different stars", c.id),
                        );
                    }
                    let mediators = cat
                        .homs(&s.src, &s2.src)
                        .into_iter()
                        .filter(|z| {
                            z.inert && z.active && cat.composite(&s2.id, &z.id) == Some(&s.id)
                        })
                        .count();
                    if mediators != 1 {
                        return violation(
                            "lifts",
                            format!(
                                "{} mediating isomorphisms between lifts of {v} in {}",
                                mediators, c.id
                            ),
                        );
                    }
                    report.inert_lifts_checked += 1;
                }
            }
        }
    }

    // γ-image of substitution squares is a pullback of pointed sets.
    report.substitution_squares = check_substitution_squares(cat)?;
    Ok(report)
}

/// Builds substitution squares (inert star into c, active star onto d,
/// pushout c ⇸ c{d} with d ↣ c{d}) from catalog data and verifies that
/// their γ-images are pullbacks of finite pointed sets. Returns how many
/// squares were checked.
fn check_substitution_squares(cat: &Catalog) -> Result<usize, Violation> {
    let mut squares = 0usize;
    for c in &cat.objects {
        for v in c.graph.vertices().iter() {
            let valence = c.graph.nbhd(v).len();
            for d in &cat.objects {
                if d.graph.boundary().len() != valence {
                    continue;
                }
                if c.graph.is_nodeless_loop() || d.graph.is_nodeless_loop() {
                    continue;
                }
                // One boundary bijection suffices per (c, v, d).
                let outward: Vec<ArcId> = c
                    .graph
                    .nbhd(v)
                    .iter()
                    .map(|dart| c.graph.involute(dart).clone())
                    .collect();
                let legs: BTreeMap<ArcId, ArcId> = outward
                    .iter()
                    .cloned()
                    .zip(d.graph.boundary().iter().cloned())
                    .collect();
                // Bottom active map c ⇸ c{d}: substitute d at v, stars
                // elsewhere.
                let pieces: BTreeMap<VertexId, crate::gmap::Piece> = c
                    .graph
                    .vertices()
                    .iter()
                    .map(|u| {
                        if u == v {
                            (
                                u.clone(),
                                crate::gmap::Piece {
                                    graph: d.graph.clone(),
                                    legs: legs.clone(),
                                },
                            )
                        } else {
                            let rep = crate::embedding::representative(
                                &c.graph,
                                &EmbClass::star_of(&c.graph, u),
                            );
                            let star_legs: BTreeMap<ArcId, ArcId> = rep
                                .source
                                .boundary()
                                .iter()
                                .map(|b| (rep.arc(b).clone(), b.clone()))
                                .collect();
                            (
                                u.clone(),
                                crate::gmap::Piece {
                                    graph: rep.source.clone(),
                                    legs: star_legs,
                                },
                            )
                        }
                    })
                    .collect();
                let sub = match crate::gmap::substitute(&c.graph, &pieces, cat.mode) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
                // γ of the four maps, computed directly.
                // Top: active star_v ⇸ d sends the star's vertex everywhere.
                // Left: ι_v inert.
                // Bottom: c ⇸ c{d}: v goes to all of d's vertices, u ≠ v to
                // its own star copy.
                // Right: d ↣ c{d} embedding.
                let cd = &sub.graph;
                squares += 1;
                let bottom_fiber = |w: &VertexId| -> Option<VertexId> {
                    for (u, emb) in &sub.piece_embeddings {
                        for pw in emb.source.vertices() {
                            if emb.vertex(pw) == w {
                                return Some(u.clone());
                            }
                        }
                    }
                    None
                };
                let right_fiber = |w: &VertexId| -> Option<VertexId> {
                    let emb = &sub.piece_embeddings[v];
                    for pw in emb.source.vertices() {
                        if emb.vertex(pw) == w {
                            return Some(pw.clone());
                        }
                    }
                    None
                };
                // Pullback check: (V_c)₊ ×_{{v}₊} (V_d)₊ ≅ (V_{c{d}})₊.
                // Pairs (p ∈ (V_c)₊, q ∈ (V_d)₊) where p = v iff q ≠ *.
                let mut pairs: BTreeSet<(Option<VertexId>, Option<VertexId>)> = BTreeSet::new();
                for p in c.graph.vertices() {
                    if p == v {
                        for q in d.graph.vertices() {
                            pairs.insert((Some(p.clone()), Some(q.clone())));
                        }
                    } else {
                        pairs.insert((Some(p.clone()), None));
                    }
                }
                pairs.insert((None, None));
                let mut image: BTreeSet<(Option<VertexId>, Option<VertexId>)> = BTreeSet::new();
                for w in cd.vertices() {
                    let pair = (bottom_fiber(w), right_fiber(w));
                    if !image.insert(pair) {
                        return violation("extensional", "γ-image square is not mono".to_string());
                    }
                }
                image.insert((None, None));
                if image != pairs {
                    return violation(
                        "extensional",
                        format!("γ-image of the substitution square at {}/{v} is not a pullback", c.id),
                    );
                }
                if squares >= 25 {
                    return Ok(squares);
                }
            }
        }
    }
    Ok(squares)
}

/// A functor between catalogs, stored as object and morphism tables.
#[derive(Debug, Clone)]
pub struct CatFunctor {
    pub obj_map: BTreeMap<ObjId, ObjId>,
    pub mor_map: BTreeMap<MorId, MorId>,
}

/// The functor that forgets orientations: objects map to their underlying
/// graphs, morphisms to their underlying maps.
pub fn forget_orientation(oriented: &Catalog, plain: &Catalog) -> Result<CatFunctor, Violation> {
    let mut obj_map = BTreeMap::new();
    for o in &oriented.objects {
        let target = plain
            .find_object_by(&o.graph, None)
            .ok_or_else(|| Violation::new("functor", format!("no underlying object for {}", o.id)))?;
        obj_map.insert(o.id.clone(), target);
    }
    let mut mor_map = BTreeMap::new();
    for m in &oriented.morphisms {
        let target = plain
            .find_morphism(&obj_map[&m.src], &obj_map[&m.tgt], &m.map)
            .ok_or_else(|| Violation::new("functor", format!("no underlying morphism for {}", m.id)))?;
        mor_map.insert(m.id.clone(), target);
    }
    Ok(CatFunctor { obj_map, mor_map })
}

/// The inclusion of a full subcatalog built by `restrict_objects` (or any
/// catalog whose objects and morphisms match by content).
pub fn inclusion(small: &Catalog, big: &Catalog) -> Result<CatFunctor, Violation> {
    let mut obj_map = BTreeMap::new();
    for o in &small.objects {
        let target = big
            .find_object_by(&o.graph, o.orientation.as_ref())
            .ok_or_else(|| Violation::new("functor", format!("object {} not in codomain", o.id)))?;
        obj_map.insert(o.id.clone(), target);
    }
    let mut mor_map = BTreeMap::new();
    for m in &small.morphisms {
        let target = big
            .find_morphism(&obj_map[&m.src], &obj_map[&m.tgt], &m.map)
            .ok_or_else(|| Violation::new("functor", format!("morphism {} not in codomain", m.id)))?;
        mor_map.insert(m.id.clone(), target);
    }
    Ok(CatFunctor { obj_map, mor_map })
}

/// Restriction f*: precompose a presheaf on the codomain with the functor.
pub fn restrict_presheaf(f: &CatFunctor, small: &Catalog, m: &Presheaf) -> Presheaf {
    Presheaf {
        elements: small
            .objects
            .iter()
            .map(|o| (o.id.clone(), m.elements[&f.obj_map[&o.id]].clone()))
            .collect(),
        restrictions: small
            .morphisms
            .iter()
            .map(|mor| {
                (
                    mor.id.clone(),
                    m.restrictions[&f.mor_map[&mor.id]].clone(),
                )
            })
            .collect(),
    }
}

/// Left Kan extension along the orientation-forgetting functor: the value at
/// a plain object is the disjoint union over its orientations of the values
/// at the oriented objects, and a morphism acts through its unique oriented
/// lift.
pub fn lke_orientation(
    f: &CatFunctor,
    oriented: &Catalog,
    plain: &Catalog,
    z: &Presheaf,
) -> Result<Presheaf, Violation> {
    let token = |oid: &ObjId, ztok: &str| format!("{oid}#{ztok}");
    let mut elements: BTreeMap<ObjId, Vec<String>> = BTreeMap::new();
    for o in &plain.objects {
        let mut toks = Vec::new();
        for x in orientations_of(&o.graph) {
            let oriented_obj = oriented
                .find_object_by(&o.graph, Some(&x))
                .ok_or_else(|| {
                    Violation::new("lke", format!("oriented catalog misses an orientation of {}", o.id))
                })?;
            for ztok in z.at(&oriented_obj) {
                toks.push(token(&oriented_obj, ztok));
            }
        }
        toks.sort();
        elements.insert(o.id.clone(), toks);
    }
    let mut restrictions: BTreeMap<MorId, BTreeMap<String, String>> = BTreeMap::new();
    for m in &plain.morphisms {
        let mut table = BTreeMap::new();
        for x in orientations_of(&m.map.target) {
            let tgt_obj = oriented
                .find_object_by(&m.map.target, Some(&x))
                .expect("checked above");
            let lift_or = restrict_orientation(&m.map, &x);
            let src_obj = oriented
                .find_object_by(&m.map.source, Some(&lift_or))
                .ok_or_else(|| Violation::new("lke", "missing oriented lift object".to_string()))?;
            let lift = oriented
                .find_morphism(&src_obj, &tgt_obj, &m.map)
                .ok_or_else(|| Violation::new("lke", "missing oriented lift morphism".to_string()))?;
            debug_assert_eq!(f.mor_map[&lift], m.id);
            for ztok in z.at(&tgt_obj) {
                let restricted = z.restrict_along(&lift, ztok);
                table.insert(token(&tgt_obj, ztok), token(&src_obj, restricted));
            }
        }
        restrictions.insert(m.id.clone(), table);
    }
    Ok(Presheaf {
        elements,
        restrictions,
    })
}

/// The orientation of a tree rooted at a boundary arc: the root arc is the
/// unique output of the tree and every vertex has exactly one output (its
/// dart towards the root).
pub fn rooted_orientation(t: &Graph, root: &ArcId) -> Result<Orientation, Violation> {
    if !t.is_tree() {
        return violation("tree", "rooted orientations need a tree".to_string());
    }
    if !t.boundary().contains(root) {
        return violation("root", format!("{root} is not a boundary arc"));
    }
    // Walk the tree from the root edge, recording each vertex's parent
    // edge.
    let root_edge = t.edge_of(root);
    let mut parent: BTreeMap<VertexId, crate::graph::Edge> = BTreeMap::new();
    let mut queue: Vec<crate::graph::Edge> = vec![root_edge.clone()];
    let mut seen_edges: BTreeSet<crate::graph::Edge> = [root_edge].into_iter().collect();
    while let Some(e) = queue.pop() {
        for a in e.arcs() {
            if let Some(v) = t.attach(a) {
                if parent.contains_key(v) {
                    continue;
                }
                parent.insert(v.clone(), e.clone());
                for d in t.nbhd(v) {
                    let next = t.edge_of(d);
                    if seen_edges.insert(next.clone()) {
                        queue.push(next);
                    }
                }
            }
        }
    }
    let mut plus: BTreeSet<ArcId> = BTreeSet::new();
    for v in t.vertices() {
        let pe = &parent[v];
        for d in t.nbhd(v) {
            if t.edge_of(d) == *pe {
                plus.insert(d.clone());
            }
        }
    }
    // Boundary arcs other than the root point into the tree (+1 when seen
    // from outside means: the arc's sign is the negative of its partner's;
    // partners of non-root boundary arcs are darts pointing away from the
    // root, hence −1, making the boundary arc +1 — except the root itself).
    for b in t.boundary() {
        let partner = t.involute(b);
        if t.is_dart(partner) {
            if !plus.contains(partner) {
                plus.insert(b.clone());
            }
        } else {
            // The tree is a single edge; the root is −1.
            if b != root {
                plus.insert(b.clone());
            }
        }
    }
    let orientation = Orientation::from_plus_arcs(t, &plus)?;
    let dg = DirectedGraph::new(t.clone(), orientation.clone())?;
    debug_assert!(crate::directed::is_dendroidal(&dg));
    debug_assert_eq!(dg.out_of_graph(), vec![root.clone()]);
    Ok(orientation)
}

/// Left Kan extension from the dendroidal catalog to the cyclic tree
/// catalog: the value at a tree is the disjoint union over its boundary arcs
/// of the values at the correspondingly rooted trees.
pub fn lke_dendroidal_to_cyclic(
    omega: &Catalog,
    cyc: &Catalog,
    z: &Presheaf,
) -> Result<Presheaf, Violation> {
    let token = |oid: &ObjId, ztok: &str| format!("{oid}#{ztok}");
    let mut elements: BTreeMap<ObjId, Vec<String>> = BTreeMap::new();
    for o in &cyc.objects {
        if o.graph.boundary().is_empty() {
            return violation("cyclic", format!("{} has empty boundary", o.id));
        }
        let mut toks = Vec::new();
        for r in o.graph.boundary() {
            let x = rooted_orientation(&o.graph, r)?;
            let rooted = omega.find_object_by(&o.graph, Some(&x)).ok_or_else(|| {
                Violation::new("lke", format!("dendroidal catalog misses a rooting of {}", o.id))
            })?;
            for ztok in z.at(&rooted) {
                toks.push(token(&rooted, ztok));
            }
        }
        toks.sort();
        elements.insert(o.id.clone(), toks);
    }
    let mut restrictions: BTreeMap<MorId, BTreeMap<String, String>> = BTreeMap::new();
    for m in &cyc.morphisms {
        let mut table = BTreeMap::new();
        for r in m.map.target.boundary() {
            let x = rooted_orientation(&m.map.target, r)?;
            let tgt_obj = omega.find_object_by(&m.map.target, Some(&x)).expect("checked");
            let lift_or = restrict_orientation(&m.map, &x);
            let src_obj = omega
                .find_object_by(&m.map.source, Some(&lift_or))
                .ok_or_else(|| {
                    Violation::new(
                        "lke",
                        "restricted orientation of a cyclic map is not a rooting".to_string(),
                    )
                })?;
            let lift = omega
                .find_morphism(&src_obj, &tgt_obj, &m.map)
                .ok_or_else(|| Violation::new("lke", "missing dendroidal lift".to_string()))?;
            for ztok in z.at(&tgt_obj) {
                let restricted = z.restrict_along(&lift, ztok);
                table.insert(token(&tgt_obj, ztok), token(&src_obj, restricted));
            }
        }
        restrictions.insert(m.id.clone(), table);
    }
    Ok(Presheaf {
        elements,
        restrictions,
    })
}

/// Random Segal presheaves: seeded products and coproducts of verified
/// Segal building blocks (the terminal presheaf, restricted orientation
/// presheaves, restricted Kan extensions of the terminal).
pub fn random_segal_presheaves(
    oriented: &Catalog,
    plain: &Catalog,
    f: &CatFunctor,
    seed: u64,
    count: usize,
) -> Result<Vec<Presheaf>, Violation> {
    let terminal = Presheaf::terminal(oriented);
    let omega_like = restrict_presheaf(f, oriented, &Presheaf::orientations(plain));
    let kan = lke_orientation(f, oriented, plain, &Presheaf::terminal(oriented))?;
    let kan_back = restrict_presheaf(f, oriented, &kan);
    let atoms = [terminal, omega_like, kan_back];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Presheaf> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let max_size = 64usize;
    while out.len() < count {
        let a = atoms[rng.gen_range(0..atoms.len())].clone();
        let combined = match rng.gen_range(0..4) {
            0 => a,
            1 => {
                let b = &atoms[rng.gen_range(0..atoms.len())];
                a.product(b)
            }
            2 => {
                let b = &atoms[rng.gen_range(0..atoms.len())];
                a.coproduct(b)
            }
            _ => {
                let b = &atoms[rng.gen_range(0..atoms.len())];
                let c = &atoms[rng.gen_range(0..atoms.len())];
                a.coproduct(&b.product(c))
            }
        };
        if combined.elements.values().any(|v| v.len() > max_size) {
            continue;
        }
        let signature: Vec<usize> = combined.elements.values().map(|v| v.len()).collect();
        if !seen.insert(signature) && rng.gen_bool(0.5) {
            continue;
        }
        out.push(combined);
    }
    Ok(out)
}

/// Discrete fibration check: every morphism into the image of an object has
/// exactly one lift.
pub fn check_discrete_fibration(
    f: &CatFunctor,
    upstairs: &Catalog,
    downstairs: &Catalog,
) -> Result<(), String> {
    for c in &upstairs.objects {
        let fc = &f.obj_map[&c.id];
        for phi in downstairs.morphisms.iter().filter(|m| &m.tgt == fc) {
            let lifts: Vec<&CatMorphism> = upstairs
                .morphisms
                .iter()
                .filter(|psi| psi.tgt == c.id && f.mor_map[&psi.id] == phi.id)
                .collect();
            if lifts.len() != 1 {
                return Err(format!(
                    "{} into the image of {} has {} lifts",
                    phi.id,
                    c.id,
                    lifts.len()
                ));
            }
        }
    }
    Ok(())
}

/// Unique inert lifting: inert morphisms into the image of an object lift
/// uniquely, and the lift is inert.
pub fn check_unique_inert_lifting(
    f: &CatFunctor,
    upstairs: &Catalog,
    downstairs: &Catalog,
) -> Result<(), String> {
    for c in &upstairs.objects {
        let fc = &f.obj_map[&c.id];
        for phi in downstairs.morphisms.iter().filter(|m| &m.tgt == fc && m.inert) {
            let lifts: Vec<&CatMorphism> = upstairs
                .morphisms
                .iter()
                .filter(|psi| psi.tgt == c.id && f.mor_map[&psi.id] == phi.id)
                .collect();
            if lifts.len() != 1 {
                return Err(format!(
                    "inert {} into the image of {} has {} lifts",
                    phi.id,
                    c.id,
                    lifts.len()
                ));
            }
            if !lifts[0].inert {
                return Err(format!("the lift of inert {} is not inert", phi.id));
            }
        }
    }
    Ok(())
}

/// Strong Segal condition: the functor induces a bijection of elementary
/// cover categories at every object.
pub fn check_strong_segal(
    f: &CatFunctor,
    upstairs: &Catalog,
    downstairs: &Catalog,
) -> Result<(), String> {
    for c in &upstairs.objects {
        let fc = &f.obj_map[&c.id];
        let up = upstairs.elementary_covers(&c.id, false);
        let down = downstairs.elementary_covers(fc, false);
        // Objects biject.
        let mapped: BTreeSet<MorId> = up.objects.iter().map(|m| f.mor_map[m].clone()).collect();
        let expect: BTreeSet<MorId> = down.objects.iter().cloned().collect();
        if mapped.len() != up.objects.len() || mapped != expect {
            return Err(format!(
                "elementary covers of {} do not biject with covers of {}",
                c.id, fc
            ));
        }
        // Arrows biject.
        let obj_pos_down: BTreeMap<&MorId, usize> =
            down.objects.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mapped_arrows: BTreeSet<(usize, usize, MorId)> = up
            .arrows
            .iter()
            .map(|a| {
                (
                    obj_pos_down[&f.mor_map[&up.objects[a.from]]],
                    obj_pos_down[&f.mor_map[&up.objects[a.to]]],
                    f.mor_map[&a.via].clone(),
                )
            })
            .collect();
        let down_arrows: BTreeSet<(usize, usize, MorId)> = down
            .arrows
            .iter()
            .map(|a| (a.from, a.to, a.via.clone()))
            .collect();
        if mapped_arrows.len() != up.arrows.len() || mapped_arrows != down_arrows {
            return Err(format!(
                "cover-category arrows of {} do not biject with those of {}",
                c.id, fc
            ));
        }
    }
    Ok(())
}

fn close_under_elementaries(
    mode: Mode,
    graphs: Vec<(String, Graph)>,
) -> Result<Vec<(String, Graph)>, Violation> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut shapes: BTreeSet<String> = BTreeSet::new();
    let mut valences: BTreeSet<usize> = BTreeSet::new();
    let mut need_edge = false;
    for (name, g) in graphs {
        if mode == Mode::Plain && g.is_nodeless_loop() {
            return violation("objects", format!("{name} is a nodeless loop in a plain catalog"));
        }
        if !g.is_connected() {
            return violation("objects", format!("{name} is not connected"));
        }
        if !names.insert(name.clone()) {
            return violation("objects", format!("duplicate object name {name}"));
        }
        for v in g.vertices() {
            valences.insert(g.nbhd(v).len());
        }
        if !g.edges().is_empty() {
            need_edge = true;
        }
        shapes.insert(g.encode());
        out.push((name, g));
    }
    let fresh = |base: String, names: &mut BTreeSet<String>| -> String {
        let mut name = base;
        while !names.insert(name.clone()) {
            name.push('\'');
        }
        name
    };
    if need_edge {
        let e = Graph::standard(StandardGraph::Edge);
        if !shapes.contains(&e.encode()) {
            shapes.insert(e.encode());
            let name = fresh("edge".to_string(), &mut names);
            out.push((name, e));
        }
    }
    for n in valences {
        let s = Graph::standard(StandardGraph::Star(n));
        if !shapes.contains(&s.encode()) {
            shapes.insert(s.encode());
            let name = fresh(format!("star{n}"), &mut names);
            out.push((name, s));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn small_plain() -> Catalog {
        Catalog::build_plain(
            Mode::Plain,
            vec![
                ("star2".to_string(), Graph::standard(StandardGraph::Star(2))),
                (
                    "loop1".to_string(),
                    Graph::standard(StandardGraph::LoopWithOneVertex),
                ),
            ],
        )
        .unwrap()
    }

    #[test]
    fn catalog_contains_elementaries_and_identities() {
        let cat = small_plain();
        assert!(cat.objects.iter().any(|o| o.is_edge()));
        assert!(cat.objects.iter().any(|o| o.is_star()));
        for o in &cat.objects {
            let idm = cat.identity_of(&o.id);
            assert!(cat.morphism(idm).active && cat.morphism(idm).inert);
        }
    }

    #[test]
    fn terminal_is_segal() {
        let cat = small_plain();
        let t = Presheaf::terminal(&cat);
        let (ok, _) = is_segal(&cat, &t, false).unwrap();
        assert!(ok);
    }

    #[test]
    fn orientation_presheaf_is_segal() {
        let cat = small_plain();
        let o = Presheaf::orientations(&cat);
        check_presheaf(&cat, &o).unwrap();
        let (ok, wit) = is_segal(&cat, &o, false).unwrap();
        assert!(ok, "{wit:?}");
    }

    #[test]
    fn doubled_value_at_a_big_object_is_not_segal() {
        // The parallel pair admits no maps out to smaller shapes, so its
        // element set can be emptied without breaking functoriality.
        let cat = Catalog::build_plain(
            Mode::Plain,
            vec![("parallel".to_string(), corpus::parallel_pair())],
        )
        .unwrap();
        let parallel = cat
            .objects
            .iter()
            .find(|o| o.graph == corpus::parallel_pair())
            .unwrap()
            .id
            .clone();
        let mut x = Presheaf::terminal(&cat);
        x.elements.insert(parallel.clone(), Vec::new());
        for m in &cat.morphisms {
            if m.tgt == parallel {
                x.restrictions.insert(m.id.clone(), BTreeMap::new());
            }
        }
        check_presheaf(&cat, &x).unwrap();
        let (ok, wit) = is_segal(&cat, &x, false).unwrap();
        assert!(!ok);
        let bad = wit.iter().find(|w| w.object == parallel).unwrap();
        assert_eq!(bad.value_count, 0);
        assert_eq!(bad.limit_count, 1, "limit of singletons is a singleton");
    }

    #[test]
    fn missing_elementary_covers_is_a_configuration_error() {
        let cat = small_plain();
        let no_stars = cat.restrict_objects(|o| !o.is_star());
        let t = Presheaf::terminal(&no_stars);
        let err = is_segal(&no_stars, &t, false).unwrap_err();
        assert_eq!(err.clause, "covers");
    }

    #[test]
    fn gamma_of_inert_and_active_maps() {
        let cat = small_plain();
        for m in &cat.morphisms {
            let pm = gamma(&m.map);
            if m.active {
                assert!(pm.is_active());
            }
            if m.inert {
                assert!(pm.is_inert(&m.map.source));
            }
        }
    }

    #[test]
    fn gamma_properties_hold_on_the_small_catalog() {
        let cat = small_plain();
        let report = gamma_properties(&cat).unwrap();
        assert!(report.composable_pairs > 0);
        assert!(report.unit_sections_checked > 0);
        assert!(report.substitution_squares >= 1);
    }

    #[test]
    fn oriented_catalog_and_forgetful_functor() {
        let graphs = vec![("star2".to_string(), Graph::standard(StandardGraph::Star(2)))];
        let plain = Catalog::build_plain(Mode::Plain, graphs.clone()).unwrap();
        let oriented = Catalog::build_oriented(Mode::Plain, graphs).unwrap();
        let f = forget_orientation(&oriented, &plain).unwrap();
        check_discrete_fibration(&f, &oriented, &plain).unwrap();
        check_unique_inert_lifting(&f, &oriented, &plain).unwrap();
        check_strong_segal(&f, &oriented, &plain).unwrap();
    }

    #[test]
    fn lke_of_terminal_counts_orientations() {
        let graphs = vec![("star2".to_string(), Graph::standard(StandardGraph::Star(2)))];
        let plain = Catalog::build_plain(Mode::Plain, graphs.clone()).unwrap();
        let oriented = Catalog::build_oriented(Mode::Plain, graphs).unwrap();
        let f = forget_orientation(&oriented, &plain).unwrap();
        let z = Presheaf::terminal(&oriented);
        let fz = lke_orientation(&f, &oriented, &plain, &z).unwrap();
        check_presheaf(&plain, &fz).unwrap();
        for o in &plain.objects {
            assert_eq!(
                fz.at(&o.id).len(),
                1 << o.graph.edges().len(),
                "at {}",
                o.id
            );
        }
        let (ok, wit) = is_segal(&plain, &fz, false).unwrap();
        assert!(ok, "{wit:?}");
    }

    #[test]
    fn representable_under_lke_gives_plain_homs() {
        let graphs = vec![("star1".to_string(), Graph::standard(StandardGraph::Star(1)))];
        let plain = Catalog::build_plain(Mode::Plain, graphs.clone()).unwrap();
        let oriented = Catalog::build_oriented(Mode::Plain, graphs).unwrap();
        let f = forget_orientation(&oriented, &plain).unwrap();
        for d in &oriented.objects {
            let z = Presheaf::representable(&oriented, &d.id);
            check_presheaf(&oriented, &z).unwrap();
            let fz = lke_orientation(&f, &oriented, &plain, &z).unwrap();
            for o in &plain.objects {
                let expected = plain.homs(&o.id, &f.obj_map[&d.id]).len();
                assert_eq!(fz.at(&o.id).len(), expected, "{} → {}", o.id, d.id);
            }
        }
    }

    #[test]
    fn restription_of_terminal_is_terminal() {
        let graphs = vec![("star2".to_string(), Graph::standard(StandardGraph::Star(2)))];
        let plain = Catalog::build_plain(Mode::Plain, graphs.clone()).unwrap();
        let oriented = Catalog::build_oriented(Mode::Plain, graphs).unwrap();
        let f = forget_orientation(&oriented, &plain).unwrap();
        let t = Presheaf::terminal(&plain);
        let back = restrict_presheaf(&f, &oriented, &t);
        check_presheaf(&oriented, &back).unwrap();
        assert_eq!(back, Presheaf::terminal(&oriented));
    }

    #[test]
    fn rooted_orientation_is_dendroidal() {
        for t in [
            Graph::standard(StandardGraph::Star(3)),
            Graph::standard(StandardGraph::Line(2)),
            Graph::standard(StandardGraph::Line(3)),
        ] {
            for r in t.boundary() {
                let x = rooted_orientation(&t, r).unwrap();
                let dg = DirectedGraph::new(t.clone(), x).unwrap();
                assert!(crate::directed::is_dendroidal(&dg));
                assert_eq!(dg.out_of_graph(), vec![r.clone()]);
            }
        }
    }

    #[test]
    fn flat_elementaries_flag_runs() {
        // The flat variant (stars-only elementaries) is exposed for
        // demonstration; nothing is asserted about its outcome beyond
        // well-definedness.
        let cat = small_plain();
        let t = Presheaf::terminal(&cat);
        let _ = is_segal(&cat, &t, true).unwrap();
    }

    #[test]
    fn dendroidal_to_cyclic_representables_give_cyclic_homs() {
        let trees = vec![
            ("star1".to_string(), Graph::standard(StandardGraph::Star(1))),
            ("star2".to_string(), Graph::standard(StandardGraph::Star(2))),
            ("line2".to_string(), Graph::standard(StandardGraph::Line(2))),
        ];
        let plain_trees = Catalog::build_plain(Mode::Plain, trees.clone()).unwrap();
        let cyc = plain_trees.restrict_objects(|o| !o.graph.boundary().is_empty());
        let oriented_trees = Catalog::build_oriented(Mode::Plain, trees).unwrap();
        let omega = oriented_trees.restrict_objects(|o| {
            let dg =
                DirectedGraph::new(o.graph.clone(), o.orientation.clone().unwrap()).unwrap();
            crate::directed::is_dendroidal(&dg)
        });
        for d in &omega.objects {
            let z = Presheaf::representable(&omega, &d.id);
            let extended = lke_dendroidal_to_cyclic(&omega, &cyc, &z).unwrap();
            check_presheaf(&cyc, &extended).unwrap();
            let underlying = cyc
                .find_object_by(&d.graph, None)
                .expect("underlying tree is cyclic");
            for o in &cyc.objects {
                assert_eq!(
                    extended.at(&o.id).len(),
                    cyc.homs(&o.id, &underlying).len(),
                    "{} → {}",
                    o.id,
                    d.id
                );
            }
        }
    }

    #[test]
    fn random_segal_presheaves_are_segal() {
        let graphs = vec![("star2".to_string(), Graph::standard(StandardGraph::Star(2)))];
        let plain = Catalog::build_plain(Mode::Plain, graphs.clone()).unwrap();
        let oriented = Catalog::build_oriented(Mode::Plain, graphs).unwrap();
        let f = forget_orientation(&oriented, &plain).unwrap();
        let zs = random_segal_presheaves(&oriented, &plain, &f, 42, 5).unwrap();
        assert_eq!(zs.len(), 5);
        for z in &zs {
            check_presheaf(&oriented, z).unwrap();
            let (ok, wit) = is_segal(&oriented, z, false).unwrap();
            assert!(ok, "{wit:?}");
        }
    }
}
