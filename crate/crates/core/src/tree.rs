//! Simply-connected specialization: subtrees as triples of subsets, their
//! overlaps, unions and intersections, and the characterization of maps
//! between trees by overlap and union preservation.
//!
//! On a tree every embedding is injective on arcs, so embedding classes
//! correspond bijectively to subtrees, and boundaries determine classes.

use crate::diag::{violation, Violation};
use crate::embedding::{EmbClass, Embeddings};
use crate::gmap::NewGraphMap;
use crate::graph::{ArcId, Graph, VertexId};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// A subtree of an ambient tree: arc, dart, and vertex subsets closed under
/// involution, attachment, and neighborhoods, and connected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subtree {
    pub arcs: BTreeSet<ArcId>,
    pub darts: BTreeSet<ArcId>,
    pub vertices: BTreeSet<VertexId>,
}

impl Subtree {
    /// The subtree carried by an embedding class of a tree.
    pub fn from_class(t: &Graph, c: &EmbClass) -> Subtree {
        let mut darts: BTreeSet<ArcId> = BTreeSet::new();
        for v in &c.vertices {
            darts.extend(t.nbhd(v).iter().cloned());
        }
        let mut arcs = darts.clone();
        arcs.extend(c.boundary.iter().cloned());
        Subtree {
            arcs,
            darts,
            vertices: c.vertices.clone(),
        }
    }

    pub fn to_class(&self) -> EmbClass {
        EmbClass {
            vertices: self.vertices.clone(),
            boundary: self.arcs.difference(&self.darts).cloned().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty() && self.vertices.is_empty()
    }

    /// Structural validity inside `t`, plus connectivity.
    pub fn validate(&self, t: &Graph) -> Result<(), Violation> {
        if self.is_empty() {
            return violation("subtree", "subtrees are nonempty".to_string());
        }
        for a in &self.arcs {
            if !t.arcs().contains(a) {
                return violation("subtree", format!("{a} is not an arc of the tree"));
            }
            if !self.arcs.contains(t.involute(a)) {
                return violation("subtree", format!("arcs are not involution-closed at {a}"));
            }
        }
        for v in &self.vertices {
            if !t.vertices().contains(v) {
                return violation("subtree", format!("{v} is not a vertex of the tree"));
            }
            for d in t.nbhd(v) {
                if !self.darts.contains(d) {
                    return violation("subtree", format!("neighborhood of {v} is not contained"));
                }
            }
        }
        for d in &self.darts {
            let v = match t.attach(d) {
                Some(v) => v,
                None => return violation("subtree", format!("{d} is not a dart of the tree")),
            };
            if !self.vertices.contains(v) {
                return violation("subtree", format!("dart {d} attaches outside the subtree"));
            }
            if !self.arcs.contains(d) {
                return violation("subtree", format!("dart {d} is not among the arcs"));
            }
        }
        // Every contained arc attached inside must be listed as a dart.
        for a in &self.arcs {
            if let Some(v) = t.attach(a) {
                if self.vertices.contains(v) && !self.darts.contains(a) {
                    return violation("subtree", format!("arc {a} should be a dart"));
                }
            }
        }
        if !self.is_connected(t) {
            return violation("subtree", "subtree is not connected".to_string());
        }
        Ok(())
    }

    fn is_connected(&self, t: &Graph) -> bool {
        if self.is_empty() {
            return false;
        }
        // Union-find over contained arcs and vertices.
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        let key_arc = |a: &ArcId| format!("a:{a}");
        let key_vert = |v: &VertexId| format!("v:{v}");
        for a in &self.arcs {
            parent.insert(key_arc(a), key_arc(a));
        }
        for v in &self.vertices {
            parent.insert(key_vert(v), key_vert(v));
        }
        fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
            let p = parent[x].clone();
            if p == x {
                return p;
            }
            let root = find(parent, &p);
            parent.insert(x.to_string(), root.clone());
            root
        }
        let union = |parent: &mut BTreeMap<String, String>, x: String, y: String| {
            let rx = find(parent, &x);
            let ry = find(parent, &y);
            if rx != ry {
                parent.insert(rx, ry);
            }
        };
        for a in &self.arcs {
            union(&mut parent, key_arc(a), key_arc(t.involute(a)));
        }
        for d in &self.darts {
            let v = t.attach(d).expect("validated dart");
            union(&mut parent, key_arc(d), key_vert(v));
        }
        let keys: Vec<String> = parent.keys().cloned().collect();
        let mut roots = BTreeSet::new();
        for k in keys {
            roots.insert(find(&mut parent, &k));
        }
        roots.len() == 1
    }

    pub fn intersection(&self, other: &Subtree) -> Subtree {
        Subtree {
            arcs: self.arcs.intersection(&other.arcs).cloned().collect(),
            darts: self.darts.intersection(&other.darts).cloned().collect(),
            vertices: self.vertices.intersection(&other.vertices).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Subtree) -> Subtree {
        Subtree {
            arcs: self.arcs.union(&other.arcs).cloned().collect(),
            darts: self.darts.union(&other.darts).cloned().collect(),
            vertices: self.vertices.union(&other.vertices).cloned().collect(),
        }
    }
}

/// All subtrees of a tree, in bijection with its embedding classes.
pub fn subtrees(t: &Graph) -> Result<Vec<Subtree>, Violation> {
    if !t.is_tree() {
        return violation("tree", "input is not a tree".to_string());
    }
    let table = Embeddings::of(t)?;
    Ok(table
        .classes()
        .iter()
        .map(|c| Subtree::from_class(t, c))
        .collect())
}

/// Two subtrees overlap when they share an arc, dart, or vertex.
pub fn overlap(r: &Subtree, s: &Subtree) -> bool {
    !r.intersection(s).is_empty()
}

/// The union of two subtrees, defined exactly when they overlap.
pub fn tree_union(t: &Graph, r: &Subtree, s: &Subtree) -> Option<Subtree> {
    if !overlap(r, s) {
        return None;
    }
    let u = r.union(s);
    debug_assert!(u.validate(t).is_ok(), "union of overlapping subtrees is a subtree");
    Some(u)
}

/// The intersection of two subtrees, defined exactly when they overlap.
pub fn tree_intersection(t: &Graph, r: &Subtree, s: &Subtree) -> Option<Subtree> {
    if !overlap(r, s) {
        return None;
    }
    let i = r.intersection(s);
    debug_assert!(i.validate(t).is_ok(), "intersection of overlapping subtrees is a subtree");
    Some(i)
}

/// Condition (v) on a candidate pair between trees: overlapping subtrees
/// have overlapping images, with the image of the union (resp. intersection)
/// equal to the union (resp. intersection) of the images.
pub fn check_overlap_conditions(m: &NewGraphMap) -> Result<(), Violation> {
    check_union_half(m)?;
    check_intersection_half(m)
}

/// The union half of condition (v).
pub fn check_union_half(m: &NewGraphMap) -> Result<(), Violation> {
    require_trees(m)?;
    let subs = subtrees(&m.source)?;
    for r in &subs {
        for s in &subs {
            if !overlap(r, s) {
                continue;
            }
            let fr = image_subtree(m, r);
            let fs = image_subtree(m, s);
            if !overlap(&fr, &fs) {
                return violation("(v)", format!("images of overlapping subtrees do not overlap"));
            }
            let u = r.union(s);
            let fu = image_subtree_of(m, &u);
            if fu != fr.union(&fs) {
                return violation("(v-union)", format!("φ̂(R∪S) ≠ φ̂R ∪ φ̂S"));
            }
        }
    }
    Ok(())
}

/// The intersection half of condition (v).
pub fn check_intersection_half(m: &NewGraphMap) -> Result<(), Violation> {
    require_trees(m)?;
    let subs = subtrees(&m.source)?;
    for r in &subs {
        for s in &subs {
            if !overlap(r, s) {
                continue;
            }
            let fr = image_subtree(m, r);
            let fs = image_subtree(m, s);
            if !overlap(&fr, &fs) {
                return violation("(v)", format!("images of overlapping subtrees do not overlap"));
            }
            let i = r.intersection(s);
            let fi = image_subtree_of(m, &i);
            if fi != fr.intersection(&fs) {
                return violation("(v-intersection)", format!("φ̂(R∩S) ≠ φ̂R ∩ φ̂S"));
            }
        }
    }
    Ok(())
}

/// Axiom (iv) alone: φ₀ maps each class boundary injectively onto the image
/// class boundary.
pub fn check_boundary_axiom(m: &NewGraphMap) -> Result<(), Violation> {
    let src = Embeddings::of(&m.source)?;
    let tgt = Embeddings::of(&m.target)?;
    for c in src.classes() {
        let image = match m.emb_map.get(c) {
            Some(d) => d,
            None => return violation("emb totality", format!("class {c} has no image")),
        };
        if !tgt.contains(image) {
            return violation("emb totality", format!("{image} is not in Emb(target)"));
        }
        let mapped: Vec<ArcId> = c.boundary.iter().map(|a| m.arc_map[a].clone()).collect();
        let mapped_set: BTreeSet<ArcId> = mapped.iter().cloned().collect();
        if mapped.len() != mapped_set.len() || mapped_set != image.boundary {
            return violation("(iv)", format!("boundary axiom fails at {c}"));
        }
    }
    Ok(())
}

fn require_trees(m: &NewGraphMap) -> Result<(), Violation> {
    if !m.source.is_tree() || !m.target.is_tree() {
        return violation("tree", "both graphs must be trees".to_string());
    }
    Ok(())
}

fn image_subtree(m: &NewGraphMap, r: &Subtree) -> Subtree {
    Subtree::from_class(&m.target, &m.emb_map[&r.to_class()])
}

fn image_subtree_of(m: &NewGraphMap, r: &Subtree) -> Subtree {
    image_subtree(m, r)
}

/// All pairs (φ₀, φ̂) between trees satisfying axiom (iv). On trees the
/// boundary determines the class, so φ̂ is forced by φ₀; candidates are
/// enumerated by sweeping the involutive arc maps, sampling with a fixed
/// seed when the sweep would exceed `cap`.
pub fn boundary_consistent_candidates(
    t: &Graph,
    t2: &Graph,
    cap: usize,
    seed: u64,
) -> Result<Vec<NewGraphMap>, Violation> {
    if !t.is_tree() || !t2.is_tree() {
        return violation("tree", "both graphs must be trees".to_string());
    }
    let src = Embeddings::of(t)?;
    let tgt = Embeddings::of(t2)?;
    let mut by_boundary: BTreeMap<BTreeSet<ArcId>, EmbClass> = BTreeMap::new();
    for c in tgt.classes() {
        // Boundaries are injective on Emb of a tree.
        if by_boundary.insert(c.boundary.clone(), c.clone()).is_some() {
            return violation("(iv)", "boundary collision on a tree".to_string());
        }
    }

    let edge_reps: Vec<ArcId> = t.edges().iter().map(|e| e.lo.clone()).collect();
    let targets: Vec<ArcId> = t2.arcs().iter().cloned().collect();
    if targets.is_empty() && !edge_reps.is_empty() {
        // No involutive arc map exists into an arcless tree.
        return Ok(Vec::new());
    }
    let total: usize = targets.len().checked_pow(edge_reps.len() as u32).unwrap_or(usize::MAX);

    let mut picks: Vec<Vec<usize>> = Vec::new();
    if total <= cap {
        let mut choice = vec![0usize; edge_reps.len()];
        loop {
            picks.push(choice.clone());
            if edge_reps.is_empty() {
                break;
            }
            let mut i = 0;
            loop {
                if i == edge_reps.len() {
                    break;
                }
                choice[i] += 1;
                if choice[i] < targets.len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
            if i == edge_reps.len() {
                break;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let indices: Vec<usize> = (0..targets.len()).collect();
        for _ in 0..cap {
            let choice: Vec<usize> = edge_reps
                .iter()
                .map(|_| *indices.choose(&mut rng).expect("nonempty"))
                .collect();
            picks.push(choice);
        }
    }

    let mut out = Vec::new();
    'next: for choice in picks {
        let mut arc_map: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for (i, a) in edge_reps.iter().enumerate() {
            let image = targets[choice[i]].clone();
            arc_map.insert(a.clone(), image.clone());
            arc_map.insert(t.involute(a).clone(), t2.involute(&image).clone());
        }
        let mut emb_map = BTreeMap::new();
        for c in src.classes() {
            let mapped: Vec<ArcId> = c.boundary.iter().map(|a| arc_map[a].clone()).collect();
            let mapped_set: BTreeSet<ArcId> = mapped.iter().cloned().collect();
            if mapped.len() != mapped_set.len() {
                continue 'next;
            }
            match by_boundary.get(&mapped_set) {
                Some(d) => {
                    emb_map.insert(c.clone(), d.clone());
                }
                None => continue 'next,
            }
        }
        out.push(NewGraphMap {
            source: t.clone(),
            target: t2.clone(),
            arc_map,
            emb_map,
        });
    }
    out.sort_by_key(|m| m.encode());
    out.dedup_by_key(|m| m.encode());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmap::{check_new_map, enumerate_maps, EnumCaps};
    use crate::graph::{Mode, StandardGraph};

    fn star(n: usize) -> Graph {
        Graph::standard(StandardGraph::Star(n))
    }

    #[test]
    fn subtrees_biject_with_embedding_classes() {
        for n in 0..=4 {
            let t = star(n);
            let subs = subtrees(&t).unwrap();
            assert_eq!(subs.len(), n + 1);
            let table = Embeddings::of(&t).unwrap();
            for s in &subs {
                s.validate(&t).unwrap();
                assert!(table.contains(&s.to_class()));
            }
        }
    }

    #[test]
    fn non_tree_is_rejected() {
        let w = Graph::standard(StandardGraph::LoopWithOneVertex);
        assert!(subtrees(&w).is_err());
    }

    #[test]
    fn adjacent_stars_overlap_and_union_is_everything() {
        let t = Graph::standard(StandardGraph::Line(2));
        let sv1 = Subtree::from_class(&t, &EmbClass::star_of(&t, &VertexId::from("v1")));
        let sv2 = Subtree::from_class(&t, &EmbClass::star_of(&t, &VertexId::from("v2")));
        assert!(overlap(&sv1, &sv2), "they share the internal edge's arcs");
        let u = tree_union(&t, &sv1, &sv2).unwrap();
        assert_eq!(u.to_class(), EmbClass::identity_of(&t));
        let i = tree_intersection(&t, &sv1, &sv2).unwrap();
        // The intersection is the internal edge.
        assert!(i.to_class().is_edge());
    }

    #[test]
    fn disjoint_leaf_edges_do_not_overlap() {
        let t = Graph::standard(StandardGraph::Line(2));
        let e0 = Subtree::from_class(&t, &EmbClass::edge_of(&t, &t.edge_of(&ArcId::from("e0"))));
        let e2 = Subtree::from_class(&t, &EmbClass::edge_of(&t, &t.edge_of(&ArcId::from("e2"))));
        assert!(!overlap(&e0, &e2));
        assert!(tree_union(&t, &e0, &e2).is_none());
        assert!(tree_intersection(&t, &e0, &e2).is_none());
    }

    #[test]
    fn union_agrees_with_embedding_unions() {
        let t = Graph::standard(StandardGraph::Line(3));
        let table = Embeddings::of(&t).unwrap();
        let subs = subtrees(&t).unwrap();
        for r in &subs {
            for s in &subs {
                let unions = table.all_unions(&r.to_class(), &s.to_class()).unwrap();
                match tree_union(&t, r, s) {
                    Some(u) => {
                        // The subtree union is the least union.
                        let uc = u.to_class();
                        assert!(unions.contains(&uc));
                        for other in &unions {
                            assert!(table.leq(&uc, other).unwrap());
                        }
                    }
                    None => assert!(unions.is_empty()),
                }
            }
        }
    }

    #[test]
    fn embeddings_into_trees_are_arc_injective() {
        for t in [star(3), Graph::standard(StandardGraph::Line(3))] {
            for f in crate::oracle::brute_force_embeddings(&t).unwrap() {
                let images: std::collections::BTreeSet<&ArcId> = f.arc_map.values().collect();
                assert_eq!(images.len(), f.arc_map.len());
            }
        }
    }

    #[test]
    fn boundary_is_injective_on_tree_embeddings() {
        for t in [star(3), Graph::standard(StandardGraph::Line(3))] {
            let table = Embeddings::of(&t).unwrap();
            let mut seen = BTreeSet::new();
            for c in table.classes() {
                assert!(seen.insert(c.boundary.clone()), "collision at {c}");
            }
        }
    }

    #[test]
    fn tree_characterization_matches_full_axioms() {
        // On trees, (iv) + (v) is equivalent to being a new graph map.
        let pairs = [
            (star(2), star(2)),
            (Graph::standard(StandardGraph::Line(2)), star(1)),
            (star(1), Graph::standard(StandardGraph::Line(2))),
        ];
        for (t, t2) in pairs {
            let candidates = boundary_consistent_candidates(&t, &t2, 100_000, 7).unwrap();
            let real: BTreeSet<String> = enumerate_maps(&t, &t2, Mode::Plain, EnumCaps::default())
                .unwrap()
                .iter()
                .map(|m| m.encode())
                .collect();
            for cand in candidates {
                check_boundary_axiom(&cand).unwrap();
                let passes_v = check_overlap_conditions(&cand).is_ok();
                let passes_full = check_new_map(&cand, Mode::Plain).is_ok();
                assert_eq!(passes_v, passes_full, "mismatch on {}", cand.encode());
                if passes_full {
                    assert!(real.contains(&cand.encode()), "must be in the hom-set");
                }
            }
        }
    }

    #[test]
    fn corrupted_table_breaks_union_preservation() {
        // Swap the two star images of the line(2) identity map: the result
        // still sends overlapping subtrees somewhere, but unions break.
        let t = Graph::standard(StandardGraph::Line(2));
        let mut m = crate::gmap::NewGraphMap::identity(&t);
        let s1 = EmbClass::star_of(&t, &VertexId::from("v1"));
        let s2 = EmbClass::star_of(&t, &VertexId::from("v2"));
        m.emb_map.insert(s1.clone(), s2.clone());
        m.emb_map.insert(s2, s1);
        let err = check_union_half(&m).unwrap_err();
        assert!(err.clause.starts_with("(v"), "{err}");
    }

    #[test]
    fn intersection_half_is_redundant() {
        // Every (iv) + (v-union) candidate already satisfies the
        // intersection half.
        let pairs = [
            (star(2), star(2)),
            (Graph::standard(StandardGraph::Line(2)), star(1)),
            (
                Graph::standard(StandardGraph::Line(2)),
                Graph::standard(StandardGraph::Line(2)),
            ),
        ];
        for (t, t2) in pairs {
            let candidates = boundary_consistent_candidates(&t, &t2, 100_000, 11).unwrap();
            for cand in candidates {
                if check_union_half(&cand).is_ok() {
                    check_intersection_half(&cand).unwrap_or_else(|e| {
                        panic!("intersection half failed on {}: {e}", cand.encode())
                    });
                }
            }
        }
    }
}
