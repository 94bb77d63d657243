//! Membership checks for the graph categories, behind a common trait and
//! registered by name. Each check composes module predicates: object-shape
//! conditions on source and target plus the map axioms of the category.
//! The CLI selects a check at runtime by its registry name.

use crate::diag::{violation, Violation};
use crate::directed::{
    check_oriented_map, is_dendroidal, is_dioperadic, is_properadic, DirectedGraph, Orientation,
};
use crate::gmap::{check_new_map, NewGraphMap};
use crate::graph::Mode;

/// A map together with the orientations the oriented categories need.
#[derive(Debug, Clone)]
pub struct CheckInput {
    pub map: NewGraphMap,
    pub src_orientation: Option<Orientation>,
    pub tgt_orientation: Option<Orientation>,
}

impl CheckInput {
    pub fn plain(map: NewGraphMap) -> CheckInput {
        CheckInput {
            map,
            src_orientation: None,
            tgt_orientation: None,
        }
    }

    fn orientations(&self) -> Result<(&Orientation, &Orientation), Violation> {
        match (&self.src_orientation, &self.tgt_orientation) {
            (Some(s), Some(t)) => Ok((s, t)),
            _ => violation(
                "orientation",
                "this category needs orientations on both graphs".to_string(),
            ),
        }
    }
}

/// One membership check per graph category.
pub trait CategoryCheck: Sync {
    /// Registry name, as used by the `--category` flag.
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn check(&self, input: &CheckInput) -> Result<(), Violation>;
}

struct Plain;
struct Extended;
struct PlainOriented;
struct ExtendedOriented;
struct Tree;
struct Cyclic;
struct Dendroidal;
struct Dioperadic;
struct Properadic;

impl CategoryCheck for Plain {
    fn name(&self) -> &'static str {
        "u"
    }
    fn describe(&self) -> &'static str {
        "connected graphs and graphical maps (no nodeless loops)"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        check_new_map(&input.map, Mode::Plain)
    }
}

impl CategoryCheck for Extended {
    fn name(&self) -> &'static str {
        "utilde"
    }
    fn describe(&self) -> &'static str {
        "connected graphs and graphical maps, nodeless loops included"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        check_new_map(&input.map, Mode::Extended)
    }
}

impl CategoryCheck for PlainOriented {
    fn name(&self) -> &'static str {
        "u-oriented"
    }
    fn describe(&self) -> &'static str {
        "directed graphs over the plain graphical category"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        check_new_map(&input.map, Mode::Plain)?;
        let (s, t) = input.orientations()?;
        check_oriented_map(&input.map, s, t)
    }
}

impl CategoryCheck for ExtendedOriented {
    fn name(&self) -> &'static str {
        "utilde-oriented"
    }
    fn describe(&self) -> &'static str {
        "directed graphs with the directed nodeless loop included"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        check_new_map(&input.map, Mode::Extended)?;
        let (s, t) = input.orientations()?;
        check_oriented_map(&input.map, s, t)
    }
}

impl CategoryCheck for Tree {
    fn name(&self) -> &'static str {
        "tree"
    }
    fn describe(&self) -> &'static str {
        "simply connected graphs (the full subcategory of trees)"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        check_new_map(&input.map, Mode::Plain)?;
        if !input.map.source.is_tree() || !input.map.target.is_tree() {
            return violation("objects", "both graphs must be trees".to_string());
        }
        Ok(())
    }
}

impl CategoryCheck for Cyclic {
    fn name(&self) -> &'static str {
        "cyclic"
    }
    fn describe(&self) -> &'static str {
        "trees with nonempty boundary"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        Tree.check(input)?;
        if input.map.source.boundary().is_empty() || input.map.target.boundary().is_empty() {
            return violation("objects", "cyclic objects have nonempty boundary".to_string());
        }
        Ok(())
    }
}

impl CategoryCheck for Dendroidal {
    fn name(&self) -> &'static str {
        "dendroidal"
    }
    fn describe(&self) -> &'static str {
        "rooted trees: every vertex and every class has one output"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        PlainOriented.check(input)?;
        let (s, t) = input.orientations()?;
        let src = DirectedGraph::new(input.map.source.clone(), s.clone())?;
        let tgt = DirectedGraph::new(input.map.target.clone(), t.clone())?;
        if !is_dendroidal(&src) || !is_dendroidal(&tgt) {
            return violation("objects", "both graphs must be dendroidal".to_string());
        }
        Ok(())
    }
}

impl CategoryCheck for Dioperadic {
    fn name(&self) -> &'static str {
        "dioperadic"
    }
    fn describe(&self) -> &'static str {
        "simply connected directed graphs"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        PlainOriented.check(input)?;
        let (s, t) = input.orientations()?;
        is_dioperadic(&input.map, s, t).map(|_| ())
    }
}

impl CategoryCheck for Properadic {
    fn name(&self) -> &'static str {
        "properadic"
    }
    fn describe(&self) -> &'static str {
        "acyclic directed graphs; the top class must land on a structured subgraph"
    }
    fn check(&self, input: &CheckInput) -> Result<(), Violation> {
        PlainOriented.check(input)?;
        let (s, t) = input.orientations()?;
        if is_properadic(&input.map, s, t)? {
            Ok(())
        } else {
            violation("structured", "image of the top class is not structured".to_string())
        }
    }
}

static REGISTRY: [&dyn CategoryCheck; 9] = [
    &Plain,
    &Extended,
    &PlainOriented,
    &ExtendedOriented,
    &Tree,
    &Cyclic,
    &Dendroidal,
    &Dioperadic,
    &Properadic,
];

/// All registered category checks.
pub fn registry() -> &'static [&'static dyn CategoryCheck] {
    &REGISTRY
}

/// Look up a check by its registry name.
pub fn lookup(name: &str) -> Option<&'static dyn CategoryCheck> {
    REGISTRY.iter().copied().find(|c| c.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::orientations_of;
    use crate::graph::{Graph, StandardGraph};

    #[test]
    fn registry_names_are_unique_and_complete() {
        let names: Vec<&str> = registry().iter().map(|c| c.name()).collect();
        let expected = [
            "u",
            "utilde",
            "u-oriented",
            "utilde-oriented",
            "tree",
            "cyclic",
            "dendroidal",
            "dioperadic",
            "properadic",
        ];
        assert_eq!(names, expected);
        for name in expected {
            assert!(lookup(name).is_some());
        }
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn identity_passes_the_matching_categories() {
        let t = Graph::standard(StandardGraph::Line(2));
        let m = NewGraphMap::identity(&t);
        let x = orientations_of(&t).remove(0);
        let input = CheckInput {
            map: m,
            src_orientation: Some(x.clone()),
            tgt_orientation: Some(x),
        };
        for name in ["u", "utilde", "u-oriented", "tree", "cyclic", "dioperadic", "properadic"] {
            lookup(name)
                .unwrap()
                .check(&input)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn nodeless_identity_is_extended_only() {
        let k = Graph::standard(StandardGraph::NodelessLoop);
        let input = CheckInput::plain(NewGraphMap::identity(&k));
        assert!(lookup("u").unwrap().check(&input).is_err());
        assert!(lookup("utilde").unwrap().check(&input).is_ok());
    }

    #[test]
    fn oriented_categories_demand_orientations() {
        let t = Graph::standard(StandardGraph::Line(2));
        let input = CheckInput::plain(NewGraphMap::identity(&t));
        let err = lookup("u-oriented").unwrap().check(&input).unwrap_err();
        assert_eq!(err.clause, "orientation");
    }
}
