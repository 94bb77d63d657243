//! Line-based text formats with versioned headers: graphs (with optional
//! orientation), maps in either presentation, embedding classes, presheaves,
//! and catalog manifests. Identifiers are whitespace-free tokens; `#` starts
//! a comment. Parse errors carry the line number.

use crate::directed::Orientation;
use crate::embedding::EmbClass;
use crate::graph::{ArcId, Graph, GraphData, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError {
        line,
        message: message.into(),
    })
}

fn logical_lines(text: &str) -> Vec<(usize, Vec<String>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().map(|t| t.to_string()).collect()))
        .collect()
}

/// A parsed graph document: raw data plus the optional sign table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDocument {
    pub data: GraphData,
    pub orientation: Option<BTreeMap<ArcId, i8>>,
}

impl GraphDocument {
    pub fn orientation(&self) -> Option<Orientation> {
        self.orientation.as_ref().map(|sign| Orientation {
            sign: sign.clone(),
        })
    }
}

pub fn parse_graph(text: &str) -> Result<GraphDocument, FormatError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, toks)) if toks == ["graph", "v1"] => {}
        Some((n, _)) => return err(n, "expected header `graph v1`"),
        None => return err(0, "empty document"),
    }
    let mut data = GraphData::default();
    let mut seen_in_pairs: BTreeSet<ArcId> = BTreeSet::new();
    let mut orientation: Option<BTreeMap<ArcId, i8>> = None;
    let mut saw_boundary = false;
    for (n, toks) in it {
        match toks[0].as_str() {
            "arcs" => {
                for t in &toks[1..] {
                    if !data.arcs.insert(ArcId(t.clone())) {
                        return err(n, format!("duplicate arc {t}"));
                    }
                }
            }
            "pair" => {
                if toks.len() != 3 {
                    return err(n, "expected `pair <arc> <arc>`");
                }
                let a = ArcId(toks[1].clone());
                let b = ArcId(toks[2].clone());
                for x in [&a, &b] {
                    if !data.arcs.contains(x) {
                        return err(n, format!("unknown arc {x}"));
                    }
                    if !seen_in_pairs.insert(x.clone()) {
                        return err(n, format!("arc {x} listed twice in the involution table"));
                    }
                }
                data.involution.insert(a.clone(), b.clone());
                data.involution.insert(b, a);
            }
            "vertex" => {
                if toks.len() < 2 {
                    return err(n, "expected `vertex <id> [darts…]`");
                }
                let v = VertexId(toks[1].clone());
                if !data.vertices.insert(v.clone()) {
                    return err(n, format!("duplicate vertex {v}"));
                }
                for t in &toks[2..] {
                    let d = ArcId(t.clone());
                    if !data.arcs.contains(&d) {
                        return err(n, format!("unknown dart {d}"));
                    }
                    if data.attach.insert(d.clone(), v.clone()).is_some() {
                        return err(n, format!("dart {d} attached twice"));
                    }
                }
            }
            "boundary" => {
                if saw_boundary {
                    return err(n, "boundary listed twice");
                }
                saw_boundary = true;
                let mut b = BTreeSet::new();
                for t in &toks[1..] {
                    let a = ArcId(t.clone());
                    if !data.arcs.contains(&a) {
                        return err(n, format!("unknown boundary arc {a}"));
                    }
                    b.insert(a);
                }
                data.boundary = Some(b);
            }
            "orient" => {
                if toks.len() != 3 {
                    return err(n, "expected `orient <arc> <+|->`");
                }
                let a = ArcId(toks[1].clone());
                if !data.arcs.contains(&a) {
                    return err(n, format!("unknown arc {a}"));
                }
                let s = match toks[2].as_str() {
                    "+" | "+1" => 1,
                    "-" | "-1" => -1,
                    other => return err(n, format!("bad sign {other}")),
                };
                let table = orientation.get_or_insert_with(BTreeMap::new);
                if table.insert(a.clone(), s).is_some() {
                    return err(n, format!("arc {a} oriented twice"));
                }
            }
            other => return err(n, format!("unknown keyword {other}")),
        }
    }
    if seen_in_pairs.len() != data.arcs.len() {
        return err(
            0,
            "the involution table must list every arc exactly once".to_string(),
        );
    }
    Ok(GraphDocument { data, orientation })
}

pub fn emit_graph(g: &Graph, orientation: Option<&Orientation>) -> String {
    let mut out = String::from("graph v1\n");
    let arcs: Vec<String> = g.arcs().iter().map(|a| a.0.clone()).collect();
    if !arcs.is_empty() {
        out.push_str(&format!("arcs {}\n", arcs.join(" ")));
    } else {
        out.push_str("arcs\n");
    }
    for e in g.edges() {
        out.push_str(&format!("pair {} {}\n", e.lo, e.hi));
    }
    for v in g.vertices() {
        let legs: Vec<String> = g.nbhd(v).iter().map(|d| d.0.clone()).collect();
        if legs.is_empty() {
            out.push_str(&format!("vertex {v}\n"));
        } else {
            out.push_str(&format!("vertex {v} {}\n", legs.join(" ")));
        }
    }
    let bnd: Vec<String> = g.boundary().iter().map(|a| a.0.clone()).collect();
    out.push_str(&format!("boundary {}\n", bnd.join(" ")));
    if let Some(x) = orientation {
        for a in g.arcs() {
            out.push_str(&format!(
                "orient {a} {}\n",
                if x.is_plus(a) { "+" } else { "-" }
            ));
        }
    }
    out
}

/// A parsed map document; graph references are left unresolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDocument {
    pub source_ref: String,
    pub target_ref: String,
    pub arc_map: BTreeMap<ArcId, ArcId>,
    pub vertex_map: Option<BTreeMap<VertexId, EmbClass>>,
    pub emb_map: Option<BTreeMap<EmbClass, EmbClass>>,
}

fn parse_class(tokens: &str) -> EmbClass {
    // "<vertices…> | <boundary…>"
    let mut parts = tokens.splitn(2, '|');
    let verts = parts.next().unwrap_or("");
    let bnd = parts.next().unwrap_or("");
    EmbClass {
        vertices: verts
            .split_whitespace()
            .map(|t| VertexId(t.to_string()))
            .collect(),
        boundary: bnd
            .split_whitespace()
            .map(|t| ArcId(t.to_string()))
            .collect(),
    }
}

fn class_text(c: &EmbClass) -> String {
    let vs: Vec<String> = c.vertices.iter().map(|v| v.0.clone()).collect();
    let bs: Vec<String> = c.boundary.iter().map(|a| a.0.clone()).collect();
    format!("{} | {}", vs.join(" "), bs.join(" "))
}

pub fn parse_map(text: &str) -> Result<MapDocument, FormatError> {
    let raw: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut it = raw.into_iter();
    match it.next() {
        Some((_, l)) if l == "map v1" => {}
        Some((n, _)) => return err(n, "expected header `map v1`"),
        None => return err(0, "empty document"),
    }
    let mut source_ref = None;
    let mut target_ref = None;
    let mut arc_map = BTreeMap::new();
    let mut vertex_map: Option<BTreeMap<VertexId, EmbClass>> = None;
    let mut emb_map: Option<BTreeMap<EmbClass, EmbClass>> = None;
    for (n, line) in it {
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "source" => source_ref = Some(rest.to_string()),
            "target" => target_ref = Some(rest.to_string()),
            "arc" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 2 {
                    return err(n, "expected `arc <from> <to>`");
                }
                arc_map.insert(ArcId(toks[0].to_string()), ArcId(toks[1].to_string()));
            }
            "vmap" => {
                // vmap <vertex> | <vertices…> | <boundary…>
                let mut parts = rest.splitn(2, '|');
                let v = parts.next().unwrap_or("").trim();
                if v.split_whitespace().count() != 1 {
                    return err(n, "expected `vmap <vertex> | <vertices…> | <boundary…>`");
                }
                let cls = parse_class(parts.next().unwrap_or(""));
                vertex_map
                    .get_or_insert_with(BTreeMap::new)
                    .insert(VertexId(v.to_string()), cls);
            }
            "emb" => {
                // emb <vertices…> | <boundary…> => <vertices…> | <boundary…>
                let mut sides = rest.splitn(2, "=>");
                let from = parse_class(sides.next().unwrap_or(""));
                let to = match sides.next() {
                    Some(s) => parse_class(s),
                    None => return err(n, "expected `emb <class> => <class>`"),
                };
                emb_map.get_or_insert_with(BTreeMap::new).insert(from, to);
            }
            other => return err(n, format!("unknown keyword {other}")),
        }
    }
    let source_ref = match source_ref {
        Some(s) => s,
        None => return err(0, "missing `source`"),
    };
    let target_ref = match target_ref {
        Some(s) => s,
        None => return err(0, "missing `target`"),
    };
    Ok(MapDocument {
        source_ref,
        target_ref,
        arc_map,
        vertex_map,
        emb_map,
    })
}

/// Emits a map in both presentations.
pub fn emit_map(
    source_ref: &str,
    target_ref: &str,
    m: &crate::gmap::NewGraphMap,
) -> String {
    let mut out = String::from("map v1\n");
    out.push_str(&format!("source {source_ref}\n"));
    out.push_str(&format!("target {target_ref}\n"));
    for (a, b) in &m.arc_map {
        out.push_str(&format!("arc {a} {b}\n"));
    }
    let classical = crate::gmap::to_classical(m);
    for (v, cls) in &classical.vertex_map {
        out.push_str(&format!("vmap {v} | {}\n", class_text(cls)));
    }
    for (c, d) in &m.emb_map {
        out.push_str(&format!("emb {} => {}\n", class_text(c), class_text(d)));
    }
    out
}

pub fn parse_embclass(text: &str) -> Result<EmbClass, FormatError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, toks)) if toks == ["embclass", "v1"] => {}
        Some((n, _)) => return err(n, "expected header `embclass v1`"),
        None => return err(0, "empty document"),
    }
    let mut vertices = BTreeSet::new();
    let mut boundary = BTreeSet::new();
    for (n, toks) in it {
        match toks[0].as_str() {
            "vertices" => {
                vertices.extend(toks[1..].iter().map(|t| VertexId(t.clone())));
            }
            "boundary" => {
                boundary.extend(toks[1..].iter().map(|t| ArcId(t.clone())));
            }
            other => return err(n, format!("unknown keyword {other}")),
        }
    }
    Ok(EmbClass { vertices, boundary })
}

pub fn emit_embclass(c: &EmbClass) -> String {
    let vs: Vec<String> = c.vertices.iter().map(|v| v.0.clone()).collect();
    let bs: Vec<String> = c.boundary.iter().map(|a| a.0.clone()).collect();
    format!(
        "embclass v1\nvertices {}\nboundary {}\n",
        vs.join(" "),
        bs.join(" ")
    )
}

/// A parsed presheaf document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PresheafDocument {
    pub elements: BTreeMap<String, Vec<String>>,
    pub restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

pub fn parse_presheaf(text: &str) -> Result<PresheafDocument, FormatError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, toks)) if toks == ["presheaf", "v1"] => {}
        Some((n, _)) => return err(n, "expected header `presheaf v1`"),
        None => return err(0, "empty document"),
    }
    let mut doc = PresheafDocument::default();
    for (n, toks) in it {
        match toks[0].as_str() {
            "elements" => {
                if toks.len() < 2 {
                    return err(n, "expected `elements <object> [tokens…]`");
                }
                doc.elements
                    .insert(toks[1].clone(), toks[2..].to_vec());
            }
            "restrict" => {
                if toks.len() < 2 {
                    return err(n, "expected `restrict <morphism> [from=to…]`");
                }
                let mut table = BTreeMap::new();
                for t in &toks[2..] {
                    match t.split_once('=') {
                        Some((from, to)) => {
                            table.insert(from.to_string(), to.to_string());
                        }
                        None => return err(n, format!("expected from=to, got {t}")),
                    }
                }
                doc.restrictions.insert(toks[1].clone(), table);
            }
            other => return err(n, format!("unknown keyword {other}")),
        }
    }
    Ok(doc)
}

pub fn emit_presheaf(p: &crate::segal::Presheaf) -> String {
    let mut out = String::from("presheaf v1\n");
    for (o, toks) in &p.elements {
        out.push_str(&format!("elements {o} {}\n", toks.join(" ")));
    }
    for (m, table) in &p.restrictions {
        let entries: Vec<String> = table.iter().map(|(f, t)| format!("{f}={t}")).collect();
        out.push_str(&format!("restrict {m} {}\n", entries.join(" ")));
    }
    out
}

/// A catalog manifest: object and morphism file references.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CatalogManifest {
    pub mode: String,
    pub objects: Vec<(String, String)>,
    pub morphisms: Vec<(String, String)>,
}

pub fn parse_catalog_manifest(text: &str) -> Result<CatalogManifest, FormatError> {
    let lines = logical_lines(text);
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, toks)) if toks == ["catalog", "v1"] => {}
        Some((n, _)) => return err(n, "expected header `catalog v1`"),
        None => return err(0, "empty document"),
    }
    let mut manifest = CatalogManifest::default();
    for (n, toks) in it {
        match toks[0].as_str() {
            "mode" => {
                if toks.len() != 2 {
                    return err(n, "expected `mode plain|extended`");
                }
                manifest.mode = toks[1].clone();
            }
            "object" => {
                if toks.len() != 3 {
                    return err(n, "expected `object <id> <file>`");
                }
                manifest.objects.push((toks[1].clone(), toks[2].clone()));
            }
            "morphism" => {
                if toks.len() != 3 {
                    return err(n, "expected `morphism <id> <file>`");
                }
                manifest.morphisms.push((toks[1].clone(), toks[2].clone()));
            }
            other => return err(n, format!("unknown keyword {other}")),
        }
    }
    if manifest.mode.is_empty() {
        return err(0, "missing `mode`");
    }
    Ok(manifest)
}

impl fmt::Display for CatalogManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "catalog v1")?;
        writeln!(f, "mode {}", self.mode)?;
        for (id, file) in &self.objects {
            writeln!(f, "object {id} {file}")?;
        }
        for (id, file) in &self.morphisms {
            writeln!(f, "morphism {id} {file}")?;
        }
        Ok(())
    }
}
