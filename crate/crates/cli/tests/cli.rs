//! End-to-end tests of the binary: exit codes, report shapes, and the file
//! formats, driven through temporary directories.

use looseend::directed::not_structured_example;
use looseend::embedding::representative;
use looseend::format::{emit_embclass, emit_graph, emit_map};
use looseend::gmap::NewGraphMap;
use looseend::graph::{Graph, StandardGraph};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_looseend"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write(dir: &Path, name: &str, content: &str) {
    std::fs::write(dir.join(name), content).unwrap();
}

#[test]
fn emb_lists_six_classes_of_the_five_star() {
    let dir = tempfile::tempdir().unwrap();
    let star5 = Graph::standard(StandardGraph::Star(5));
    write(dir.path(), "star5.g", &emit_graph(&star5, None));
    let out = run_in(dir.path(), &["emb", "--graph", "star5.g"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("classes 6"), "{text}");
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let nodeless = Graph::standard(StandardGraph::NodelessLoop);
    write(dir.path(), "k.g", &emit_graph(&nodeless, None));
    let plain = run_in(dir.path(), &["validate", "--graph", "k.g"]);
    assert_eq!(plain.status.code(), Some(1), "nodeless loops fail plain mode");
    let extended = run_in(
        dir.path(),
        &["validate", "--graph", "k.g", "--mode", "extended"],
    );
    assert_eq!(extended.status.code(), Some(0));

    write(dir.path(), "broken.g", "graph v1\narcs a\npair a\n");
    let broken = run_in(dir.path(), &["validate", "--graph", "broken.g"]);
    assert_eq!(broken.status.code(), Some(2), "parse errors are usage errors");
}

#[test]
fn properadic_check_rejects_the_non_convex_inclusion() {
    let dir = tempfile::tempdir().unwrap();
    let (dg, cls) = not_structured_example();
    let rep = representative(&dg.graph, &cls);
    let m = NewGraphMap::of_embedding(&rep);
    let src_or = looseend::directed::restrict_orientation(&m, &dg.orientation);
    write(dir.path(), "sub.g", &emit_graph(&rep.source, Some(&src_or)));
    write(dir.path(), "big.g", &emit_graph(&dg.graph, Some(&dg.orientation)));
    write(dir.path(), "incl.map", &emit_map("sub.g", "big.g", &m));
    let out = run_in(
        dir.path(),
        &["check-map", "--category", "properadic", "--map", "incl.map"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not structured"), "{}", stdout(&out));

    let second = run_in(dir.path(), &["properadic-check", "--map", "incl.map"]);
    assert_eq!(second.status.code(), Some(1));

    // The same map is a perfectly good inert map of the oriented category.
    let ok = run_in(
        dir.path(),
        &["check-map", "--category", "u-oriented", "--map", "incl.map"],
    );
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("inert true"));
}

#[test]
fn enumerate_compose_factor_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let w = Graph::standard(StandardGraph::LoopWithOneVertex);
    let s2 = Graph::standard(StandardGraph::Star(2));
    write(dir.path(), "star2.g", &emit_graph(&s2, None));
    write(dir.path(), "loop.g", &emit_graph(&w, None));
    let out = run_in(
        dir.path(),
        &[
            "enumerate-maps",
            "--source",
            "star2.g",
            "--target",
            "loop.g",
            "--category",
            "u",
            "--out-dir",
            "maps",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    let count: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("maps "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(count >= 2, "{text}");

    let check = run_in(
        dir.path(),
        &["check-map", "--map", "maps/map0.map", "--category", "u"],
    );
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));

    let factored = run_in(
        dir.path(),
        &["factor", "--map", "maps/map0.map", "--out-dir", "fct"],
    );
    assert_eq!(factored.status.code(), Some(0), "{}", stdout(&factored));
    for name in ["active.map", "inert.map", "middle.g"] {
        assert!(dir.path().join("fct").join(name).exists());
    }

    let composed = run_in(
        dir.path(),
        &[
            "compose",
            "--first",
            "fct/active.map",
            "--second",
            "fct/inert.map",
            "-o",
            "recomposed.map",
        ],
    );
    assert_eq!(composed.status.code(), Some(0), "{}", stdout(&composed));
    let recheck = run_in(
        dir.path(),
        &["check-map", "--map", "recomposed.map", "--category", "u"],
    );
    assert_eq!(recheck.status.code(), Some(0), "{}", stdout(&recheck));
}

#[test]
fn substitute_wheel_vertex_with_edge() {
    let dir = tempfile::tempdir().unwrap();
    let w = Graph::standard(StandardGraph::LoopWithOneVertex);
    let e = Graph::standard(StandardGraph::Edge);
    write(dir.path(), "wheel.g", &emit_graph(&w, None));
    write(dir.path(), "edge.g", &emit_graph(&e, None));
    let extended = run_in(
        dir.path(),
        &[
            "substitute",
            "--graph",
            "wheel.g",
            "--assign",
            "v=edge.g:1†=♯,1=♭",
            "--mode",
            "extended",
            "-o",
            "out.g",
        ],
    );
    assert_eq!(extended.status.code(), Some(0), "{}", stdout(&extended));
    assert!(stdout(&extended).contains("nodeless-loop true"));

    let plain = run_in(
        dir.path(),
        &[
            "substitute",
            "--graph",
            "wheel.g",
            "--assign",
            "v=edge.g:1†=♯,1=♭",
        ],
    );
    assert_eq!(plain.status.code(), Some(1));
    assert!(stdout(&plain).contains("collapse"));
}

#[test]
fn complement_collapses_a_class() {
    let dir = tempfile::tempdir().unwrap();
    let line3 = Graph::standard(StandardGraph::Line(3));
    write(dir.path(), "line3.g", &emit_graph(&line3, None));
    let cls = looseend::embedding::EmbClass {
        vertices: ["v1", "v2"].iter().map(|s| (*s).into()).collect(),
        boundary: ["e0", "e2†"].iter().map(|s| (*s).into()).collect(),
    };
    write(dir.path(), "sub.emb", &emit_embclass(&cls));
    let out = run_in(
        dir.path(),
        &[
            "complement",
            "--graph",
            "line3.g",
            "--class",
            "sub.emb",
            "--graph-out",
            "k.g",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("vertices 2"));
    assert!(stdout(&out).contains("active true"));
    assert!(dir.path().join("k.g").exists());
}

#[test]
fn oracle_new_old_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "oracle",
            "--equivalence",
            "new-old",
            "--max-vertices",
            "1",
            "--max-arcs",
            "4",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("result ok"));
}

#[test]
fn oracle_emb_over_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["oracle", "--equivalence", "emb"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn segal_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = Graph::standard(StandardGraph::Star(1));
    write(dir.path(), "star1.g", &emit_graph(&s1, None));
    let plain = run_in(
        dir.path(),
        &[
            "segal",
            "build-catalog",
            "--graph",
            "star1.g",
            "--mode",
            "plain",
            "-o",
            "plaincat",
        ],
    );
    assert_eq!(plain.status.code(), Some(0), "{}", stdout(&plain));
    let oriented = run_in(
        dir.path(),
        &[
            "segal",
            "build-catalog",
            "--graph",
            "star1.g",
            "--mode",
            "plain",
            "--oriented",
            "-o",
            "orcat",
        ],
    );
    assert_eq!(oriented.status.code(), Some(0), "{}", stdout(&oriented));

    for presheaf in ["terminal", "orientations"] {
        let check = run_in(
            dir.path(),
            &[
                "segal",
                "check",
                "--catalog",
                "plaincat",
                "--presheaf",
                presheaf,
            ],
        );
        assert_eq!(check.status.code(), Some(0), "{presheaf}: {}", stdout(&check));
    }

    let restricted = run_in(
        dir.path(),
        &[
            "segal",
            "restrict",
            "--from-catalog",
            "orcat",
            "--to-catalog",
            "plaincat",
            "--presheaf",
            "orientations",
            "-o",
            "restricted.psh",
        ],
    );
    assert_eq!(restricted.status.code(), Some(0), "{}", stdout(&restricted));
    let back = run_in(
        dir.path(),
        &[
            "segal",
            "check",
            "--catalog",
            "orcat",
            "--presheaf",
            "restricted.psh",
        ],
    );
    assert_eq!(back.status.code(), Some(0), "{}", stdout(&back));

    let lke = run_in(
        dir.path(),
        &[
            "segal",
            "lke",
            "--oriented-catalog",
            "orcat",
            "--plain-catalog",
            "plaincat",
            "--presheaf",
            "terminal",
            "-o",
            "extended.psh",
        ],
    );
    assert_eq!(lke.status.code(), Some(0), "{}", stdout(&lke));
    let lke_check = run_in(
        dir.path(),
        &[
            "segal",
            "check",
            "--catalog",
            "plaincat",
            "--presheaf",
            "extended.psh",
        ],
    );
    assert_eq!(lke_check.status.code(), Some(0), "{}", stdout(&lke_check));

    let gamma = run_in(dir.path(), &["segal", "gamma", "--catalog", "plaincat"]);
    assert_eq!(gamma.status.code(), Some(0), "{}", stdout(&gamma));
}

#[test]
fn catalog_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let s2 = Graph::standard(StandardGraph::Star(2));
    write(dir.path(), "star2.g", &emit_graph(&s2, None));
    let built = run_in(
        dir.path(),
        &[
            "segal",
            "build-catalog",
            "--graph",
            "star2.g",
            "--mode",
            "plain",
            "-o",
            "cat",
        ],
    );
    assert_eq!(built.status.code(), Some(0), "{}", stdout(&built));
    let counts: Vec<usize> = stdout(&built)
        .lines()
        .filter_map(|l| {
            l.strip_prefix("objects ")
                .or_else(|| l.strip_prefix("morphisms "))
                .map(|n| n.parse().unwrap())
        })
        .collect();
    // Loading the written catalog reproduces the same objects and
    // morphisms; the gamma report exercises the composition table, which
    // only exists if every listed composite was found again.
    let manifest = std::fs::read_to_string(dir.path().join("cat/manifest.cat")).unwrap();
    let objects = manifest.lines().filter(|l| l.starts_with("object ")).count();
    let morphisms = manifest.lines().filter(|l| l.starts_with("morphism ")).count();
    assert_eq!(counts, vec![objects, morphisms]);
    let reloaded = run_in(dir.path(), &["segal", "gamma", "--catalog", "cat"]);
    assert_eq!(reloaded.status.code(), Some(0), "{}", stdout(&reloaded));
}

#[test]
fn dot_renders_both_flavors() {
    let dir = tempfile::tempdir().unwrap();
    let line2 = Graph::standard(StandardGraph::Line(2));
    write(dir.path(), "line2.g", &emit_graph(&line2, None));
    let plain = run_in(dir.path(), &["dot", "--graph", "line2.g"]);
    assert_eq!(plain.status.code(), Some(0));
    assert!(stdout(&plain).starts_with("graph G {"));

    let oriented = looseend::directed::orientations_of(&line2).remove(0);
    write(dir.path(), "dline2.g", &emit_graph(&line2, Some(&oriented)));
    let directed = run_in(dir.path(), &["dot", "--graph", "dline2.g"]);
    assert!(stdout(&directed).starts_with("digraph G {"));
}

#[test]
fn tree_check_accepts_identity() {
    let dir = tempfile::tempdir().unwrap();
    let line2 = Graph::standard(StandardGraph::Line(2));
    write(dir.path(), "line2.g", &emit_graph(&line2, None));
    let id = NewGraphMap::identity(&line2);
    write(dir.path(), "id.map", &emit_map("line2.g", "line2.g", &id));
    let out = run_in(dir.path(), &["tree-check", "--map", "id.map"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("full-axioms true"));
}

#[test]
fn emb_cache_dir_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let s2 = Graph::standard(StandardGraph::Star(2));
    write(dir.path(), "star2.g", &emit_graph(&s2, None));
    let first = bin()
        .current_dir(dir.path())
        .env("LOOSEEND_CACHE_DIR", &cache)
        .args(["emb", "--graph", "star2.g"])
        .output()
        .unwrap();
    assert_eq!(first.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let second = bin()
        .current_dir(dir.path())
        .env("LOOSEEND_CACHE_DIR", &cache)
        .args(["emb", "--graph", "star2.g"])
        .output()
        .unwrap();
    assert_eq!(stdout(&first), stdout(&second));
}
