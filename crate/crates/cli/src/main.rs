//! Command-line front end: validation, embedding posets, category checks,
//! composition and factorization, substitution, complements, hom-set
//! enumeration, exhaustive oracles, the Segal toolkit, and DOT export.
//!
//! Exit status: 0 = ok/true, 1 = checked false (with diagnostics in the
//! report), 2 = usage or parse error.

use clap::{Args, Parser, Subcommand};
use looseend::category::{lookup, registry, CheckInput};
use looseend::corpus;
use looseend::directed::Orientation;
use looseend::embedding::{representative, Embeddings};
use looseend::format;
use looseend::gmap::{
    check_classical, check_new_map, classify, complement, compose, enumerate_maps, factor,
    from_classical, substitute, to_classical, ClassicalMap, EnumCaps, NewGraphMap, Piece,
};
use looseend::graph::{ArcId, Graph, Mode, VertexId};
use looseend::oracle;
use looseend::segal::{
    check_presheaf, forget_orientation, gamma_properties, inclusion, is_segal,
    lke_dendroidal_to_cyclic, lke_orientation, restrict_presheaf, CatObject, Catalog, MorId, ObjId,
    Presheaf,
};
use looseend::tree;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "looseend", version, about = "graphs with loose ends: embeddings, graphical maps, Segal presheaves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Plain,
    Extended,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Extended => Mode::Extended,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph file against the plain or extended axioms.
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
    },
    /// List the embedding classes of a connected graph.
    Emb {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "extended")]
        mode: ModeArg,
    },
    /// Check a map file against a named graph category.
    CheckMap {
        #[arg(long)]
        map: PathBuf,
        /// One of: u, utilde, u-oriented, utilde-oriented, tree, cyclic,
        /// dendroidal, dioperadic, properadic.
        #[arg(long, default_value = "utilde")]
        category: String,
    },
    /// Compose two map files (apply `first`, then `second`).
    Compose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Factor a map as an active map followed by an inert one.
    Factor {
        #[arg(long)]
        map: PathBuf,
        /// Directory for active.map, inert.map, and middle.g.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Substitute graphs into the vertices of a base graph.
    Substitute {
        #[arg(long)]
        graph: PathBuf,
        /// One per vertex: `v=piece.g:outward=leg,outward=leg`.
        #[arg(long = "assign")]
        assignments: Vec<String>,
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Graph complement of an embedding class: collapse it to one vertex.
    Complement {
        #[arg(long)]
        graph: PathBuf,
        /// Embedding class file (embclass v1).
        #[arg(long)]
        class: PathBuf,
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
    /// Enumerate the full hom-set between two graphs.
    EnumerateMaps {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "utilde")]
        category: String,
        #[arg(long, default_value_t = 8)]
        max_arcs: usize,
        #[arg(long, default_value_t = 3)]
        max_vertices: usize,
        /// Write the maps as files into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run an exhaustive oracle over the built-in corpus (or given graphs).
    Oracle(OracleArgs),
    /// Check the subtree-overlap characterization of a map between trees.
    TreeCheck {
        #[arg(long)]
        map: PathBuf,
    },
    /// Check membership in the properadic category and print the restricted
    /// class table.
    ProperadicCheck {
        #[arg(long)]
        map: PathBuf,
    },
    /// Finite presheaf toolkit.
    #[command(subcommand)]
    Segal(SegalCommand),
    /// Render a graph (with optional orientation) to DOT.
    Dot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// Which equivalence to verify: emb, new-old, factorization, tree.
    #[arg(long)]
    equivalence: String,
    #[arg(long, default_value_t = 3)]
    max_vertices: usize,
    #[arg(long, default_value_t = 8)]
    max_arcs: usize,
    /// Extra graph files to include beside the built-in corpus.
    #[arg(long = "graph")]
    graphs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum SegalCommand {
    /// Enumerate a catalog from graph files and write it to a directory.
    BuildCatalog {
        #[arg(long = "graph", required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "plain")]
        mode: ModeArg,
        /// Take every orientation of every graph as an object.
        #[arg(long)]
        oriented: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check the Segal condition for a presheaf over a catalog.
    Check {
        #[arg(long)]
        catalog: PathBuf,
        /// A presheaf file, or one of the builtins `terminal`,
        /// `orientations`.
        #[arg(long)]
        presheaf: String,
        /// Use only the stars as elementary objects.
        #[arg(long)]
        flat: bool,
    },
    /// Restrict a presheaf along a catalog functor (f*).
    Restrict {
        /// The functor's source catalog (the restriction's output side).
        #[arg(long)]
        from_catalog: PathBuf,
        /// The functor's target catalog (where the presheaf lives).
        #[arg(long)]
        to_catalog: PathBuf,
        #[arg(long)]
        presheaf: String,
        /// `inclusion` or `forget-orientation`.
        #[arg(long, default_value = "forget-orientation")]
        functor: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Left Kan extension (f!) along an orientation-forgetting functor.
    Lke {
        #[arg(long)]
        oriented_catalog: PathBuf,
        #[arg(long)]
        plain_catalog: PathBuf,
        #[arg(long)]
        presheaf: String,
        /// Use the root-summing extension from rooted trees to cyclic trees.
        #[arg(long)]
        dendroidal_to_cyclic: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Verify the γ-functor axioms over a catalog.
    Gamma {
        #[arg(long)]
        catalog: PathBuf,
    },
}

/// Semantic failure: report printed to stdout, exit status 1.
struct Checked(String);

/// Usage or parse failure: message printed to stderr, exit status 2.
struct Usage(String);

enum Failure {
    Checked(Checked),
    Usage(Usage),
}

impl From<Checked> for Failure {
    fn from(c: Checked) -> Failure {
        Failure::Checked(c)
    }
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Failure {
        Failure::Usage(u)
    }
}

type CmdResult = Result<(), Failure>;

fn checked<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Checked(Checked(msg.into())))
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(Usage(msg.into())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checked(Checked(report))) => {
            println!("result fail");
            for line in report.lines() {
                println!("{line}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", parent.display()))))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", path.display()))))
}

/// Parses and validates a graph file. Parse errors are usage failures;
/// validation failures are semantic.
fn load_graph(path: &Path, mode: Mode) -> Result<(Graph, Option<Orientation>), Failure> {
    let text = read_file(path)?;
    let doc = format::parse_graph(&text)
        .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", path.display()))))?;
    let orientation = doc.orientation();
    let graph = match Graph::validate(doc.data, mode) {
        Ok(g) => g,
        Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
    };
    if let Some(x) = &orientation {
        if let Err(v) = x.validate(&graph) {
            return checked(format!("clause {}\ndetail {}", v.clause, v.detail));
        }
    }
    Ok((graph, orientation))
}

struct LoadedMap {
    map: NewGraphMap,
    src_orientation: Option<Orientation>,
    tgt_orientation: Option<Orientation>,
    source_ref: String,
    target_ref: String,
}

/// Loads a map file, resolving graph references relative to its directory
/// and synthesizing the missing presentation.
fn load_map(path: &Path) -> Result<LoadedMap, Failure> {
    let text = read_file(path)?;
    let doc = format::parse_map(&text)
        .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", path.display()))))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let src_path = dir.join(&doc.source_ref);
    let tgt_path = dir.join(&doc.target_ref);
    let (source, src_orientation) = load_graph(&src_path, Mode::Extended)?;
    let (target, tgt_orientation) = load_graph(&tgt_path, Mode::Extended)?;

    let map = match (&doc.emb_map, &doc.vertex_map) {
        (Some(emb_map), vmap) => {
            let m = NewGraphMap {
                source: source.clone(),
                target: target.clone(),
                arc_map: doc.arc_map.clone(),
                emb_map: emb_map.clone(),
            };
            if let Some(vm) = vmap {
                let derived = to_classical(&m);
                if derived.vertex_map != *vm {
                    return checked(
                        "clause presentations\ndetail the vertex map disagrees with the class map"
                            .to_string(),
                    );
                }
            }
            m
        }
        (None, Some(vm)) => {
            let classical = ClassicalMap {
                source: source.clone(),
                target: target.clone(),
                arc_map: doc.arc_map.clone(),
                vertex_map: vm.clone(),
            };
            if let Err(v) = check_classical(&classical, Mode::Extended) {
                return checked(format!("clause {}\ndetail {}", v.clause, v.detail));
            }
            match from_classical(&classical) {
                Ok(m) => m,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            }
        }
        (None, None) => {
            return usage(format!(
                "{}: the map lists neither emb nor vmap entries",
                path.display()
            ))
        }
    };
    Ok(LoadedMap {
        map,
        src_orientation,
        tgt_orientation,
        source_ref: doc.source_ref,
        target_ref: doc.target_ref,
    })
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Validate { graph, mode } => {
            let (g, orientation) = load_graph(&graph, mode.into())?;
            println!("result ok");
            println!("arcs {}", g.arcs().len());
            println!("edges {}", g.edges().len());
            println!("vertices {}", g.vertices().len());
            println!("boundary {}", g.boundary().len());
            println!("connected {}", g.is_connected());
            println!("oriented {}", orientation.is_some());
            Ok(())
        }
        Command::Emb { graph, mode } => {
            let (g, _) = load_graph(&graph, mode.into())?;
            if let Some(hit) = cache_lookup(&g) {
                print!("{hit}");
                return Ok(());
            }
            let table = match Embeddings::of(&g) {
                Ok(t) => t,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let mut out = String::from("result ok\n");
            out.push_str(&format!("classes {}\n", table.len()));
            for c in table.classes() {
                let vs: Vec<String> = c.vertices.iter().map(|v| v.0.clone()).collect();
                let bs: Vec<String> = c.boundary.iter().map(|a| a.0.clone()).collect();
                out.push_str(&format!("class {} | {}\n", vs.join(" "), bs.join(" ")));
            }
            cache_store(&g, &out);
            print!("{out}");
            Ok(())
        }
        Command::CheckMap { map, category } => {
            let check = match lookup(&category) {
                Some(c) => c,
                None => {
                    let names: Vec<&str> = registry().iter().map(|c| c.name()).collect();
                    return usage(format!(
                        "unknown category {category}; expected one of {}",
                        names.join(", ")
                    ));
                }
            };
            let loaded = load_map(&map)?;
            let input = CheckInput {
                map: loaded.map,
                src_orientation: loaded.src_orientation,
                tgt_orientation: loaded.tgt_orientation,
            };
            match check.check(&input) {
                Ok(()) => {
                    println!("result ok");
                    println!("category {}", check.name());
                    let cls = classify(&input.map);
                    println!("active {}", cls.active);
                    println!("inert {}", cls.inert);
                    Ok(())
                }
                Err(v) => checked(format!(
                    "category {}\nclause {}\ndetail {}",
                    check.name(),
                    v.clause,
                    v.detail
                )),
            }
        }
        Command::Compose { first, second, out } => {
            let a = load_map(&first)?;
            let b = load_map(&second)?;
            let composed = match compose(&b.map, &a.map) {
                Ok(m) => m,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let src_name = Path::new(&a.source_ref)
                .file_name()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "source.g".to_string());
            let tgt_name = Path::new(&b.target_ref)
                .file_name()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "target.g".to_string());
            let text = format::emit_map(&src_name, &tgt_name, &composed);
            match out {
                Some(path) => {
                    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
                    write_file(
                        &dir.join(&src_name),
                        &format::emit_graph(&composed.source, a.src_orientation.as_ref()),
                    )?;
                    write_file(
                        &dir.join(&tgt_name),
                        &format::emit_graph(&composed.target, b.tgt_orientation.as_ref()),
                    )?;
                    write_file(&path, &text)?;
                }
                None => print!("{text}"),
            }
            println!("result ok");
            Ok(())
        }
        Command::Factor { map, out_dir } => {
            let loaded = load_map(&map)?;
            let (alpha, iota, middle) = match factor(&loaded.map) {
                Ok(t) => t,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
            // Self-contained output: the source and target graphs are
            // copied in beside the middle.
            write_file(&dir.join("middle.g"), &format::emit_graph(&middle, None))?;
            write_file(
                &dir.join("source.g"),
                &format::emit_graph(&loaded.map.source, loaded.src_orientation.as_ref()),
            )?;
            write_file(
                &dir.join("target.g"),
                &format::emit_graph(&loaded.map.target, loaded.tgt_orientation.as_ref()),
            )?;
            write_file(
                &dir.join("active.map"),
                &format::emit_map("source.g", "middle.g", &alpha),
            )?;
            write_file(
                &dir.join("inert.map"),
                &format::emit_map("middle.g", "target.g", &iota),
            )?;
            println!("result ok");
            println!("middle-vertices {}", middle.vertices().len());
            println!("middle-edges {}", middle.edges().len());
            Ok(())
        }
        Command::Substitute {
            graph,
            assignments,
            mode,
            out,
        } => {
            let (g, _) = load_graph(&graph, Mode::Extended)?;
            let dir = graph.parent().unwrap_or(Path::new(".")).to_path_buf();
            let mut pieces: BTreeMap<VertexId, Piece> = BTreeMap::new();
            for spec in &assignments {
                let (vertex, rest) = spec
                    .split_once('=')
                    .ok_or(Failure::Usage(Usage(format!("bad assignment `{spec}`"))))?;
                let (piece_path, legs_text) = match rest.split_once(':') {
                    Some((p, l)) => (p, l),
                    None => (rest, ""),
                };
                let (piece_graph, _) = load_graph(&dir.join(piece_path), Mode::Extended)?;
                let mut legs = BTreeMap::new();
                for entry in legs_text.split(',').filter(|s| !s.is_empty()) {
                    let (outward, leg) = entry
                        .split_once('=')
                        .ok_or(Failure::Usage(Usage(format!("bad leg entry `{entry}`"))))?;
                    legs.insert(ArcId(outward.to_string()), ArcId(leg.to_string()));
                }
                pieces.insert(
                    VertexId(vertex.to_string()),
                    Piece {
                        graph: piece_graph,
                        legs,
                    },
                );
            }
            let sub = match substitute(&g, &pieces, mode.into()) {
                Ok(s) => s,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let text = format::emit_graph(&sub.graph, None);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            println!("result ok");
            println!("vertices {}", sub.graph.vertices().len());
            println!("edges {}", sub.graph.edges().len());
            println!("nodeless-loop {}", sub.graph.is_nodeless_loop());
            Ok(())
        }
        Command::Complement {
            graph,
            class,
            graph_out,
            map_out,
        } => {
            let (g, _) = load_graph(&graph, Mode::Extended)?;
            let text = read_file(&class)?;
            let cls = format::parse_embclass(&text)
                .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", class.display()))))?;
            let table = match Embeddings::of(&g) {
                Ok(t) => t,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            if !table.contains(&cls) {
                return checked("clause membership\ndetail class is not in Emb(G)".to_string());
            }
            let rep = representative(&g, &cls);
            let (k, v_g, alpha) = match complement(&rep) {
                Ok(t) => t,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            if let Some(path) = graph_out {
                write_file(&path, &format::emit_graph(&k, None))?;
            }
            if let Some(path) = map_out {
                let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
                write_file(&dir.join("complement.g"), &format::emit_graph(&k, None))?;
                write_file(&dir.join("target.g"), &format::emit_graph(&g, None))?;
                write_file(&path, &format::emit_map("complement.g", "target.g", &alpha))?;
            }
            println!("result ok");
            println!("distinguished-vertex {v_g}");
            println!("vertices {}", k.vertices().len());
            println!("active {}", classify(&alpha).active);
            Ok(())
        }
        Command::EnumerateMaps {
            source,
            target,
            category,
            max_arcs,
            max_vertices,
            out_dir,
        } => {
            let check = match lookup(&category) {
                Some(c) => c,
                None => return usage(format!("unknown category {category}")),
            };
            let (g, gx) = load_graph(&source, Mode::Extended)?;
            let (h, hx) = load_graph(&target, Mode::Extended)?;
            let mode = if category == "u" || category == "u-oriented" {
                Mode::Plain
            } else {
                Mode::Extended
            };
            let caps = EnumCaps {
                max_arcs,
                max_vertices,
            };
            let all = match enumerate_maps(&g, &h, mode, caps) {
                Ok(maps) => maps,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let mut kept = Vec::new();
            for m in all {
                let input = CheckInput {
                    map: m,
                    src_orientation: gx.clone(),
                    tgt_orientation: hx.clone(),
                };
                if check.check(&input).is_ok() {
                    kept.push(input.map);
                }
            }
            println!("result ok");
            println!("category {}", check.name());
            println!("maps {}", kept.len());
            if let Some(dir) = out_dir {
                // Make the directory self-contained: copy the graphs in.
                let src_name = source.file_name().unwrap_or_default().to_string_lossy().to_string();
                let tgt_name = target.file_name().unwrap_or_default().to_string_lossy().to_string();
                write_file(&dir.join(&src_name), &format::emit_graph(&g, gx.as_ref()))?;
                write_file(&dir.join(&tgt_name), &format::emit_graph(&h, hx.as_ref()))?;
                for (i, m) in kept.iter().enumerate() {
                    let text = format::emit_map(&src_name, &tgt_name, m);
                    write_file(&dir.join(format!("map{i}.map")), &text)?;
                }
            }
            Ok(())
        }
        Command::Oracle(args) => run_oracle(args),
        Command::TreeCheck { map } => {
            let loaded = load_map(&map)?;
            if let Err(v) = tree::check_boundary_axiom(&loaded.map) {
                return checked(format!("clause {}\ndetail {}", v.clause, v.detail));
            }
            match tree::check_overlap_conditions(&loaded.map) {
                Ok(()) => {
                    let full = check_new_map(&loaded.map, Mode::Plain).is_ok();
                    println!("result ok");
                    println!("full-axioms {full}");
                    Ok(())
                }
                Err(v) => checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            }
        }
        Command::ProperadicCheck { map } => {
            let loaded = load_map(&map)?;
            let (sx, tx) = match (&loaded.src_orientation, &loaded.tgt_orientation) {
                (Some(s), Some(t)) => (s.clone(), t.clone()),
                _ => return usage("both graphs need orientations for the properadic check"),
            };
            match looseend::directed::is_properadic(&loaded.map, &sx, &tx) {
                Ok(true) => {
                    let table =
                        match looseend::directed::properadic_restriction(&loaded.map, &sx, &tx) {
                            Ok(t) => t,
                            Err(v) => {
                                return checked(format!("clause {}\ndetail {}", v.clause, v.detail))
                            }
                        };
                    println!("result ok");
                    println!("structured-classes {}", table.len());
                    for (c, d) in &table {
                        println!("restrict {c} => {d}");
                    }
                    Ok(())
                }
                Ok(false) => {
                    checked("clause structured\ndetail image not structured".to_string())
                }
                Err(v) => checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            }
        }
        Command::Segal(sub) => run_segal(sub),
        Command::Dot { graph, out } => {
            let (g, orientation) = load_graph(&graph, Mode::Extended)?;
            let text = looseend::dot::render(&g, orientation.as_ref());
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn run_oracle(args: OracleArgs) -> CmdResult {
    let mut graphs: Vec<(String, Graph)> = corpus::corpus()
        .into_iter()
        .map(|(n, g)| (n.to_string(), g))
        .collect();
    for path in &args.graphs {
        let (g, _) = load_graph(path, Mode::Extended)?;
        graphs.push((path.display().to_string(), g));
    }
    graphs.retain(|(_, g)| {
        g.vertices().len() <= args.max_vertices && g.arcs().len() <= args.max_arcs
    });
    let mut failures = Vec::new();
    match args.equivalence.as_str() {
        "emb" => {
            for (name, g) in &graphs {
                match oracle::check_embedding_enumeration(g) {
                    Ok(n) => println!("emb {name} classes {n} ok"),
                    Err(e) => {
                        println!("emb {name} FAIL {e}");
                        failures.push(name.clone());
                    }
                }
            }
        }
        "new-old" => {
            for (n1, g1) in &graphs {
                for (n2, g2) in &graphs {
                    for mode in [Mode::Plain, Mode::Extended] {
                        if mode == Mode::Plain
                            && (g1.is_nodeless_loop() || g2.is_nodeless_loop())
                        {
                            continue;
                        }
                        match oracle::check_homset_equivalence(g1, g2, mode) {
                            Ok(n) => println!("new-old {n1}->{n2} {mode} maps {n} ok"),
                            Err(e) => {
                                println!("new-old {n1}->{n2} {mode} FAIL {e}");
                                failures.push(format!("{n1}->{n2}"));
                            }
                        }
                    }
                }
            }
        }
        "factorization" => {
            let caps = EnumCaps {
                max_arcs: args.max_arcs,
                max_vertices: args.max_vertices,
            };
            for (n1, g1) in &graphs {
                for (n2, g2) in &graphs {
                    let maps = match enumerate_maps(g1, g2, Mode::Extended, caps) {
                        Ok(m) => m,
                        Err(_) => continue,
                    };
                    for m in maps {
                        let outcome = factor(&m).ok().and_then(|(alpha, iota, _)| {
                            compose(&iota, &alpha).ok().map(|r| r == m)
                        });
                        if outcome != Some(true) {
                            println!("factorization {n1}->{n2} FAIL");
                            failures.push(format!("{n1}->{n2}"));
                        }
                    }
                    println!("factorization {n1}->{n2} ok");
                }
            }
        }
        "tree" => {
            let trees: Vec<&(String, Graph)> =
                graphs.iter().filter(|(_, g)| g.is_tree()).collect();
            for (n1, t1) in &trees {
                for (n2, t2) in &trees {
                    let candidates = match tree::boundary_consistent_candidates(t1, t2, 100_000, 17)
                    {
                        Ok(c) => c,
                        Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
                    };
                    for cand in candidates {
                        let via_overlap = tree::check_overlap_conditions(&cand).is_ok();
                        let via_axioms = check_new_map(&cand, Mode::Plain).is_ok();
                        if via_overlap != via_axioms {
                            println!("tree {n1}->{n2} FAIL");
                            failures.push(format!("{n1}->{n2}"));
                        }
                    }
                    println!("tree {n1}->{n2} ok");
                }
            }
        }
        other => return usage(format!("unknown equivalence {other}")),
    }
    if failures.is_empty() {
        println!("result ok");
        Ok(())
    } else {
        checked(format!("failures {}", failures.join(" ")))
    }
}

fn load_catalog(dir: &Path) -> Result<Catalog, Failure> {
    let manifest_path = if dir.is_dir() {
        dir.join("manifest.cat")
    } else {
        dir.to_path_buf()
    };
    let base = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let text = read_file(&manifest_path)?;
    let manifest = format::parse_catalog_manifest(&text)
        .map_err(|e| Failure::Usage(Usage(format!("{}: {e}", manifest_path.display()))))?;
    let mode = match manifest.mode.as_str() {
        "plain" => Mode::Plain,
        "extended" => Mode::Extended,
        other => return usage(format!("unknown catalog mode {other}")),
    };
    let mut objects = Vec::new();
    let mut by_name: BTreeMap<String, (Graph, Option<Orientation>)> = BTreeMap::new();
    for (id, file) in &manifest.objects {
        let (g, x) = load_graph(&base.join(file), Mode::Extended)?;
        by_name.insert(id.clone(), (g.clone(), x.clone()));
        objects.push(CatObject {
            id: ObjId(id.clone()),
            graph: g,
            orientation: x,
        });
    }
    let mut morphisms = Vec::new();
    for (id, file) in &manifest.morphisms {
        let loaded = load_map(&base.join(file))?;
        let src = objects
            .iter()
            .find(|o| o.graph == loaded.map.source && o.orientation == loaded.src_orientation)
            .map(|o| o.id.clone());
        let tgt = objects
            .iter()
            .find(|o| o.graph == loaded.map.target && o.orientation == loaded.tgt_orientation)
            .map(|o| o.id.clone());
        match (src, tgt) {
            (Some(s), Some(t)) => morphisms.push((MorId(id.clone()), s, t, loaded.map)),
            _ => return usage(format!("morphism {id} references graphs outside the catalog")),
        }
    }
    Catalog::from_parts(mode, objects, morphisms)
        .map_err(|v| Failure::Checked(Checked(format!("clause {}\ndetail {}", v.clause, v.detail))))
}

fn load_presheaf(cat: &Catalog, spec: &str) -> Result<Presheaf, Failure> {
    match spec {
        "terminal" => Ok(Presheaf::terminal(cat)),
        "orientations" => Ok(Presheaf::orientations(cat)),
        file => {
            let text = read_file(Path::new(file))?;
            let doc = format::parse_presheaf(&text)
                .map_err(|e| Failure::Usage(Usage(format!("{file}: {e}"))))?;
            let presheaf = Presheaf {
                elements: doc
                    .elements
                    .into_iter()
                    .map(|(o, toks)| (ObjId(o), toks))
                    .collect(),
                restrictions: doc
                    .restrictions
                    .into_iter()
                    .map(|(m, table)| (MorId(m), table))
                    .collect(),
            };
            if let Err(v) = check_presheaf(cat, &presheaf) {
                return checked(format!("clause {}\ndetail {}", v.clause, v.detail));
            }
            Ok(presheaf)
        }
    }
}

fn run_segal(cmd: SegalCommand) -> CmdResult {
    match cmd {
        SegalCommand::BuildCatalog {
            graphs,
            mode,
            oriented,
            out,
        } => {
            let mut named = Vec::new();
            for path in &graphs {
                let (g, _) = load_graph(path, Mode::Extended)?;
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "graph".to_string());
                named.push((stem, g));
            }
            let cat = if oriented {
                Catalog::build_oriented(mode.into(), named)
            } else {
                Catalog::build_plain(mode.into(), named)
            };
            let cat = match cat {
                Ok(c) => c,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let mut manifest = format::CatalogManifest {
                mode: match cat.mode {
                    Mode::Plain => "plain".to_string(),
                    Mode::Extended => "extended".to_string(),
                },
                objects: Vec::new(),
                morphisms: Vec::new(),
            };
            for o in &cat.objects {
                let file = format!("{}.g", o.id);
                write_file(
                    &out.join(&file),
                    &format::emit_graph(&o.graph, o.orientation.as_ref()),
                )?;
                manifest.objects.push((o.id.0.clone(), file));
            }
            for m in &cat.morphisms {
                let file = format!("{}.map", m.id);
                let text = format::emit_map(&format!("{}.g", m.src), &format!("{}.g", m.tgt), &m.map);
                write_file(&out.join(&file), &text)?;
                manifest.morphisms.push((m.id.0.clone(), file));
            }
            write_file(&out.join("manifest.cat"), &manifest.to_string())?;
            println!("result ok");
            println!("objects {}", cat.objects.len());
            println!("morphisms {}", cat.morphisms.len());
            Ok(())
        }
        SegalCommand::Check {
            catalog,
            presheaf,
            flat,
        } => {
            let cat = load_catalog(&catalog)?;
            let x = load_presheaf(&cat, &presheaf)?;
            let (ok, witnesses) = match is_segal(&cat, &x, flat) {
                Ok(r) => r,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let mut report = String::new();
            for w in &witnesses {
                report.push_str(&format!(
                    "object {} values {} limit {} {}\n",
                    w.object,
                    w.value_count,
                    w.limit_count,
                    if w.ok { "ok" } else { "FAIL" }
                ));
            }
            if ok {
                println!("result ok");
                print!("{report}");
                Ok(())
            } else {
                checked(format!("segal false\n{report}"))
            }
        }
        SegalCommand::Restrict {
            from_catalog,
            to_catalog,
            presheaf,
            functor,
            out,
        } => {
            let small = load_catalog(&from_catalog)?;
            let big = load_catalog(&to_catalog)?;
            let f = match functor.as_str() {
                "inclusion" => inclusion(&small, &big),
                "forget-orientation" => forget_orientation(&small, &big),
                other => return usage(format!("unknown functor {other}")),
            };
            let f = match f {
                Ok(f) => f,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let m = load_presheaf(&big, &presheaf)?;
            let restricted = restrict_presheaf(&f, &small, &m);
            let text = format::emit_presheaf(&restricted);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            println!("result ok");
            Ok(())
        }
        SegalCommand::Lke {
            oriented_catalog,
            plain_catalog,
            presheaf,
            dendroidal_to_cyclic,
            out,
        } => {
            let oriented = load_catalog(&oriented_catalog)?;
            let plain = load_catalog(&plain_catalog)?;
            let z = load_presheaf(&oriented, &presheaf)?;
            let result = if dendroidal_to_cyclic {
                lke_dendroidal_to_cyclic(&oriented, &plain, &z)
            } else {
                let f = match forget_orientation(&oriented, &plain) {
                    Ok(f) => f,
                    Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
                };
                lke_orientation(&f, &oriented, &plain, &z)
            };
            let extended = match result {
                Ok(p) => p,
                Err(v) => return checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            };
            let text = format::emit_presheaf(&extended);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
            println!("result ok");
            Ok(())
        }
        SegalCommand::Gamma { catalog } => {
            let cat = load_catalog(&catalog)?;
            match gamma_properties(&cat) {
                Ok(report) => {
                    println!("result ok");
                    println!("composable-pairs {}", report.composable_pairs);
                    println!("unit-sections {}", report.unit_sections_checked);
                    println!("substitution-squares {}", report.substitution_squares);
                    Ok(())
                }
                Err(v) => checked(format!("clause {}\ndetail {}", v.clause, v.detail)),
            }
        }
    }
}

/// Optional read-through cache for embedding listings, keyed by the graph
/// encoding; enabled by setting LOOSEEND_CACHE_DIR.
fn cache_path(g: &Graph) -> Option<PathBuf> {
    let dir = std::env::var_os("LOOSEEND_CACHE_DIR")?;
    let mut hasher = DefaultHasher::new();
    g.encode().hash(&mut hasher);
    Some(PathBuf::from(dir).join(format!("emb-{:016x}.txt", hasher.finish())))
}

fn cache_lookup(g: &Graph) -> Option<String> {
    std::fs::read_to_string(cache_path(g)?).ok()
}

fn cache_store(g: &Graph, content: &str) {
    if let Some(path) = cache_path(g) {
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        let _ = std::fs::write(path, content);
    }
}
