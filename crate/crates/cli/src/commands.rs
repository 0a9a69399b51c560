use std::collections::BTreeSet;
use std::fmt::Write;
use std::io::Read;
use std::path::Path;

use rotation_poset::lattice::enumerate_stable_bruteforce_with;
use rotation_poset::matching::{format_matching, parse_matching};
use rotation_poset::poset::{closed_sets_json, enumerate_closed_sets, matching_of};
use rotation_poset::rotations::{gi_predecessor_edges, LabelVariant};
use rotation_poset::{
    find_rotation_graph, gen_exponential, gen_random, is_stable, mpda, parse_instance, ClosedSet,
    EdgeType, ExecutionStats, Instance, Matching, RotationAnalysis, RotationDigraph,
};

use crate::{ExportWhat, Format, KindArg};

/// A non-zero exit: `stdout` is still printed, `message` goes to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub stdout: String,
    pub message: String,
}

const NEGATIVE: u8 = 1;
const INPUT: u8 = 2;
const TRUNCATED: u8 = 3;

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: INPUT,
        stdout: String::new(),
        message: format!("error: {}", message.into()),
    }
}

type CmdResult = Result<String, Failure>;

fn read_source(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| input_error(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read_source(path)?;
    let parsed =
        parse_instance(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.instance)
}

pub fn solve(input: &Path, woman_side: bool) -> CmdResult {
    let inst = load_instance(input)?;
    let mu = if woman_side {
        let swapped = mpda(&inst.swap_roles()).matching;
        Matching::from_man_partners(inst.num_women(), swapped.woman_partners())
            .expect("role swap preserves a matching")
    } else {
        mpda(&inst).matching
    };
    Ok(format_matching(&mu))
}

fn edge_list(edges: &BTreeSet<(usize, usize)>) -> String {
    if edges.is_empty() {
        return "none".into();
    }
    edges
        .iter()
        .map(|&(a, b)| format!("r{} -> r{}", a + 1, b + 1))
        .collect::<Vec<_>>()
        .join(", ")
}

fn rotations_text(g: &RotationDigraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rotations: {}", g.len());
    for (i, r) in g.rotations().iter().enumerate() {
        let _ = writeln!(out, "r{}: {r}", i + 1);
    }
    let _ = writeln!(out, "edges: {}", g.edges().len());
    for &(a, b, t) in g.edges() {
        let kind = match t {
            EdgeType::Type1 => 1,
            EdgeType::Type2 => 2,
        };
        let _ = writeln!(out, "r{} -> r{} (type {kind})", a + 1, b + 1);
    }
    out
}

fn stats_line(s: &ExecutionStats) -> String {
    format!(
        "proposals={} rejections={} rotation_events={} predecessor_edge_events={} total={}",
        s.proposals,
        s.rejections,
        s.rotation_events,
        s.predecessor_edge_events,
        s.total()
    )
}

fn render_rotations(a: &RotationAnalysis, format: Format, stats: bool) -> String {
    let g = &a.graph;
    match format {
        Format::Text => {
            let mut out = rotations_text(g);
            if stats {
                let _ = writeln!(out, "stats: {}", stats_line(&a.stats));
            }
            out
        }
        Format::Json => {
            let mut doc: serde_json::Value =
                serde_json::from_str(&g.to_json()).expect("valid json");
            if stats {
                doc["stats"] = serde_json::to_value(a.stats).expect("stats serialize");
            }
            serde_json::to_string_pretty(&doc).expect("json serializes") + "\n"
        }
        Format::Dot => {
            let mut out = g.to_dot();
            if stats {
                let _ = writeln!(out, "// {}", stats_line(&a.stats));
            }
            out
        }
    }
}

fn family(g: &RotationDigraph) -> BTreeSet<ClosedSet> {
    enumerate_closed_sets(g, None)
        .expect("digraph is acyclic")
        .collect()
}

pub fn rotations(input: &Path, format: Format, stats: bool, gi_compare: bool) -> CmdResult {
    let inst = load_instance(input)?;
    let a = find_rotation_graph(&inst);
    let mut out = render_rotations(&a, format, stats);
    if !gi_compare {
        return Ok(out);
    }

    let g = &a.graph;
    let main = g.untyped_edges();
    let buggy =
        gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Buggy).expect("rotations fit");
    let fixed =
        gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Corrected).expect("rotations fit");
    let with_edges = |edges: &BTreeSet<(usize, usize)>| {
        RotationDigraph::new(
            g.man_optimal().clone(),
            g.rotations().to_vec(),
            edges.iter().map(|&(x, y)| (x, y, EdgeType::Type1)),
        )
    };
    let main_family = family(g);
    let buggy_family = family(&with_edges(&buggy));
    let fixed_family = family(&with_edges(&fixed));
    let extra: BTreeSet<_> = buggy.difference(&main).copied().collect();
    let verdict = |same: bool| if same { "SAME" } else { "DIFFERENT" };

    let mut report = String::new();
    let _ = writeln!(report, "label-scan comparison:");
    let _ = writeln!(report, "  digraph:   {}", edge_list(&main));
    let _ = writeln!(report, "  buggy:     {}", edge_list(&buggy));
    let _ = writeln!(report, "  corrected: {}", edge_list(&fixed));
    let _ = writeln!(report, "  buggy extra edges: {}", edge_list(&extra));
    let _ = writeln!(
        report,
        "  buggy closed sets: {} vs {}: {}",
        buggy_family.len(),
        main_family.len(),
        verdict(buggy_family == main_family)
    );
    let _ = writeln!(
        report,
        "  corrected closed sets: {} vs {}: {}",
        fixed_family.len(),
        main_family.len(),
        verdict(fixed_family == main_family)
    );

    if format == Format::Text {
        out.push_str(&report);
    } else {
        eprint!("{report}");
    }
    if fixed_family != main_family {
        return Err(Failure {
            code: NEGATIVE,
            stdout: out,
            message: "corrected label scan disagrees with the digraph".into(),
        });
    }
    Ok(out)
}

fn sorted_sets(g: &RotationDigraph, cap: Option<usize>) -> (Vec<ClosedSet>, bool) {
    let mut it = enumerate_closed_sets(g, cap).expect("digraph is acyclic");
    let mut sets: Vec<ClosedSet> = it.by_ref().collect();
    sets.sort_by(ClosedSet::size_then_lex);
    (sets, it.truncated())
}

fn lattice_text(g: &RotationDigraph, sets: &[ClosedSet], truncated: bool) -> String {
    let mut out = String::new();
    if truncated {
        let _ = writeln!(out, "first {} stable matchings", sets.len());
    } else {
        let _ = writeln!(out, "{} stable matchings", sets.len());
    }
    let labels: Vec<String> = sets.iter().map(ToString::to_string).collect();
    let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    for (s, label) in sets.iter().zip(&labels) {
        let mu = matching_of(g, s).expect("closed sets map to matchings");
        let pad = width - label.chars().count();
        let _ = writeln!(out, "{label}{}  {mu}", " ".repeat(pad));
    }
    out
}

/// Hasse diagram: `T` covers `S` when it adds exactly one rotation.
fn lattice_dot(g: &RotationDigraph, sets: &[ClosedSet]) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    for (i, s) in sets.iter().enumerate() {
        let mu = matching_of(g, s).expect("closed sets map to matchings");
        let _ = writeln!(out, "  s{} [label=\"{mu}\"];", i + 1);
    }
    for (i, s) in sets.iter().enumerate() {
        for (j, t) in sets.iter().enumerate() {
            if t.len() == s.len() + 1 && s.members().iter().all(|&r| t.contains(r)) {
                let _ = writeln!(out, "  s{} -> s{};", i + 1, j + 1);
            }
        }
    }
    out.push_str("}\n");
    out
}

fn render_lattice(
    g: &RotationDigraph,
    sets: &[ClosedSet],
    truncated: bool,
    format: Format,
) -> String {
    match format {
        Format::Text => lattice_text(g, sets, truncated),
        Format::Json => closed_sets_json(g, sets).expect("closed sets map to matchings") + "\n",
        Format::Dot => lattice_dot(g, sets),
    }
}

pub fn lattice(
    input: &Path,
    max_output: Option<usize>,
    oracle: bool,
    force: bool,
    format: Format,
) -> CmdResult {
    let inst = load_instance(input)?;
    let limit = rotation_poset::lattice::DEFAULT_ORACLE_LIMIT;
    if oracle && !force && inst.size() > limit {
        return Err(input_error(format!(
            "brute-force check refused: instance size {} exceeds {limit}; pass --force to run it anyway",
            inst.size()
        )));
    }
    let g = find_rotation_graph(&inst).graph;
    let (sets, truncated) = sorted_sets(&g, max_output);
    let mut out = render_lattice(&g, &sets, truncated, format);

    if truncated {
        return Err(Failure {
            code: TRUNCATED,
            stdout: out,
            message: format!("TRUNCATED: more than {} stable matchings", sets.len()),
        });
    }
    if oracle {
        let lat = enumerate_stable_bruteforce_with(&inst, None).expect("size checked above");
        let ours: BTreeSet<Matching> = sets.iter().map(|s| matching_of(&g, s).unwrap()).collect();
        let theirs: BTreeSet<Matching> = lat.matchings.iter().cloned().collect();
        let line = if ours == theirs {
            format!("ORACLE MATCH: {} = {}", ours.len(), theirs.len())
        } else {
            format!("ORACLE MISMATCH: {} vs {}", ours.len(), theirs.len())
        };
        let target = if format == Format::Text {
            &mut out
        } else {
            &mut String::new()
        };
        let _ = writeln!(target, "{line}");
        if format != Format::Text {
            eprintln!("{line}");
        }
        if ours != theirs {
            return Err(Failure {
                code: NEGATIVE,
                stdout: out,
                message: String::new(),
            });
        }
    }
    Ok(out)
}

pub fn export(input: &Path, what: ExportWhat, format: Format) -> CmdResult {
    match what {
        ExportWhat::Instance => {
            let inst = load_instance(input)?;
            match format {
                Format::Json => Ok(inst.to_json() + "\n"),
                Format::Text => Ok(inst.to_text()),
                Format::Dot => Err(input_error("an instance has no DOT form; use json or text")),
            }
        }
        ExportWhat::Rotations => {
            let inst = load_instance(input)?;
            Ok(render_rotations(&find_rotation_graph(&inst), format, false))
        }
        ExportWhat::Lattice => lattice(input, None, false, false, format),
    }
}

pub fn gen(
    kind: KindArg,
    n: Option<usize>,
    density: f64,
    k: Option<usize>,
    seed: u64,
) -> CmdResult {
    let inst = match kind {
        KindArg::Random => {
            let n = n.ok_or_else(|| input_error("--kind random needs --n"))?;
            gen_random(n, density, seed)
        }
        KindArg::Exponential => {
            let k = k.ok_or_else(|| input_error("--kind exponential needs --k"))?;
            gen_exponential(k)
        }
    }
    .map_err(|e| input_error(e.to_string()))?;
    Ok(inst.to_text())
}

pub fn verify(input: &Path, matching: &Path) -> CmdResult {
    let inst = load_instance(input)?;
    let text = read_source(matching)?;
    let mu = parse_matching(&text, &inst)
        .map_err(|e| input_error(format!("{}: {e}", matching.display())))?;
    if let Err(e) = mu.validate(&inst) {
        return Err(Failure {
            code: NEGATIVE,
            stdout: format!("NOT A MATCHING: {e}\n"),
            message: String::new(),
        });
    }
    let blocking = is_stable(&inst, &mu).expect("validated above");
    if blocking.is_empty() {
        return Ok("STABLE\n".into());
    }
    let mut out = format!("UNSTABLE: {} blocking pairs\n", blocking.len());
    for b in &blocking {
        let _ = writeln!(out, "{} -- {}", b.man, b.woman);
    }
    Err(Failure {
        code: NEGATIVE,
        stdout: out,
        message: String::new(),
    })
}

pub fn bench(sizes: &[usize], seeds: u64) -> CmdResult {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(input_error("sizes must be at least 1"));
    }
    let rows = rotation_poset_bench::run(sizes, seeds);
    let mut buf = Vec::new();
    rotation_poset_bench::write_csv(&rows, &mut buf).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}
