use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use daf_core::export::ArgumentRecord;
use daf_core::{ArgId, Conclusion, GraphDump, Rule};

fn kb(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.kb"))
}

fn daf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daf"))
        .args(args)
        .env_remove("DAF_HARD_CAP")
        .output()
        .expect("daf runs")
}

fn query(name: &str, semantics: &str, q: &str, extra: &[&str]) -> Output {
    let path = kb(name);
    let mut args = vec!["query", "-k", path.to_str().unwrap(), "-s", semantics, q];
    args.extend_from_slice(extra);
    daf(&args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn first_line(out: &Output) -> String {
    stdout(out).lines().next().unwrap_or_default().to_string()
}

#[test]
fn verdict_lines() {
    let out = query("g1", "basic", "O q", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(first_line(&out), "G |-DAF O q");
    assert!(stdout(&out).contains("[factual detachment: p, p => q]"));

    let out = query("g6", "prio", "O ~s", &["--exit-status"]);
    assert_eq!(
        (out.status.code(), first_line(&out)),
        (Some(0), "G |-DAF_<= O ~s".into())
    );
    let out = query("g6", "prio", "O s", &["--exit-status"]);
    assert_eq!(
        (out.status.code(), first_line(&out)),
        (Some(1), "G |/-DAF_<= O s  (within bounds)".into())
    );
    // Without --exit-status a negative answer still succeeds.
    assert_eq!(query("g6", "prio", "O s", &[]).status.code(), Some(0));
}

#[test]
fn empty_knowledge_base() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.kb");
    std::fs::write(&empty, "# nothing here\n\n").unwrap();
    let out = daf(&[
        "query",
        "-k",
        empty.to_str().unwrap(),
        "O p",
        "--exit-status",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(first_line(&out), "G |/-DAF O p  (within bounds)");

    let dot = dir.path().join("empty.dot");
    let json = dir.path().join("empty.json");
    let out = daf(&[
        "export",
        "-k",
        empty.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&dot)
            .unwrap()
            .lines()
            .filter(|l| l.contains("->"))
            .count(),
        0
    );
    let dump = GraphDump::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(dump.universe.is_empty() && dump.edges.is_empty());
}

#[test]
fn fast_engine() {
    for (q, derivable) in [("O q", true), ("O r", false), ("O ~r", false)] {
        let out = query("g9", "basic", q, &["--engine", "fast", "--exit-status"]);
        assert_eq!(
            out.status.code(),
            Some(if derivable { 0 } else { 1 }),
            "{q}"
        );
        assert!(!first_line(&out).contains("within bounds"));
    }
    let out = query("g5", "spec", "O p", &["--engine", "fast"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(query("g1", "basic", "q", &[]).status.code(), Some(2));
    assert_eq!(query("g1", "basic", "O (q", &[]).status.code(), Some(2));
    assert_eq!(query("g1", "prio", "O q", &[]).status.code(), Some(2));
    assert_eq!(
        query("g1", "basic", "O q", &["--build-rounds", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(query("g1", "modal", "O q", &[]).status.code(), Some(2));
    let out = daf(&["query", "-k", "/no/such/file.kb", "O q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/file.kb"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kb");
    std::fs::write(&bad, "fact p\nob p q\n").unwrap();
    let out = daf(&["query", "-k", bad.to_str().unwrap(), "O q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn hard_cap() {
    let out = query("g6", "prio", "O t", &["--hard-cap", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let path = kb("g6");
    let run = |cap: &str, extra: &[&str]| {
        let mut args = vec!["query", "-k", path.to_str().unwrap(), "-s", "prio", "O t"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_daf"))
            .args(&args)
            .env("DAF_HARD_CAP", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("4", &[]).status.code(), Some(3));
    assert_eq!(run("100000", &[]).status.code(), Some(0));
    assert_eq!(run("4", &["--hard-cap", "100000"]).status.code(), Some(0));
    assert_eq!(run("many", &[]).status.code(), Some(2));
}

#[test]
fn facts_settled_switch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.kb");
    std::fs::write(&path, "fact p\nob p => q\nob q => r\nob r => ~p\n").unwrap();
    let run = |setting: &str| {
        daf(&[
            "query",
            "-k",
            path.to_str().unwrap(),
            "--facts-settled",
            setting,
            "O ~p",
            "--exit-status",
        ])
        .status
        .code()
    };
    assert_eq!(run("on"), Some(1));
    assert_eq!(run("off"), Some(0));
}

#[test]
fn batch_queries() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("queries.txt");
    std::fs::write(&list, "O q\n# comment\n\nO q | r\nO ~q\n").unwrap();
    let path = kb("g1");
    let out = daf(&[
        "query",
        "-k",
        path.to_str().unwrap(),
        "--queries",
        list.to_str().unwrap(),
        "--exit-status",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let verdicts: Vec<String> = stdout(&out)
        .lines()
        .filter(|l| l.starts_with("G "))
        .map(String::from)
        .collect();
    assert_eq!(
        verdicts,
        [
            "G |-DAF O q",
            "G |-DAF O (q | r)",
            "G |/-DAF O ~q  (within bounds)"
        ]
    );

    let out = daf(&[
        "query",
        "-k",
        path.to_str().unwrap(),
        "--queries",
        list.to_str().unwrap(),
        "--output",
        "json",
    ]);
    let records: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    assert_eq!(records[2]["verdict"]["derivable"], false);

    std::fs::write(&list, "O q\nq\n").unwrap();
    let out = daf(&[
        "query",
        "-k",
        path.to_str().unwrap(),
        "--queries",
        list.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn json_record() {
    let out = query("g1", "basic", "O q | r", &["--output", "json"]);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["verdict"]["derivable"], true);
    assert_eq!(record["verdict"]["query"], "q | r");
    let graph: GraphDump = serde_json::from_value(record["graph"].clone()).unwrap();
    let solved = graph.solve().unwrap();
    let grounded: Vec<ArgId> = solved.grounded.iter().map(|&i| ArgId(i)).collect();
    assert_eq!(grounded, graph.grounded);

    let out = query(
        "g1",
        "basic",
        "O q",
        &["--engine", "fast", "--output", "json"],
    );
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(record.get("graph").is_none());
}

fn export(name: &str, semantics: &str, q: Option<&str>, dir: &Path) -> (String, String) {
    let path = kb(name);
    let dot = dir.join(format!("{name}.dot"));
    let json = dir.join(format!("{name}.json"));
    let mut args = vec![
        "export",
        "-k",
        path.to_str().unwrap(),
        "-s",
        semantics,
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ];
    if let Some(q) = q {
        args.extend(["--query", q]);
    }
    assert_eq!(daf(&args).status.code(), Some(0));
    (
        std::fs::read_to_string(dot).unwrap(),
        std::fs::read_to_string(json).unwrap(),
    )
}

fn find(dump: &GraphDump, pred: impl Fn(&ArgumentRecord) -> bool) -> ArgId {
    let hits: Vec<ArgId> = dump
        .universe
        .iter()
        .filter(|a| pred(a))
        .map(|a| a.id)
        .collect();
    assert_eq!(hits.len(), 1, "{hits:?}");
    hits[0]
}

fn concl(text: &str) -> Conclusion {
    Conclusion::parse(text).unwrap()
}

/// Factual detachment, or deontic detachment whose child is itself a chain.
fn is_chain(dump: &GraphDump, a: &ArgumentRecord) -> bool {
    match a.rule {
        Rule::FactualDetach { .. } => true,
        Rule::DeonticDetach { .. } => is_chain(dump, &dump.universe[a.children[0].index()]),
        _ => false,
    }
}

fn chain(dump: &GraphDump, text: &str) -> ArgId {
    find(dump, |a| a.conclusion == concl(text) && is_chain(dump, a))
}

fn leaf(dump: &GraphDump, text: &str) -> ArgId {
    find(dump, |a| {
        a.conclusion == concl(text) && a.rule == Rule::ConstraintLeaf
    })
}

fn aggregate(dump: &GraphDump, parts: &[ArgId]) -> ArgId {
    let parts: BTreeSet<ArgId> = parts.iter().copied().collect();
    find(dump, |a| {
        a.rule == Rule::Aggregate && a.children.iter().copied().collect::<BTreeSet<_>>() == parts
    })
}

fn weakening(dump: &GraphDump, child: ArgId, text: &str) -> ArgId {
    find(dump, |a| {
        matches!(a.rule, Rule::Weaken { .. })
            && a.children == [child]
            && a.conclusion == concl(text)
    })
}

fn edges_among(dump: &GraphDump, named: &[ArgId]) -> BTreeSet<(usize, usize)> {
    let position = |id: ArgId| named.iter().position(|&n| n == id).map(|p| p + 1);
    dump.edges
        .iter()
        .filter_map(|e| Some((position(e.from)?, position(e.to)?)))
        .collect()
}

#[test]
fn contrary_to_duty_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (dot, json) = export("g1", "basic", Some("O q | r"), dir.path());
    let dump = GraphDump::from_json(&json).unwrap();
    let (a3, a4) = (chain(&dump, "O ~q"), chain(&dump, "O q"));
    let named = [
        leaf(&dump, "[] p"),
        chain(&dump, "O ~p"),
        a3,
        a4,
        aggregate(&dump, &[a3, a4]),
        weakening(&dump, a4, "O (q | r)"),
        leaf(&dump, "[] ~(q & ~q)"),
    ];
    let expected: BTreeSet<(usize, usize)> = [
        (1, 2),
        (1, 3),
        (1, 5),
        (3, 4),
        (4, 3),
        (3, 5),
        (3, 6),
        (4, 5),
        (7, 5),
    ]
    .into_iter()
    .collect();
    assert_eq!(edges_among(&dump, &named), expected);

    assert!(dump.universe.len() >= 7);
    for a in &dump.universe {
        let label = format!("  {} [label=\"{}\\n{}\"", a.id, a.id, a.conclusion);
        assert!(dot.contains(&label), "{label}");
    }
    let subargument = format!("  {} -> {} [style=dashed, dir=none", named[3], named[5]);
    assert!(dot.contains(&subargument));
    assert!(dot.contains(&format!(
        "  {} -> {} [color=blue, label=fact]",
        named[0], named[1]
    )));
    assert!(dot.contains(&format!(
        "  {} -> {} [color=red, label=conflict]",
        named[2], named[3]
    )));
}

#[test]
fn conflict_graph() {
    let dir = tempfile::tempdir().unwrap();
    let (_, json) = export("g3", "basic", None, dir.path());
    let dump = GraphDump::from_json(&json).unwrap();
    let (a1, a2) = (chain(&dump, "O r"), chain(&dump, "O s"));
    let named = [
        a1,
        a2,
        aggregate(&dump, &[a1, a2]),
        leaf(&dump, "[] ~(r & s)"),
        weakening(&dump, a2, "O ~r"),
        weakening(&dump, a1, "O ~s"),
    ];
    let expected: BTreeSet<(usize, usize)> = [
        (4, 3),
        (1, 5),
        (5, 1),
        (5, 3),
        (5, 6),
        (2, 6),
        (6, 2),
        (6, 3),
        (6, 5),
    ]
    .into_iter()
    .collect();
    assert_eq!(edges_among(&dump, &named), expected);
}

#[test]
fn exports_are_stable_and_reload() {
    for (name, semantics, q) in [
        ("g1", "basic", Some("O q")),
        ("g4", "shadow", None),
        ("g6", "prio", Some("O ~s")),
    ] {
        let one = tempfile::tempdir().unwrap();
        let two = tempfile::tempdir().unwrap();
        let first = export(name, semantics, q, one.path());
        let second = export(name, semantics, q, two.path());
        assert_eq!(first, second, "{name}");
        let dump = GraphDump::from_json(&first.1).unwrap();
        assert_eq!(GraphDump::from_json(&dump.to_json()).unwrap(), dump);
        let solved = dump.solve().unwrap();
        let stages: Vec<Vec<ArgId>> = solved
            .stages
            .iter()
            .map(|s| s.iter().map(|&i| ArgId(i)).collect())
            .collect();
        assert_eq!(stages, dump.stages, "{name}");
    }
}

#[test]
fn query_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let json = dir.path().join("g.json");
    let out = query(
        "g7",
        "basic",
        "O q",
        &[
            "--dot",
            dot.to_str().unwrap(),
            "--dump",
            json.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(dot)
        .unwrap()
        .starts_with("digraph daf {"));
    assert!(GraphDump::from_json(&std::fs::read_to_string(json).unwrap()).is_ok());
    let unwritable = dir.path().join("missing/dir/g.dot");
    let out = query(
        "g7",
        "basic",
        "O q",
        &["--dot", unwritable.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
}
