use std::path::Path;
use std::process::{Command, Output};

fn modrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modrank"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("run modrank")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

fn generate(dir: &Path, n: &str, k: &str) {
    let prefix = format!("{}/", dir.display());
    stdout(&modrank(&[
        "generate", "--n", n, "--module-size", k, "--alpha", "0.2", "--seed", "3", "--out-prefix", &prefix,
    ]));
}

#[test]
fn module_first_ranking_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = write(d, "g.tsv", "A\tB\nB\tC\nC\tD\n");
    let module = write(d, "m.txt", "B\nC\n");
    let ranking = write(d, "r.txt", "B\nC\nA\nD\n");
    let out = stdout(&modrank(&["evaluate", "--graph", &graph, "--ranking", &ranking, "--module", &module]));
    assert_eq!(out.trim(), "auc=1.0 monotonous=true");
    let ranking = write(d, "r2.txt", "A\nB\nD\nC\n");
    let out = stdout(&modrank(&["evaluate", "--graph", &graph, "--ranking", &ranking, "--module", &module]));
    assert_eq!(out.trim(), "auc=0.25 monotonous=false");
}

#[test]
fn ranking_must_be_a_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = write(d, "g.tsv", "A\tB\nB\tC\n");
    let module = write(d, "m.txt", "B\n");
    let ranking = write(d, "r.txt", "B\nC\n");
    let out = modrank(&["evaluate", "--graph", &graph, "--ranking", &ranking, "--module", &module]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_method_writes_a_full_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "15", "4");
    for method in ["optimal", "semiheuristic", "bionet", "weight-order"] {
        let out = path(d, "ranking.txt");
        stdout(&modrank(&[
            "rank", "--graph", &path(d, "graph.tsv"), "--weights", &path(d, "weights.tsv"), "--method", method,
            "--alpha", "0.2", "--out", &out,
        ]));
        let report = stdout(&modrank(&[
            "evaluate", "--graph", &path(d, "graph.tsv"), "--ranking", &out, "--module", &path(d, "module.txt"),
        ]));
        assert!(report.starts_with("auc="));
        if matches!(method, "optimal" | "semiheuristic") {
            assert!(report.contains("monotonous=true"), "{method}: {report}");
        }
    }
}

#[test]
fn optimal_on_a_large_graph_reports_the_enumeration_cap() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "100", "10");
    let out = modrank(&[
        "rank", "--graph", &path(d, "graph.tsv"), "--weights", &path(d, "weights.tsv"), "--method", "optimal",
        "--alpha", "0.2", "--out", &path(d, "r.txt"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumeration"));
}

#[test]
fn prior_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = write(d, "g.tsv", "a\tb\nb\tc\nc\td\n");
    let weights = write(d, "w.tsv", "a\t0.5\nb\t0.5\nc\t0.5\nd\t0.5\n");
    let prior = write(d, "p.tsv", "c,d\t1\n");
    let out = path(d, "r.txt");
    stdout(&modrank(&[
        "rank", "--graph", &graph, "--weights", &weights, "--method", "optimal", "--alpha", "0.5", "--prior",
        &prior, "--out", &out,
    ]));
    let ranking = std::fs::read_to_string(&out).unwrap();
    let first: Vec<&str> = ranking.lines().take(2).collect();
    assert!(first == ["c", "d"] || first == ["d", "c"], "{ranking}");
}

#[test]
fn rank_needs_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "10", "3");
    let out = modrank(&[
        "rank", "--graph", &path(d, "graph.tsv"), "--weights", &path(d, "weights.tsv"), "--method", "semiheuristic",
        "--out", &path(d, "r.txt"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    stdout(&modrank(&[
        "rank", "--graph", &path(d, "graph.tsv"), "--weights", &path(d, "weights.tsv"), "--method", "weight-order",
        "--out", &path(d, "r.txt"),
    ]));
}

#[test]
fn mwcs_prints_solution() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = write(d, "g.tsv", "A\tB\nB\tC\n");
    let scores = write(d, "s.tsv", "A\t1\nB\t-0.5\nC\t1\n");
    let out = stdout(&modrank(&["mwcs", "--graph", &graph, "--scores", &scores]));
    assert_eq!(out, "vertices=A,B,C\nscore=1.5\nproven_optimal=true\n");

    let scores = write(d, "s2.tsv", "A\t1\nB\t-2\nC\t3\n");
    let anchors = write(d, "r.txt", "A\n");
    let out = stdout(&modrank(&["mwcs", "--graph", &graph, "--scores", &scores, "--anchors", &anchors]));
    assert_eq!(out, "vertices=A,B\nscore=-2.0\nproven_optimal=true\n");
}

#[test]
fn fit_bum_output_format() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text: String = (1..=200).map(|i| format!("v{i}\t{}\n", (i as f64 / 200.0).powi(4))).collect();
    let weights = write(d, "w.tsv", &text);
    let out = stdout(&modrank(&["fit-bum", "--weights", &weights]));
    let line = out.trim();
    assert!(line.starts_with("alpha=") && line.contains(" lambda="), "{line}");
    let alpha: f64 = line["alpha=".len()..line.find(' ').unwrap()].parse().unwrap();
    assert!(alpha < 0.5);
}

#[test]
fn experiment_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let config = write(d, "c.cfg", "trials = 3\nn = 12\nmodule_size = 3\nmethods = semiheuristic,weight-order\n");
    let out = path(d, "results.csv");
    stdout(&modrank(&["experiment", "--config", &config, "--seed", "4", "--out", &out, "--jobs", "2"]));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial_id,n,m_edges,module_size,alpha,method,auc,runtime_ms,optimal_flag"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("0,12,11,3,") && rows[0].contains(",semiheuristic,"));
    assert!(rows[5].starts_with("2,") && rows[5].ends_with(",NA"));
}

#[test]
fn error_exit_codes() {
    let missing = modrank(&["fit-bum", "--weights", "/nonexistent/w.tsv"]);
    assert_eq!(missing.status.code(), Some(3));
    let usage = modrank(&["rank", "--graph", "x"]);
    assert_eq!(usage.status.code(), Some(1));
    let unknown = modrank(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(modrank(&["--help"]).status.success());
}
