use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use graphcode::graph::{load_graph, sorted_matrix, GraphFormat};

fn graphcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphcode")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = graphcode(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn listing(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

fn one_line_error(out: &Output) -> String {
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    err
}

#[test]
fn gen_empty_er_graphs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "ER n=12 p=0", "--count", "3", "--out", p(dir.path())]);
    let files = listing(dir.path());
    assert_eq!(files.len(), 3);
    for f in &files {
        let g = load_graph(f, GraphFormat::EdgeList).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (12, 0));
    }
}

#[test]
fn gen_is_deterministic_and_seeded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        ok(&["gen", "NWS n=30 k=4 p=0.2", "--count", "2", "--seed", seed, "--format", "mtx", "--out", p(dir.path())]);
    }
    let read = |d: &tempfile::TempDir| listing(d.path()).iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert!(listing(a.path()).iter().all(|f| f.extension().unwrap() == "mtx"));
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = dir.path().join("graphs");
    ok(&["gen", "BA n=40 m=3 seed=11", "--count", "4", "--out", p(&graphs)]);
    let files = listing(&graphs);
    let model = dir.path().join("model.toml");
    let mut train = vec!["train", "--out", p(&model)];
    train.extend(files.iter().map(|f| p(f)));
    ok(&train);

    let input = &files[0];
    let original = sorted_matrix(&load_graph(input, GraphFormat::EdgeList).unwrap());
    for coder in ["labeled-iid", "struct-iid", "degree", "triangle"] {
        for mode in ["universal", "learned"] {
            let container = dir.path().join(format!("{coder}-{mode}.gcd"));
            let decoded = dir.path().join(format!("{coder}-{mode}.mtx"));
            let report = ok(&[
                "encode", p(input), "--coder", coder, "--mode", mode, "--model", p(&model), "--out", p(&container),
            ]);
            assert!(report.contains("actual_bits="), "{report}");
            ok(&["decode", p(&container), "--model", p(&model), "--out", p(&decoded)]);
            let back = load_graph(&decoded, GraphFormat::MatrixMarket).unwrap();
            assert_eq!(sorted_matrix(&back), original, "{coder} {mode}");
        }
    }
}

#[test]
fn learned_mode_needs_a_model() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "ER n=10 p=0.3", "--out", p(dir.path())]);
    let input = listing(dir.path()).remove(0);
    let out = graphcode(&["encode", p(&input), "--mode", "learned", "--out", p(&dir.path().join("x.gcd"))]);
    let err = one_line_error(&out);
    assert_eq!(out.status.code(), Some(2), "{err}");
    assert!(err.contains("model"), "{err}");
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 1\n1 2\n2 x\n").unwrap();
    let err = one_line_error(&graphcode(&["encode", p(&bad), "--out", p(&dir.path().join("x.gcd"))]));
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn bad_arguments_exit_with_usage_status() {
    let out = graphcode(&["gen", "XY n=3", "--out", "/nonexistent"]);
    one_line_error(&out);
    assert_eq!(out.status.code(), Some(2));
    let out = graphcode(&["decode", "/no/such/file.gcd", "--out", "/tmp/never.txt"]);
    one_line_error(&out);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn score_and_compare_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = dir.path().join("g");
    ok(&["gen", "BA n=30 m=2", "--count", "3", "--out", p(&graphs)]);
    let files = listing(&graphs);
    let model = dir.path().join("m.toml");
    let mut args = vec!["train", "--out", p(&model)];
    args.extend(files.iter().map(|f| p(f)));
    ok(&args);

    let scores = dir.path().join("scores.csv");
    let mut args = vec!["score", "--model", p(&model), "--out", p(&scores)];
    args.extend(files.iter().map(|f| p(f)));
    ok(&args);
    let text = fs::read_to_string(&scores).unwrap();
    assert_eq!(text.lines().next().unwrap(), "graph_id,family,n,L_T,L_A,winning_coder,score");
    assert_eq!(text.lines().count(), 4);

    let table = dir.path().join("compare.csv");
    let mut args = vec!["compare", "--out", p(&table)];
    args.extend(files.iter().map(|f| p(f)));
    ok(&args);
    assert_eq!(fs::read_to_string(&table).unwrap().lines().count(), 4);
}

const SMALL: &str = r#"
version = 1
seed = 9
output = "out"
reference = "typical"

[training]
name = "train"
spec = "BA n=30 m=3"
count = 8

[[test]]
name = "typical"
spec = "BA n=30 m=3"
count = 12

[[test]]
name = "er"
spec = "ER n=30 p=0.2"
count = 12

[tau]
start = -50.0
stop = 50.0
step = 10.0
"#;

#[test]
fn experiment_is_reproducible() {
    let runs: Vec<Vec<(String, Vec<u8>)>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let cfg = dir.path().join("exp.toml");
            fs::write(&cfg, SMALL).unwrap();
            let stdout = ok(&["experiment", p(&cfg)]);
            assert!(stdout.contains("er: EER"), "{stdout}");
            listing(&dir.path().join("out"))
                .into_iter()
                .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&f).unwrap()))
                .collect()
        })
        .collect();
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["histogram.csv", "model.toml", "scores.csv", "summary.csv", "sweep.csv"]);
    assert_eq!(runs[0], runs[1]);
    let scores = String::from_utf8(runs[0][2].1.clone()).unwrap();
    assert_eq!(scores.lines().count(), 25);
    let sweep = String::from_utf8(runs[0][4].1.clone()).unwrap();
    // Only the non-reference family, eleven thresholds.
    assert_eq!(sweep.lines().count(), 12);
}

#[test]
fn experiment_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, SMALL.replace("reference = \"typical\"", "reference = \"nope\"")).unwrap();
    let err = one_line_error(&graphcode(&["experiment", p(&cfg)]));
    assert!(err.contains("nope"), "{err}");
    fs::write(&cfg, SMALL.replace("version = 1", "version = 1\ncolour = 3")).unwrap();
    one_line_error(&graphcode(&["experiment", p(&cfg)]));
    fs::write(&cfg, SMALL.replace("count = 8", "count = 0")).unwrap();
    one_line_error(&graphcode(&["experiment", p(&cfg)]));
}
