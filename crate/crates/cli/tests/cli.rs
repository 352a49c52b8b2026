use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn molars(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molars"))
        .args(args)
        .current_dir(root())
        .env_remove("MOLARS_SEED")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    fs::read_to_string(root().join("crates/cli/tests/golden").join(name)).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const P2_1: &[&str] = &[
    "run",
    "--program",
    "corpus/programs/p2_1.mt",
    "--metamodel",
    "corpus/metamodels/graph1.json",
    "--metamodel",
    "corpus/metamodels/result.json",
    "--model",
    "corpus/fixtures/g_a.json",
];

const P4_1: &[&str] = &[
    "run",
    "--program",
    "corpus/programs/p4_1.mt",
    "--metamodel",
    "corpus/metamodels/graph1.json",
    "--metamodel",
    "corpus/metamodels/graph2.json",
    "--extension",
    "corpus/extensions/trace2.json",
    "--target",
    "corpus/metamodels/graph2.json",
    "--model",
    "corpus/fixtures/g_a.json",
];

#[test]
fn run_counts_nodes_into_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let mut args = P2_1.to_vec();
    let path = out.display().to_string();
    args.extend(["--out", &path]);
    let o = molars(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text, golden("p2_1_g_a.json"));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let results: Vec<_> = doc["objects"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|o| o["class"] == "IntResult")
        .map(|o| o["attrs"]["result"].as_i64().unwrap())
        .collect();
    assert_eq!(results, [5]);
}

#[test]
fn run_writes_to_stdout_without_out() {
    let o = molars(P2_1);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("p2_1_g_a.json"));
    assert!(o.stderr.is_empty(), "diagnostics leaked: {}", stderr(&o));
}

#[test]
fn migration_matches_golden_and_strips_traces() {
    let o = molars(P4_1);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("p4_1_g_a.json"));
    assert!(!stdout(&o).contains("trace2"));
}

#[test]
fn no_strip_keeps_trace_links() {
    let mut args = P4_1.to_vec();
    args.push("--no-strip");
    let o = molars(&args);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"Node.trace2\""));
}

#[test]
fn missing_entry_is_a_runtime_failure() {
    let mut args = P2_1.to_vec();
    args.extend(["--entry", "absent"]);
    let o = molars(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown procedure `absent`"));
    assert!(o.stdout.is_empty());
}

#[test]
fn program_errors_exit_one_with_located_diagnostics() {
    let o = molars(&[
        "run",
        "--program",
        "crates/cli/tests/golden/bad.mt",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        "corpus/fixtures/g_a.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o), golden("bad.stderr"));
}

#[test]
fn missing_input_file_is_reported() {
    let o = molars(&[
        "run",
        "--program",
        "nowhere.mt",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        "corpus/fixtures/g_a.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.mt"));
}

#[test]
fn small_iteration_cap_stops_closure() {
    let o = molars(&[
        "run",
        "--program",
        "corpus/programs/p6_o.mt",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        "corpus/fixtures/chain.json",
        "--max-iterations",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("while rule still matches after 0 applications"));
}

fn write_model(dir: &Path, text: &str) -> String {
    let p = dir.join("model.json");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_accepts_fixtures() {
    let o = molars(&[
        "validate",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        "corpus/fixtures/g_a.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn validate_names_unknown_link_ends() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        dir.path(),
        r#"{"conformsTo": "graph1", "objects": [{"id": "g", "class": "Graph", "attrs": {}}],
            "links": [{"assoc": "Graph.nodes", "src": "g", "trg": "ghost"}]}"#,
    );
    let o = molars(&[
        "validate",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        &model,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ghost"), "{}", stderr(&o));
}

#[test]
fn validate_rejects_wrong_attribute_types() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        dir.path(),
        r#"{"conformsTo": "graph1", "objects": [{"id": "n", "class": "Node", "attrs": {"name": 3}}], "links": []}"#,
    );
    let o = molars(&[
        "validate",
        "--metamodel",
        "corpus/metamodels/graph1.json",
        "--model",
        &model,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("name"), "{}", stderr(&o));
}

#[test]
fn oracle_agrees_on_circles() {
    let o = molars(&[
        "oracle",
        "--task",
        "p2_4",
        "--model",
        "corpus/fixtures/g_a.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected = r#"{"kind":"counts","values":[6]}"#;
    assert_eq!(
        stdout(&o),
        format!("engine: {expected}\noracle: {expected}\n")
    );
}

#[test]
fn oracle_rejects_unknown_tasks() {
    let o = molars(&[
        "oracle",
        "--task",
        "p9_9",
        "--model",
        "corpus/fixtures/g_a.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown task `p9_9`"));
}

#[test]
fn corpus_check_honours_the_seed_variable() {
    let direct = molars(&["corpus-check", "--seed", "5", "--random", "10"]);
    let from_env = Command::new(env!("CARGO_BIN_EXE_molars"))
        .args(["corpus-check", "--random", "10"])
        .current_dir(root())
        .env("MOLARS_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(direct.status.code(), Some(0), "{}", stderr(&direct));
    assert_eq!(direct.stdout, from_env.stdout);
    assert!(stdout(&direct).starts_with("seed 5 with 10 random models\n"));
}

#[test]
fn corpus_check_is_independent_of_jobs() {
    let one = molars(&[
        "corpus-check",
        "--seed",
        "9",
        "--random",
        "10",
        "--jobs",
        "1",
    ]);
    let four = molars(&[
        "corpus-check",
        "--seed",
        "9",
        "--random",
        "10",
        "--jobs",
        "4",
    ]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn write_expected_reproduces_the_checked_in_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().display().to_string();
    let o = molars(&["corpus-check", "--write-expected", &path]);
    assert!(o.status.success());
    for entry in fs::read_dir(root().join("corpus/expected")).unwrap() {
        let entry = entry.unwrap();
        let fresh = fs::read_to_string(dir.path().join(entry.file_name())).unwrap();
        assert_eq!(
            fresh,
            fs::read_to_string(entry.path()).unwrap(),
            "{:?}",
            entry.file_name()
        );
    }
}
