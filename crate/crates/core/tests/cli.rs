use std::path::Path;
use std::process::{Command, Output};

use girthgen::bipartite::{BipartiteGraph, BipError, DegreeSequence};
use girthgen::cli::{parse_degree_file, CliError};
use girthgen::graph::{girth, Graph};
use serde_json::Value;

fn girthgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_girthgen"))
        .args(args)
        .env_remove("GIRTHGEN_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let line = text.lines().find(|l| l.starts_with('{')).expect("JSON error line on stderr");
    serde_json::from_str(line).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_a_valid_edge_list() {
    let o = girthgen(&["gen", "--n", "7", "--m", "8", "--k", "3", "--seed", "1"]);
    assert!(o.status.success());
    let g = Graph::parse_edge_list(&stdout(&o)).unwrap();
    assert_eq!(g.edge_count(), 8);
    assert!(girth(&g).exceeds(3));
}

#[test]
fn gen_output_and_record_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let rec = dir.path().join("g.json");
    let o = girthgen(&[
        "gen", "--n", "30", "--m", "32", "--k", "4", "--seed", "5", "--output", path_str(&out), "--record", path_str(&rec),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let g = Graph::read_edge_list(std::fs::File::open(&out).map(std::io::BufReader::new).unwrap()).unwrap();
    assert!(girth(&g).exceeds(4) && g.edge_count() == 32);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(r["n"], 30);
    assert_eq!(r["seed"], 5);
    assert!(r["attempts"].as_u64().unwrap() >= 1);
    assert!(r["wall_time_ms"].is_number());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        let o = girthgen(&["gen", "--n", "40", "--m", "45", "--k", "5", "--seed", seed, "--output", path_str(&p)]);
        assert!(o.status.success());
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a", "9"), run("b", "9"));
    assert_ne!(run("c", "9"), run("d", "10"));

    let deg = dir.path().join("deg.txt");
    std::fs::write(&deg, "2 2 2 2 2 2\n2 2 2 2 2 2\n").unwrap();
    let bip = |seed: &str| {
        let o = girthgen(&["gen-bip", "--degrees", path_str(&deg), "--k", "4", "--seed", seed, "--retries", "50"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    assert_eq!(bip("3"), bip("3"));
}

#[test]
fn fail_exhausted_exit_code() {
    let o = girthgen(&["gen", "--n", "3", "--m", "3", "--k", "3", "--retries", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"]["code"], "fail-exhausted");
    assert_eq!(e["error"]["exit"], 2);
}

#[test]
fn error_record_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("err.json");
    let o = girthgen(&["gen", "--n", "3", "--m", "3", "--k", "3", "--retries", "2", "--record", path_str(&rec)]);
    assert_eq!(o.status.code(), Some(2));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert_eq!(r["error"]["code"], "fail-exhausted");
}

#[test]
fn infeasible_config_exit_code() {
    let o = girthgen(&["gen", "--n", "4", "--m", "7", "--k", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"]["code"], "infeasible-config");

    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.txt");
    std::fs::write(&deg, "2 2 2\n2 2 2\n").unwrap();
    let o = girthgen(&["gen-bip", "--degrees", path_str(&deg), "--k", "5"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(&deg, "1 1\n3\n").unwrap();
    let o = girthgen(&["gen-bip", "--degrees", path_str(&deg), "--k", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn budget_exit_code_and_env_override() {
    let o = girthgen(&["enumerate", "--n", "12", "--m", "20", "--k", "3", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_json(&o)["error"]["code"], "budget-exceeded");
    let o = Command::new(env!("CARGO_BIN_EXE_girthgen"))
        .args(["estimate", "--n", "12", "--m", "20", "--k", "3", "--exact"])
        .env("GIRTHGEN_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn gen_bip_alist_reparses_with_exact_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.txt");
    std::fs::write(&deg, "3 3 3 3 3 3 3 3 3 3 3 3\n3 3 3 3 3 3 3 3 3 3 3 3\n").unwrap();
    let out = dir.path().join("h.alist");
    let o = girthgen(&["gen-bip", "--degrees", path_str(&deg), "--k", "4", "--seed", "2", "--retries", "200", "--output", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = BipartiteGraph::parse_alist(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let d = DegreeSequence::regular(12, 3, 12, 3).unwrap();
    assert!(g.realizes(&d));
    assert!(girth(g.graph()).exceeds(4));
}

#[test]
fn degree_file_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.txt");
    std::fs::write(&p, "2 2 2\n2 2 2").unwrap();
    let d = parse_degree_file(&p).unwrap();
    assert_eq!((d.left(), d.right(), d.edges()), (&[2, 2, 2][..], &[2, 2, 2][..], 6));
    std::fs::write(&p, "1 1\n2").unwrap();
    assert_eq!(parse_degree_file(&p).unwrap().edges(), 2);
    std::fs::write(&p, "1 1\n3").unwrap();
    match parse_degree_file(&p) {
        Err(CliError::Infeasible(msg)) => {
            assert_eq!(msg, BipError::SumMismatch { left: 2, right: 3 }.to_string());
            assert!(msg.contains('2') && msg.contains('3'));
        }
        other => panic!("{other:?}"),
    }
    std::fs::write(&p, "").unwrap();
    assert!(matches!(parse_degree_file(&p), Err(CliError::Other(msg)) if msg.contains("line")));
}

#[test]
fn estimate_and_enumerate_json() {
    let o = girthgen(&["estimate", "--n", "7", "--m", "8", "--k", "3", "--exact"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact_count"], "28875");
    assert!(v["log_count_estimate"].as_f64().unwrap() > 0.0);
    assert!(v["regime_ok"].is_boolean());
    let o = girthgen(&["estimate", "--n", "7", "--m", "8", "--k", "3"]);
    assert!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["exact_count"].is_null());

    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("all.txt");
    let o = girthgen(&["enumerate", "--n", "4", "--m", "3", "--k", "3", "--list", path_str(&list)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], "16");
    assert_eq!(v["subsets"], "20");
    let text = std::fs::read_to_string(&list).unwrap();
    let graphs: Vec<Graph> = text.split("\n\n").filter(|b| !b.trim().is_empty()).map(|b| Graph::parse_edge_list(b).unwrap()).collect();
    assert_eq!(graphs.len(), 16);
    assert!(graphs.iter().all(|g| girth(g).exceeds(3)));
}

#[test]
fn validate_and_bench_reports() {
    let o = girthgen(&["validate", "--n", "5", "--m", "4", "--k", "3", "--samples", "3000", "--seed", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["instance"]["n"], 5);
    assert_eq!(v["ground_truth_size"], 140);
    for key in ["tv_distance", "baseline_tv", "failure_rate", "sampling_noise_bound"] {
        assert!(v[key].is_number(), "{key}");
    }
    assert!(v["chi_square"]["dof"].is_number());

    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.txt");
    std::fs::write(&deg, "2 2 2\n2 2 2\n").unwrap();
    let o = girthgen(&["validate", "--degrees", path_str(&deg), "--k", "4", "--samples", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ground_truth_size"], 6);

    let o = girthgen(&["bench", "--ns", "20,40", "--steps", "5", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert!(v[1]["mean_step_ms"].is_number());
}

#[test]
fn regime_advisory_goes_to_stderr_only() {
    let o = girthgen(&["gen", "--n", "10", "--m", "14", "--k", "3", "--seed", "3", "--retries", "100"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(Graph::parse_edge_list(&stdout(&o)).unwrap().edge_count(), 14);
}
