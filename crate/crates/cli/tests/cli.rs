use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowcross"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_convex_writes_depth_one_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--kind", "convex", "--n", "1024", "--seed", "7"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("points.txt")).unwrap();
    let pts = lowcross::io::PointFile::parse(&text).unwrap().points().unwrap();
    assert_eq!(pts.len(), 1024);
    assert_eq!(lowcross::geometry::convex_hull(&pts).len(), 1024);
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(
            run(d.path(), &["count", "--n", "300", "--trials", "200", "--seed", "4"])
                .status
                .success()
        );
        assert!(
            run(d.path(), &["partition", "--kind", "convex", "--n", "256", "--k", "8"])
                .status
                .success()
        );
    }
    for f in ["count.csv", "structure.json", "partition.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn count_agrees_with_oracle_on_query_file() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    std::fs::write(&q, "0 1 0\n1 1 100000000\n-3 7 -5000\n1 0 0\n").unwrap();
    let o = run(dir.path(), &["count", "--n", "2048", "--queries", q.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["agreement"], 1.0);
    let mut r = csv::Reader::from_path(dir.path().join("count.csv")).unwrap();
    let head: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        &head[..7],
        [
            "query_id",
            "count",
            "w",
            "layers_scanned",
            "classes_crossed",
            "tree_nodes_visited",
            "used_complement"
        ]
    );
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|x| &x[8] == "true"));
}

#[test]
fn verify_passes_small_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "verify",
            "--check",
            "weight_ledger",
            "--n",
            "256",
            "--k",
            "8",
            "--seed",
            "1",
        ],
    );
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["schema"], 1);
    let r = &v["reports"][0];
    assert_eq!(r["passed"], true);
    assert!(r["trials"].as_u64().unwrap() > 0);
    assert!(r.get("threshold").is_some());
}

#[test]
fn unknown_flag_is_a_usage_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "error");
    assert_eq!(v["kind"], "usage");
}

#[test]
fn malformed_files_fail_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "2 3 0\n1 2\nx y\n").unwrap();
    let o = run(dir.path(), &["partition", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["kind"], "input");
    let o = run(dir.path(), &["verify", "--check", "no_such_check"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_rows_carry_seed_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"name":"t","kind":"convex_position","sizes":[[256,8]],"seeds":[3]}"#,
    )
    .unwrap();
    let o = run(
        dir.path(),
        &["bench", "--spec", spec.to_str().unwrap(), "--trials", "100"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let mut r = csv::Reader::from_path(dir.path().join("crossing.csv")).unwrap();
    let row = r.records().next().unwrap().unwrap();
    assert_eq!((&row[3], &row[4], &row[5]), ("3", "256", "8"));
    let rows = csv::Reader::from_path(dir.path().join("cost.csv"))
        .unwrap()
        .records()
        .count();
    assert_eq!(rows, 10);
}

#[test]
fn bench_spec_rejects_unknown_check() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"sizes":[[64,4]],"seeds":[1],"checks":["nope"]}"#).unwrap();
    let o = run(dir.path(), &["bench", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
