mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{data_dir, random_instance, write_instance};
use qap_core::{Algorithm, Assignment, IterationTrace};
use qap_harness::trace_file::{RunRecord, TraceMeta};

fn qap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qap"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("experiment.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    qap(&args)
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref())
        .unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

const REPORTS: [&str; 4] = ["table1.csv", "table1.json", "table2.csv", "table2.json"];

#[test]
fn smoke_run_writes_traces_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let sample = data_dir().join("sample2.dat");
    let cfg = write_config(
        tmp.path(),
        &format!(
            "instances = [{:?}]\nreplications = 2\n[[algorithms]]\nname = \"lsh\"\n",
            sample.to_str().unwrap()
        ),
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let traces: Vec<_> = std::fs::read_dir(out.join("traces")).unwrap().collect();
    assert_eq!(traces.len(), 2);
    assert!(out.join("traces/sample2__lsh__r000.trace").is_file());
    assert!(out.join("traces/sample2__lsh__r001.trace").is_file());
    for f in REPORTS {
        assert!(out.join(f).is_file(), "{f}");
    }
    let t1: serde_json::Value = serde_json::from_str(&read(out.join("table1.json"))).unwrap();
    assert_eq!(t1[0]["best_obj"], 6);
    assert_eq!(t1[0]["replications"], 2);
    assert_eq!(read(out.join("failures.json")).trim(), "[]");
}

#[test]
fn repeated_runs_are_byte_identical_and_report_regenerates_them() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_instance(tmp.path(), "alpha", &random_instance(9, 1, 20));
    let b = write_instance(tmp.path(), "beta", &random_instance(7, 2, 20));
    let cfg = write_config(
        tmp.path(),
        r#"
instances = ["alpha.dat", "beta.dat"]
replications = 3
seed = 5
half_count = true

[detector]
window = 10
delta = 1e-3
target = 3

[[algorithms]]
name = "sa"
max_iterations = 40
sa = { moves_per_temperature = 200 }

[[algorithms]]
name = "ga"
max_iterations = 50

[[algorithms]]
name = "lsh"
max_iterations = 20
"#,
    );
    assert!(a.is_file() && b.is_file());
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    for out in [&first, &second] {
        let o = run(&cfg, out, &["--workers", "3"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in REPORTS {
        assert_eq!(read(first.join(f)), read(second.join(f)), "{f}");
    }

    // one row per (instance, algorithm), in configuration order
    let t1 = read(first.join("table1.csv"));
    let keys: Vec<String> = t1
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join("/"))
        .collect();
    assert_eq!(
        keys,
        [
            "alpha/sa",
            "alpha/ga",
            "alpha/lsh",
            "beta/sa",
            "beta/ga",
            "beta/lsh"
        ]
    );
    assert!(t1.lines().next().unwrap().ends_with("var_worst_half"));

    let regenerated = tmp.path().join("regenerated");
    let o = qap(&[
        "report",
        first.to_str().unwrap(),
        "--out",
        regenerated.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in REPORTS {
        assert_eq!(read(first.join(f)), read(regenerated.join(f)), "{f}");
    }
    for f in ["timing.csv", "timing.json"] {
        assert_eq!(read(first.join(f)), read(regenerated.join(f)), "{f}");
    }
}

#[test]
fn corrupt_trace_is_named_and_others_still_reported() {
    let tmp = tempfile::tempdir().unwrap();
    write_instance(tmp.path(), "gamma", &random_instance(6, 3, 20));
    let cfg = write_config(
        tmp.path(),
        "instances = [\"gamma.dat\"]\nreplications = 3\n[[algorithms]]\nname = \"hs\"\nmax_iterations = 30\n",
    );
    let out = tmp.path().join("out");
    assert!(run(&cfg, &out, &[]).status.success());
    let victim = out.join("traces/gamma__hs__r001.trace");
    let text = read(&victim).replacen("\n3 ", "\n3 oops ", 1);
    std::fs::write(&victim, text).unwrap();

    let o = qap(&["report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("gamma__hs__r001.trace"),
        "{}",
        stderr(&o)
    );
    let t1: serde_json::Value = serde_json::from_str(&read(out.join("table1.json"))).unwrap();
    assert_eq!(t1[0]["replications"], 2);
}

#[test]
fn single_iteration_traces_report_insufficient_lambda_data() {
    let tmp = tempfile::tempdir().unwrap();
    write_instance(tmp.path(), "delta", &random_instance(5, 4, 20));
    let cfg = write_config(
        tmp.path(),
        "instances = [\"delta.dat\"]\nreplications = 2\n[[algorithms]]\nname = \"pso\"\nmax_iterations = 1\n",
    );
    let out = tmp.path().join("out");
    let o = run(&cfg, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let timing: serde_json::Value = serde_json::from_str(&read(out.join("timing.json"))).unwrap();
    assert!(timing[0]["lambda"].is_null());
    assert!(timing[0]["lambda_note"]
        .as_str()
        .unwrap()
        .contains("insufficient"));
    assert!(timing[0]["efficiency"].is_null());
}

#[test]
fn missing_instance_fails_with_its_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "instances = [\"nowhere/missing.dat\"]\n[[algorithms]]\nname = \"sa\"\n",
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.dat"), "{}", stderr(&o));
}

#[test]
fn invalid_config_lists_every_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "instances = []\nreplications = 0\n[[algorithms]]\nname = \"tabu\"\n[[algorithms]]\nname = \"hs\"\nhs = { hmcr = 3.0 }\n",
    );
    let o = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for needle in ["replications", "at least one instance", "tabu", "hmcr"] {
        assert!(err.contains(needle), "missing {needle:?} in {err}");
    }
}

#[test]
fn oracle_solves_small_instances_and_refuses_large_ones() {
    let o = qap(&["oracle", data_dir().join("sample2.dat").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cost"], 6);

    let tmp = tempfile::tempdir().unwrap();
    let inst = random_instance(4, 44, 30);
    let path = write_instance(tmp.path(), "four", &inst);
    let o = qap(&["oracle", path.to_str().unwrap(), "--half-count"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // independent enumeration over all 24 assignments
    let mut best = i64::MAX;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        let mut total = 0;
                        for i in 0..4 {
                            for j in 0..4 {
                                total += inst.flow().get(i, j) * inst.distance().get(p[i], p[j]);
                            }
                        }
                        best = best.min(total);
                    }
                }
            }
        }
    }
    assert_eq!(v["cost"], best);
    assert_eq!(v["cost_half"], best as f64 / 2.0);

    let big = write_instance(tmp.path(), "twelve", &random_instance(12, 1, 10));
    let o = qap(&["oracle", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("12"), "{}", stderr(&o));
}

fn record_with_best(best: &[i64]) -> RunRecord {
    let n = 3;
    RunRecord {
        meta: TraceMeta {
            instance: "synthetic".into(),
            algorithm: Algorithm::Ga,
            replication: 0,
            seed: 1,
            n,
            best_cost: *best.iter().min().unwrap(),
            best_assignment: Assignment::identity(n),
            wall_time: 1.0,
        },
        trace: best
            .iter()
            .enumerate()
            .map(|(i, &b)| IterationTrace {
                iteration: i + 1,
                best: b,
                mean: b as f64 + 1.5,
                worst: b + 3,
                incumbent: *best[..=i].iter().min().unwrap(),
                lambda: 0.01,
            })
            .collect(),
    }
}

fn series_rows(path: &Path) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn emit(rec: &RunRecord, dir: &Path) -> Vec<PathBuf> {
    let trace = dir.join(rec.file_name());
    std::fs::write(&trace, rec.to_text()).unwrap();
    let out = dir.join("series");
    let o = qap(&[
        "series",
        trace.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o).lines().map(PathBuf::from).collect()
}

#[test]
fn series_files_have_expected_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let decreasing: Vec<i64> = (0..100).map(|i| 1000 - 3 * i).collect();
    let files = emit(&record_with_best(&decreasing), tmp.path());
    let conv = series_rows(&files[0]);
    assert_eq!(conv.len(), 100);
    let best: Vec<i64> = conv.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(best, decreasing);
    assert_eq!(series_rows(&files[1]).len(), 100);
    let var = series_rows(&files[2]);
    assert_eq!(var.len(), 51);
    assert_eq!(var[0][0], "50");
    assert_eq!(var[50][0], "100");
    // population variance of an arithmetic progression with step 3 over 50 terms
    let expected = 9.0 * (50.0 * 50.0 - 1.0) / 12.0;
    assert!(var
        .iter()
        .all(|r| (r[1].parse::<f64>().unwrap() - expected).abs() < 1e-9));

    let tmp = tempfile::tempdir().unwrap();
    let files = emit(&record_with_best(&[42; 120]), tmp.path());
    let var = series_rows(&files[2]);
    assert_eq!(var.len(), 71);
    assert!(var.iter().all(|r| r[1] == "0"));
}
