use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aqolab::formats::Document;
use aqolab::oracle::exact_covers;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn aqolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqolab")).args(args).env_remove("AQOLAB_MAX_QUBITS").output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = aqolab(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_instances_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("batch");
    ok(&["generate", "--kind", "ec3", "--m", "5", "--count", "10", "--seed", "7", "--out-dir", s(&dir)]);
    let manifest = read_json(&dir.join("manifest.json"));
    let instances = manifest["instances"].as_array().unwrap();
    assert_eq!(instances.len(), 10);
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 11);
    for (i, entry) in instances.iter().enumerate() {
        assert_eq!(entry["seed"], 7 + i as u64);
        let doc = Document::parse(&fs::read_to_string(dir.join(entry["file"].as_str().unwrap())).unwrap()).unwrap();
        assert!(doc.to_exact_cover().unwrap().is_ec3());
    }
    assert_eq!(manifest["rng"], "chacha8");

    let again = tmp.path().join("again");
    ok(&["generate", "--kind", "ec3", "--m", "5", "--count", "10", "--seed", "7", "--out-dir", s(&again)]);
    for entry in instances {
        let f = entry["file"].as_str().unwrap();
        assert_eq!(fs::read(dir.join(f)).unwrap(), fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn generate_zero_count_and_existing_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("empty");
    ok(&["generate", "--kind", "ec3", "--m", "5", "--count", "0", "--out-dir", s(&dir)]);
    let names: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec!["manifest.json"]);

    let refused = aqolab(&["generate", "--kind", "ec3", "--m", "5", "--count", "2", "--out-dir", s(&dir)]);
    assert!(!refused.status.success());
    assert!(stderr(&refused).contains("--force"), "{}", stderr(&refused));
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
    ok(&["--force", "generate", "--kind", "ec3", "--m", "5", "--count", "2", "--out-dir", s(&dir)]);
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 3);
}

#[test]
fn generate_invalid_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = aqolab(&["generate", "--kind", "3sat", "--m", "4", "--out-dir", s(&tmp.path().join("a"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--n"), "{}", stderr(&out));

    let dir = tmp.path().join("b");
    let out = aqolab(&["generate", "--kind", "ec3", "--m", "1", "--count", "2", "--out-dir", s(&dir)]);
    assert!(!out.status.success());
    assert_eq!(read_json(&dir.join("manifest.json"))["failures"].as_array().unwrap().len(), 2);
}

#[test]
fn generate_3sat() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sat");
    ok(&["generate", "--kind", "3sat", "--n", "5", "--m", "4", "--count", "3", "--seed", "1", "--out-dir", s(&dir)]);
    let f = Document::parse(&fs::read_to_string(dir.join("3sat_0002.json")).unwrap()).unwrap().to_cnf().unwrap();
    assert_eq!((f.num_vars(), f.num_clauses()), (5, 4));
}

#[test]
fn reduce_small_cover_matches_golden_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("gm.json");
    ok(&["reduce", "--input", s(&fixture("small_cover.json")), "--target", "mis", "--out", s(&out)]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(fixture("small_cover_graph.json")).unwrap());
    assert!(tmp.path().join("gm.mapping.json").exists());
    assert_eq!(read_json(&tmp.path().join("gm.config.json"))["reduction"], "ec_to_mis");

    let sat = tmp.path().join("f.json");
    ok(&["reduce", "--input", s(&fixture("small_cover.json")), "--target", "1in3sat", "--out", s(&sat)]);
    let f = Document::parse(&fs::read_to_string(&sat).unwrap()).unwrap();
    assert_eq!(
        f,
        Document::Cnf {
            semantics: "positive_1in3".into(),
            n: 7,
            clauses: vec![[1, 2, 3], [1, 2, 4], [3, 4, 5], [1, 3, 6], [2, 6, 7]],
        }
    );
}

#[test]
fn reduce_wrong_target_names_valid_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let out = aqolab(&[
        "reduce",
        "--input",
        s(&fixture("small_sat.json")),
        "--target",
        "1in3sat",
        "--out",
        s(&tmp.path().join("x.json")),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("valid targets: mis"), "{}", stderr(&out));
    assert!(!tmp.path().join("x.json").exists());
}

#[test]
fn decode_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let gm = tmp.path().join("gm.json");
    ok(&["reduce", "--input", s(&fixture("small_cover.json")), "--target", "mis", "--out", s(&gm)]);
    let mapping = tmp.path().join("gm.mapping.json");
    let oracle: Value = serde_json::from_slice(&ok(&["decode", "--mapping", s(&mapping), "--oracle"]).stdout).unwrap();
    let decoded = oracle["decoded"].as_array().unwrap();
    assert!(!decoded.is_empty());
    for d in decoded {
        assert_eq!(d["exact_cover"], true);
        assert_eq!(d["cover"], serde_json::json!([1, 5, 7]));
    }
    let partial: Value =
        serde_json::from_slice(&ok(&["decode", "--mapping", s(&mapping), "--vertices", "4,7"]).stdout).unwrap();
    assert_eq!(partial["decoded"][0]["reaches_target"], false);
    let conflict = aqolab(&["decode", "--mapping", s(&mapping), "--vertices", "1,2"]);
    assert!(!conflict.status.success());

    let cnf = tmp.path().join("g2.json");
    ok(&["reduce", "--input", s(&fixture("small_sat.json")), "--target", "mis", "--out", s(&cnf)]);
    let sat: Value = serde_json::from_slice(
        &ok(&["decode", "--mapping", s(&tmp.path().join("g2.mapping.json")), "--oracle"]).stdout,
    )
    .unwrap();
    for d in sat["decoded"].as_array().unwrap() {
        assert_eq!(d["satisfies"], true);
    }
}

#[test]
fn scan_one_qubit_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let prefix = tmp.path().join("q");
    ok(&["scan", "--input", s(&fixture("one_qubit.json")), "--out-prefix", s(&prefix)]);
    let summary = read_json(&tmp.path().join("q.summary.json"));
    let gmin = summary["gmin"].as_f64().unwrap();
    let s_star = summary["s_star"].as_f64().unwrap();
    assert!((gmin - 2f64.sqrt()).abs() < 1e-6, "{gmin}");
    assert!((s_star - 0.5).abs() < 1e-4, "{s_star}");
    let csv = fs::read_to_string(tmp.path().join("q.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("s,E0,E1,gap"));
    assert_eq!(lines.count(), 101);
    let config = read_json(&tmp.path().join("q.config.json"));
    assert_eq!(config["scan"]["grid_points"], 101);
    assert_eq!(config["system"]["delta"], 1.0);
}

#[test]
fn scan_small_cover_ground_state_is_the_cover() {
    let tmp = tempfile::tempdir().unwrap();
    let ec =
        Document::parse(&fs::read_to_string(fixture("small_cover.json")).unwrap()).unwrap().to_exact_cover().unwrap();
    let expected: Vec<Vec<usize>> =
        exact_covers(&ec).into_iter().map(|c| c.into_iter().map(|i| i + 1).collect()).collect();
    let input = fixture("small_cover.json");
    for (ham, extra) in [("a", None), ("c", None), ("c", Some("const:3")), ("mis", None)] {
        let prefix = tmp.path().join(format!("f1_{ham}_{}", extra.is_some()));
        let mut args = vec!["scan", "--input", s(&input), "--ham", ham, "--grid", "21"];
        if let Some(rule) = extra {
            args.extend(["--d-rule", rule]);
        }
        args.extend(["--out-prefix", s(&prefix)]);
        ok(&args);
        let summary = read_json(Path::new(&format!("{}.summary.json", prefix.display())));
        let selected: Vec<Vec<usize>> = summary["ground_states"]
            .as_array()
            .unwrap()
            .iter()
            .map(|g| serde_json::from_value(g["selected"].clone()).unwrap())
            .collect();
        assert_eq!(selected, expected, "ham {ham}");
        assert!(summary["gmin"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn scan_flag_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let prefix = tmp.path().join("x");
    let missing = aqolab(&["scan", "--input", s(&fixture("small_cover.json")), "--out-prefix", s(&prefix)]);
    assert!(stderr(&missing).contains("--ham is required"), "{}", stderr(&missing));
    let wrong =
        aqolab(&["scan", "--input", s(&fixture("small_cover_graph.json")), "--ham", "c", "--out-prefix", s(&prefix)]);
    assert!(stderr(&wrong).contains("valid: mis"), "{}", stderr(&wrong));
    let bad_edge = aqolab(&[
        "scan",
        "--input",
        s(&fixture("small_cover.json")),
        "--ham",
        "c",
        "--set-d",
        "1,7=2",
        "--out-prefix",
        s(&prefix),
    ]);
    assert!(stderr(&bad_edge).contains("not an edge"), "{}", stderr(&bad_edge));
    let bad_j = aqolab(&[
        "scan",
        "--input",
        s(&fixture("small_cover_graph.json")),
        "--ham",
        "mis",
        "--set-j",
        "1,2=3",
        "--out-prefix",
        s(&prefix),
    ]);
    assert!(stderr(&bad_j).contains("J = 3 > min"), "{}", stderr(&bad_j));
    assert!(!tmp.path().join("x.csv").exists());
}

#[test]
fn malformed_json_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\"kind\": \"ising\",\n \"n\": 1,\n \"h\": [1.0,,]\n}\n").unwrap();
    let out = aqolab(&["scan", "--input", s(&bad), "--out-prefix", s(&tmp.path().join("o"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn qubit_cap_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_aqolab"))
        .args(["scan", "--input", s(&fixture("small_cover.json")), "--ham", "a", "--out-prefix"])
        .arg(tmp.path().join("o"))
        .env("AQOLAB_MAX_QUBITS", "5")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("above the cap of 5"), "{}", stderr(&out));
}

#[test]
fn evolve_requires_t() {
    let tmp = tempfile::tempdir().unwrap();
    let out = aqolab(&["evolve", "--input", s(&fixture("one_qubit.json")), "--out-prefix", s(&tmp.path().join("e"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--t"), "{}", stderr(&out));
}

#[test]
fn evolve_curve_traces_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let prefix = tmp.path().join("e");
    let input = fixture("one_qubit.json");
    let args = ["evolve", "--input", s(&input), "--t", "1,50", "--out-prefix", s(&prefix)];
    ok(&args);
    let curve = fs::read_to_string(tmp.path().join("e.curve.csv")).unwrap();
    let rows: Vec<&str> = curve.lines().collect();
    assert_eq!(rows[0], "T,success_probability,norm_drift");
    assert_eq!(rows.len(), 3);
    let last: Vec<f64> = rows[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 50.0);
    assert!(last[1] > 0.99 && last[2] < 1e-8, "{last:?}");
    for t in ["1", "50"] {
        let trace = fs::read_to_string(tmp.path().join(format!("e.trace.T{t}.csv"))).unwrap();
        assert!(trace.starts_with("t,s,overlap\n"));
    }
    let config = read_json(&tmp.path().join("e.config.json"));
    assert_eq!(config["runs"][1]["steps"], 5000);

    let first = fs::read(tmp.path().join("e.curve.csv")).unwrap();
    assert!(!aqolab(&args).status.success());
    let mut forced = vec!["--force"];
    forced.extend(args);
    ok(&forced);
    assert_eq!(fs::read(tmp.path().join("e.curve.csv")).unwrap(), first);
}

#[test]
fn compare_single_empty_and_corrupt() {
    let tmp = tempfile::tempdir().unwrap();
    let single = tmp.path().join("single");
    fs::create_dir(&single).unwrap();
    fs::copy(fixture("small_cover.json"), single.join("small_cover.json")).unwrap();
    let out = tmp.path().join("single.csv");
    ok(&["compare", "--dir", s(&single), "--grid", "21", "--out", s(&out)]);
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,n,m,num_solutions,gmin_A,s_star_A,gmin_C,s_star_C,gmin_ratio");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("small_cover,7,5,1,"), "{}", lines[1]);

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = tmp.path().join("empty.csv");
    ok(&["compare", "--dir", s(&empty), "--out", s(&out)]);
    assert_eq!(fs::read_to_string(&out).unwrap(), format!("{}\n", lines[0]));

    let corrupt = tmp.path().join("corrupt");
    fs::create_dir(&corrupt).unwrap();
    fs::copy(fixture("small_cover.json"), corrupt.join("good.json")).unwrap();
    fs::write(corrupt.join("broken.json"), "{\"kind\":\"exact_cover\",\"m\":").unwrap();
    let out = tmp.path().join("corrupt.csv");
    let relaxed = aqolab(&["compare", "--dir", s(&corrupt), "--grid", "21", "--out", s(&out)]);
    assert!(relaxed.status.success(), "{}", stderr(&relaxed));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2);
    let errors = fs::read_to_string(tmp.path().join("corrupt.errors.csv")).unwrap();
    assert!(errors.lines().nth(1).unwrap().starts_with("broken,"), "{errors}");
    let strict = aqolab(&["--force", "compare", "--dir", s(&corrupt), "--grid", "21", "--out", s(&out), "--strict"]);
    assert!(!strict.status.success());
}

#[test]
fn jobs_flag_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let prefix = tmp.path().join("j");
    ok(&["--jobs", "2", "scan", "--input", s(&fixture("one_qubit.json")), "--grid", "11", "--out-prefix", s(&prefix)]);
    assert_eq!(read_json(&tmp.path().join("j.config.json"))["jobs"], 2);
}
