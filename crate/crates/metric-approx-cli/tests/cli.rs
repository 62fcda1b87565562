use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn mapx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapx")).args(args).output().expect("mapx runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = path(dir.path(), "c.json");
    let o = mapx(&["construct", "--method", "cyclic-z", "--n", "3", "--out", &cert]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["dimension"], 7);
    assert_eq!(v["provenance"]["builder"], "cyclic-z");
    let o = mapx(&["verify", &cert]);
    assert_eq!(code(&o), 0);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["separation"]["exact"], "1");
}

#[test]
fn swapped_assignment_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cert = path(dir.path(), "c.json");
    let bad = path(dir.path(), "bad.json");
    assert_eq!(code(&mapx(&["construct", "--method", "cyclic-z", "--n", "3", "--out", &cert])), 0);
    assert_eq!(code(&mapx(&["mutate", &cert, "--seed", "11", "--out", &bad])), 0);
    let o = mapx(&["verify", &bad]);
    assert_eq!(code(&o), 2);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["pass"], false);
    // g, h and gh
    assert_eq!(rep["defect_witness"].as_array().unwrap().len(), 3);
}

#[test]
fn weakly_sofic_profile_of_z() {
    let o = mapx(&["profile", "--group", "Z", "--family", "fin", "--n", "1..10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,lower,exact,upper,provenance"));
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let n = i + 1;
        assert_eq!(cols[0], n.to_string());
        assert_eq!(cols[2], (2 * n + 1).to_string(), "{line}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    std::fs::write(&cfg, "# growth of Z^2\ncommand = profile\ngroup = Z^2\nfamily = growth\nn = 1..4\n").unwrap();
    let o = mapx(&["--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stdout(&o).contains("4,41,41,41"));
    let o = mapx(&["profile", "--config", &cfg, "--n", "2"]);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["n,lower,exact,upper,provenance", "2,13,13,13,exact(ball enumeration)"]);
    // a config naming another subcommand is rejected
    assert_eq!(code(&mapx(&["ball", "--config", &cfg, "--n", "1", "--group", "Z"])), 1);
}

#[test]
fn invalid_configuration_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "bad.cfg");
    std::fs::write(&cfg, "command = ball\nball-cap = 0\n").unwrap();
    let o = mapx(&["--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("positive"));
    assert_eq!(code(&mapx(&["ball", "--group", "Q8", "--n", "1"])), 1);
    assert_eq!(code(&mapx(&["verify", "--tolerance", "0.01", "x.json"])), 1);
    assert_eq!(code(&mapx(&["construct", "--method", "teleport", "--n", "1"])), 1);
    assert_eq!(code(&mapx(&["frobnicate"])), 1);
    assert_eq!(code(&mapx(&["verify", "/nonexistent/cert.json"])), 1);
}

#[test]
fn resource_caps_exit_three() {
    assert_eq!(code(&mapx(&["ball", "--group", "F2", "--n", "8", "--ball-cap", "100"])), 3);
    assert_eq!(code(&mapx(&["construct", "--method", "cyclic-z", "--n", "5", "--dim-cap", "10"])), 3);
}

#[test]
fn ball_lists_normal_forms() {
    let o = mapx(&["ball", "--group", "Z", "--n", "2"]);
    let v: Vec<String> = serde_json::from_str(&stdout(&o)).unwrap();
    let mut sorted = v.clone();
    sorted.sort();
    assert_eq!(sorted, ["-1", "-2", "0", "1", "2"]);
    assert_eq!(v[0], "0");
}

#[test]
fn every_method_re_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["--method", "cyclic-z", "--family", "hyp", "--n", "2"],
        &["--method", "cyclic-z", "--family", "lin(F2)", "--n", "2"],
        &["--method", "quotient", "--group", "H", "--n", "1"],
        &["--method", "folner", "--group", "Z^2", "--n", "1"],
        &["--method", "regular", "--group", "S3", "--family", "fin", "--n", "2"],
        &["--method", "product", "--group", "Z x C3", "--n", "2"],
        &["--method", "induce", "--index", "3", "--n", "2"],
        &["--method", "wreath-rf", "--group", "C2 wr Z", "--n", "1"],
        &["--method", "wreath-sofic", "--group", "Z wr C2", "--n", "1"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let cert = path(dir.path(), &format!("c{i}.json"));
        let mut args = vec!["construct"];
        args.extend_from_slice(case);
        args.extend_from_slice(&["--out", &cert]);
        let o = mapx(&args);
        assert_eq!(code(&o), 0, "{case:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(code(&mapx(&["verify", &cert])), 0, "{case:?}");
    }
}

#[test]
fn audit_accepts_consistent_curves_and_flags_violations() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str], name: &str| {
        let out = path(dir.path(), name);
        let mut a = args.to_vec();
        a.extend_from_slice(&["--out", &out]);
        assert_eq!(code(&mapx(&a)), 0, "{args:?}");
        out
    };
    let sof = run(&["profile", "--group", "Z", "--family", "sof", "--n", "1..5"], "sof.csv");
    let fin = run(&["profile", "--group", "Z", "--family", "fin", "--n", "1..5"], "fin.csv");
    let growth = run(&["profile", "--group", "Z", "--family", "growth", "--n", "1..10"], "growth.csv");
    let rf = run(&["rfgrowth", "--group", "Z", "--n", "1..10"], "rf.csv");
    let fol = run(&["folner", "--group", "Z", "--n", "1..10"], "fol.csv");
    let cert = run(&["construct", "--method", "cyclic-z", "--n", "12"], "c.json");
    let o = mapx(&[
        "audit", "--group", "Z",
        "--curve", &format!("sof={sof}"),
        "--curve", &format!("fin={fin}"),
        "--curve", &format!("growth={growth}"),
        "--curve", &format!("rf@Z={rf}"),
        "--curve", &format!("folner={fol}"),
        "--round-trip", &format!("{cert}@2"),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rep["checked"].as_u64().unwrap() > 20);

    // a weakly sofic upper bound below the ball size
    let bogus = path(dir.path(), "bogus.csv");
    std::fs::write(&bogus, "n,lower,exact,upper,provenance\n1,,,3,upper(test)\n2,,,4,upper(test)\n").unwrap();
    let o = mapx(&["audit", "--group", "Z", "--curve", &format!("fin={bogus}"), "--curve", &format!("growth={growth}")]);
    assert_eq!(code(&o), 2);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["pass"], false);
    assert_eq!(rep["violations"][0]["n"], 2);
    assert_eq!(code(&mapx(&["audit", "--curve", "fin"])), 1);
}

#[test]
fn reruns_are_byte_identical() {
    let runs: &[&[&str]] = &[
        &["construct", "--method", "product", "--group", "Z x Z", "--n", "2"],
        &["profile", "--group", "Z^2", "--family", "sof", "--n", "1..3"],
        &["profile", "--group", "Z", "--family", "sof", "--n", "1..2", "--methods", "oracle,cyclic-z"],
        &["folner", "--group", "Z", "--n", "1..2", "--strategy", "exhaustive"],
        &["ball", "--group", "H", "--n", "2"],
    ];
    for args in runs {
        let a = mapx(args);
        let mut with_workers = args.to_vec();
        with_workers.extend_from_slice(&["--workers", "1"]);
        let b = mapx(&with_workers);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn mutation_depends_only_on_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cert = path(dir.path(), "c.json");
    assert_eq!(code(&mapx(&["construct", "--method", "cyclic-z", "--n", "4", "--out", &cert])), 0);
    let a = mapx(&["mutate", &cert, "--seed", "3"]);
    let b = mapx(&["mutate", &cert, "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let c = mapx(&["mutate", &cert, "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}
