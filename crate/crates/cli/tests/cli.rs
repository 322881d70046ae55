use std::path::Path;
use std::process::{Command, Output};

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartierkit"))
        .args(args)
        .env("CARTIERKIT_CACHE", cache)
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn witt_examples() {
    let add = run(&["witt", "add", "--p", "2", "--len", "2", "--ring", "Z/4", "[1,0]", "[1,0]"]);
    assert_eq!(stdout(&add).trim(), r#"{"coords":[2,3]}"#);
    let t = run(&["witt", "teichmuller", "--p", "3", "--len", "3", "--ring", "F3", "2"]);
    assert_eq!(stdout(&t).trim(), "[2,0,0]");
    let g = run(&["witt", "ghost", "--p", "2", "--len", "2", "--ring", "Z/8", "[1,1]"]);
    assert_eq!(stdout(&g).trim(), "[1,3]");
    let v = run(&["witt", "verschiebung", "--p", "3", "--len", "2", "--ring", "F3", "[1,2]"]);
    assert_eq!(stdout(&v).trim(), r#"{"coords":[0,1,2]}"#);
    let full = run(&["witt", "frobenius", "--p", "2", "--len", "2", "--ring", "F2", "--char-p", "--full", "[1,1]"]);
    assert_eq!(stdout(&full).trim(), r#"{"coords":[1,1],"n":2,"p":2,"ring":"F2"}"#);
}

#[test]
fn polynomial_tables_agree_with_ghost_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["witt", "mul", "--p", "2", "--len", "3", "--ring", "F2[x]/x^4", "[[0,1],0,1]", "[1,[1,1],0]"];
    let direct = stdout(&run_in(dir.path(), &args));
    let mut with_polys = args.to_vec();
    with_polys.push("--polys");
    assert_eq!(stdout(&run_in(dir.path(), &with_polys)), direct);
    assert!(dir.path().read_dir().unwrap().next().is_some());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["witt", "add", "--p", "2", "--len", "2", "--ring", "Z/4", "[1,0", "[1,0]"]), 2);
    assert_eq!(code(&["witt", "add", "--p", "2", "--len", "2", "--ring", "Z/4"]), 2);
    assert_eq!(code(&["witt", "add", "--p", "2", "--len", "2", "--ring", "Q", "[1,0]", "[1,0]"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["witt", "add", "--p", "3", "--len", "2", "--ring", "Z/4", "[1,0]", "[1,0]"]), 3);
    assert_eq!(code(&["witt", "add", "--p", "2", "--len", "3", "--ring", "Z/4", "[1,0]", "[1,0]"]), 3);
    assert_eq!(code(&["witt", "frobenius", "--p", "2", "--len", "2", "--ring", "Z/4", "--char-p", "[1,0]"]), 4);
    assert_eq!(code(&["cartier", "tensor", "--m", "catalog:alpha_p", "--n", "catalog:nonsense"]), 2);
}

#[test]
fn cartier_commands() {
    let t = stdout(&run(&["cartier", "tensor", "--m", "catalog:alpha_p", "--n", "catalog:alpha_p", "--trunc", "3"]));
    assert!(t.contains(r#""quotient":"Z/2 + Z/2 + Z/2""#), "{t}");
    let h = stdout(&run(&["cartier", "homotopy", "--p", "3", "--module", "catalog:K3", "--prec", "2", "--dmax", "3"]));
    assert_eq!(h, "degree,invariant_factors\n0,Z/3\n1,0\n2,Z/3 + Z/3\n3,Z/3 + Z/3\n");
    let c = stdout(&run(&["cartier", "completion", "--p", "3", "--module", "pruefer"]));
    let v: serde_json::Value = serde_json::from_str(&c).unwrap();
    assert_eq!(v["complete"], false);
    let cat = stdout(&run(&["cartier", "catalog", "--p", "5"]));
    let entries: serde_json::Value = serde_json::from_str(&cat).unwrap();
    assert!(entries.as_array().unwrap().len() >= 5);
}

#[test]
fn module_from_file_and_prime_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = stdout(&run(&["cartier", "catalog", "--p", "3"]));
    let entries: serde_json::Value = serde_json::from_str(&alpha).unwrap();
    let module = entries.as_array().unwrap().iter().find(|e| e["name"] == "alpha_p").unwrap()["module"].clone();
    let path = dir.path().join("alpha3.json");
    std::fs::write(&path, module.to_string()).unwrap();
    let spec = format!("file:{}", path.display());
    let h = stdout(&run(&["cartier", "homotopy", "--module", &spec, "--dmax", "2"]));
    assert_eq!(h, "degree,invariant_factors\n0,Z/3\n1,Z/3\n2,Z/3\n");
    let wrong = run(&["cartier", "homotopy", "--p", "2", "--module", &spec]);
    assert_eq!(wrong.status.code(), Some(3));
}

#[test]
fn drw_csv() {
    let csv = stdout(&run(&["drw", "--p", "3", "--wittlen", "1", "--degcap", "4"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("witt_length,degree,degcap,invariant_factors,d_sha256,f_sha256,v_sha256"));
    assert!(lines.next().unwrap().starts_with("1,0,4,Z/3 + Z/3 + Z/3 + Z/3 + Z/3,"));
    assert!(lines.next().unwrap().starts_with("1,1,4,Z/3 + Z/3 + Z/3 + Z/3,"));
    let q = stdout(&run(&["drw", "--p", "2", "--wittlen", "2", "--degcap", "4", "--quotient", "1"]));
    let v: serde_json::Value = serde_json::from_str(&q).unwrap();
    assert!(v["h0"].is_string() && v["h2"].is_string());
}

#[test]
fn cache_dir_flag_overrides_environment() {
    let (flag, env) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let flag_s = flag.path().to_str().unwrap();
    let args = ["--cache-dir", flag_s, "witt", "add", "--p", "3", "--len", "2", "--ring", "F3", "--polys", "[1,0]", "[2,0]"];
    stdout(&run_in(env.path(), &args));
    assert!(flag.path().read_dir().unwrap().next().is_some());
    assert!(env.path().read_dir().unwrap().next().is_none());
    let env_only = ["witt", "add", "--p", "3", "--len", "2", "--ring", "F3", "--polys", "[1,0]", "[2,0]"];
    stdout(&run_in(env.path(), &env_only));
    assert!(env.path().read_dir().unwrap().next().is_some());
}

#[test]
fn verify_is_reproducible_without_timings() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "completion", "--p", "2,3", "--seed", "7", "--no-timings"];
    let a = stdout(&run_in(dir.path(), &args));
    let b = stdout(&run_in(dir.path(), &args));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["suite"], "completion");
    for case in v["cases"].as_array().unwrap() {
        assert_eq!(case["status"], "pass");
        assert_eq!(case["millis"], 0);
        assert!(case["paper_ref"].is_string());
    }
    let out = dir.path().join("report.json");
    let o = run_in(dir.path(), &["verify", "--suite", "drw", "--p", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["cases"][0]["id"], "C9-de-rham-witt");
}

#[test]
fn corrupt_cache_is_regenerated() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "oracle", "--p", "2"];
    stdout(&run_in(dir.path(), &["witt", "add", "--p", "2", "--len", "4", "--ring", "F2", "--polys", "[1,0,0,0]", "[1,0,0,0]"]));
    let files: Vec<_> = dir.path().read_dir().unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for f in &files {
        std::fs::write(f, "{\"p\": 2, \"truncated").unwrap();
    }
    let o = run_in(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stderr).contains("regenerat"), "{}", String::from_utf8_lossy(&o.stderr));
    for f in &files {
        assert!(std::fs::read_to_string(f).unwrap().starts_with('{'));
        assert!(std::fs::read_to_string(f).unwrap().len() > 100);
    }
}
