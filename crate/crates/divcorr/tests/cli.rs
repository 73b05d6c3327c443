use std::path::PathBuf;
use std::process::{Command, Output};

fn divcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divcorr")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bad_config_exits_2() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "A = 1/0\n").unwrap();
    let out = divcorr(&["tau", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/0"));

    let out = divcorr(&["tau", "--set", "no_such_key=3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(divcorr(&["--definitely-not-a-flag"]).status.code(), Some(2));
    assert_eq!(divcorr(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_local_is_reproducible() {
    let (j1, j2) = (scratch("local1.json"), scratch("local2.json"));
    let args = |p: &PathBuf| {
        vec![
            "verify-local".to_string(),
            "--profile".into(),
            "small".into(),
            "--seed".into(),
            "5".into(),
            "--set".into(),
            "count=3".into(),
            "--set".into(),
            "witness=1".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    for p in [&j1, &j2] {
        let a = args(p);
        let out = divcorr(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let (a, b) = (std::fs::read(&j1).unwrap(), std::fs::read(&j2).unwrap());
    assert_eq!(a, b);
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["schema"], "divcorr-report/1");
    assert_eq!(doc["mode"], "verify-local");
    // three per kind plus one witness per kind
    assert_eq!(doc["summary"]["total"], 20);
    assert_eq!(doc["summary"]["failed"], 0);
    assert_eq!(doc["settings"]["seed"], "5");
}

#[test]
fn compare_writes_rows() {
    let (json, csv) = (scratch("cmp.json"), scratch("cmp.csv"));
    let out = divcorr(&[
        "compare",
        "--set",
        "T=200",
        "--set",
        "X=2000",
        "--set",
        &format!("csv={}", csv.display()),
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("identity") && stdout.contains("recipe-vs-sum"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let methods: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods.len(), 3);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["summary"]["passed"], 5);
}

#[test]
fn tight_recipe_tolerance_fails_with_exit_1() {
    let out = divcorr(&["compare", "--set", "recipe_tol=1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fail  recipe-vs-sum"));
}

#[test]
fn multiplicity_small() {
    let out = divcorr(&["multiplicity", "--set", "kmax=4", "--set", "star_kmax=2", "--set", "star_grid=1,2,6,12"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("k=4 l=2"));
    assert!(stdout.contains("multiplicity 13/13 checks passed"), "{stdout}");
}

#[test]
fn tau_mode() {
    let out = divcorr(&["tau", "--set", "A=0,0", "--set", "n=1,6,12"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("n=12") && stdout.contains("value=6"), "{stdout}");
}
