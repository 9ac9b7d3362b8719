use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cacforge"));
    c.env_remove("CACFORGE_GOLDEN_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cacforge-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn golden_src() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

#[test]
fn classify_middle_table() {
    let o = run(&[
        "classify",
        "--taxonomy",
        "middle",
        "--lambda",
        "12.24",
        "--tau0",
        "1.42",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 81);
    let classes: std::collections::BTreeSet<&str> =
        rows.iter().map(|r| r.split(',').nth(3).unwrap()).collect();
    assert_eq!(classes.len(), 7);
    assert!(text.contains("middle,uuuuu,1,C0,1.0759"));
}

#[test]
fn classify_side_and_legacy() {
    let o = run(&["classify", "--taxonomy", "side"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 27 + 27);
    let o = run(&["classify", "--taxonomy", "legacy"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 9);
    assert!(stdout(&o).contains("dud,D4,"));
}

#[test]
fn classify_rejects_small_lambda() {
    let o = run(&["classify", "--lambda", "2", "--taxonomy", "middle"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("lambda"));
    let o = run(&["classify", "--sweep", "2:5", "--taxonomy", "middle"]);
    assert!(!o.status.success());
}

#[test]
fn side_sweep() {
    let o = run(&["classify", "--sweep", "1:13", "--taxonomy", "side"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let at = |tax: &str, lambda: &str| -> Vec<String> {
        text.lines()
            .filter(|l| l.starts_with(&format!("{tax},{lambda},")))
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect()
    };
    assert!(at("wire2", "13").iter().all(|v| v == "true"));
    assert!(at("wire1", "13").iter().all(|v| v == "true"));
    assert!(at("wire1", "7").iter().all(|v| v == "false"));
    assert_eq!(at("wire2", "13").len(), 5);
}

#[test]
fn check_mode_reports_differences() {
    let o = run(&["classify", "--check", "--taxonomy", "middle"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert_eq!(
        text.lines()
            .filter(|l| l.contains(",coefficients,"))
            .count(),
        1
    );
    assert!(!text.contains(",partition,") && !text.contains(",class,"));
    // a loose tolerance leaves only the printed coefficient erratum
    let o = run(&["classify", "--check", "--taxonomy", "middle", "--tol", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stdout(&o).contains(",delay,"));
}

#[test]
fn build_examples() {
    let words = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with('#')).count();
    let o = run(&["build", "--constraint", "C2,1C", "--n", "10", "--prune"]);
    assert!(o.status.success());
    assert_eq!(words(&o), 12);
    let o = run(&["build", "--family", "FPC", "--n", "8"]);
    assert_eq!(words(&o), 68);
    let o = run(&["build", "--constraint", "C0,0C", "--n", "8"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unsupported"));
    let o = run(&["build", "--constraint", "C3,1C", "--n", "4"]);
    assert!(!o.status.success());
    let o = run(&["build", "--family", "OLC", "--n", "9", "--prune"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_verify() {
    let o = run(&["build", "--constraint", "C4,2C", "--n", "9", "--verify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("0 violating pairs"));
    assert!(err.contains("D^16 = 2D^15 - D^14 + D^12: holds"));
    assert!(err.contains("equivalences (40 checks): hold"));
}

#[test]
fn build_writes_file_read_by_eval() {
    let dir = scratch("files");
    let path = dir.join("iolc10.txt");
    let o = run(&[
        "build",
        "--constraint",
        "C2,1C",
        "--n",
        "10",
        "--prune",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = run(&["eval", "--files", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains(",10,12,3,"));
}

#[test]
fn eval_ordering_and_shape() {
    let o = run(&["eval", "--codebooks", "iolc10,olc10", "--lambda", "12.24"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let summary: Vec<&str> = text.split("\n\n").nth(1).unwrap().lines().skip(1).collect();
    let worst = |code: &str| -> f64 {
        summary
            .iter()
            .find(|l| l.starts_with(code))
            .unwrap()
            .split(',')
            .nth(5)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(worst("IOLC") < worst("OLC"));

    let o = run(&["eval", "--codebook", "iolc16"]);
    let wires = stdout(&o)
        .split("\n\n")
        .next()
        .unwrap()
        .lines()
        .filter(|l| l.starts_with("IOLC,16,"))
        .count();
    assert_eq!(wires, 16);

    let o = run(&["eval", "--sizes", "5:16"]);
    assert_eq!(stdout(&o).lines().count(), 13);
    let o = run(&["eval"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn codec_streams() {
    let args = ["codec", "--constraint", "C3,1C", "--n", "10"];
    let enc = |input: &str| run_with_input(&[&args[..], &["--encode"]].concat(), input);
    let o = enc("0x0\n");
    assert_eq!(stdout(&o), "0000000000\n");
    let data: String = (0..16).map(|x| format!("0x{x:x}\n")).collect();
    let words = stdout(&enc(&data));
    let o = run_with_input(&[&args[..], &["--decode"]].concat(), &words);
    assert_eq!(stdout(&o), data);
    let o = enc("0x10\n");
    assert!(!o.status.success());

    let o = run_with_input(
        &["codec", "--constraint", "C2,1C", "--n", "5", "--decode"],
        "01010\n",
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not a member"));
}

#[test]
fn golden_dir_from_environment() {
    let dir = scratch("golden");
    for f in ["middle.json", "side_wire2.json", "side_wire1.json"] {
        std::fs::copy(golden_src().join(f), dir.join(f)).unwrap();
    }
    let embedded = run(&["classify", "--taxonomy", "side"]);
    let o = bin()
        .args(["classify", "--taxonomy", "side"])
        .env("CACFORGE_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(o.stdout, embedded.stdout);

    std::fs::write(dir.join("side_wire1.json"), "{}").unwrap();
    let o = bin()
        .args(["classify", "--taxonomy", "side"])
        .env("CACFORGE_GOLDEN_DIR", &dir)
        .output()
        .unwrap();
    assert!(!o.status.success());
    let missing = scratch("missing");
    let o = run(&["classify", "--golden-dir", missing.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn config_file() {
    let dir = scratch("config");
    let cfg = dir.join("bus.toml");
    std::fs::write(&cfg, "tau0_ps = 2.84\nlambda = 12.24\n").unwrap();
    let o = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    // delays scale with τ0
    assert!(stdout(&o).contains("middle,uuuuu,1,C0,2.15"));
    std::fs::write(&cfg, "lambda = 2.0\n").unwrap();
    let o = run(&["classify", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    let o = run(&[
        "classify",
        "--config",
        cfg.to_str().unwrap(),
        "--lambda",
        "5",
    ]);
    assert!(o.status.success());
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert!(!run(&["classify", "--config", cfg.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn output_is_deterministic_and_json_parses() {
    for args in [
        &["eval", "--codebooks", "iolc10,c21:10,olc10", "--json"][..],
        &["classify", "--taxonomy", "side", "--json"][..],
        &["seeds", "--constraint", "C5,3C", "--json"][..],
        &["build", "--family", "FOC", "--n", "7", "--json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert!(!v.is_null());
    }
}

#[test]
fn seeds_command() {
    let o = run(&["seeds", "--constraint", "C4,2C"]);
    assert!(stdout(&o).starts_with("# (C4,2C): 1 maximum clique(s) of size 16"));
    let o = run(&["seeds", "--constraint", "C0,0C"]);
    assert!(!o.status.success());
}
