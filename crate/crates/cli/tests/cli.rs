use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden")
        .join(name)
}

fn lctrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lctrs"))
        .args(args)
        .env_remove("LCTRS_SOLVER")
        .output()
        .expect("run lctrs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp_file(src: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".lctrs").tempfile().unwrap();
    f.write_all(src.as_bytes()).unwrap();
    f
}

#[test]
fn rewrite_prints_the_redex_step() {
    let o = lctrs(&["rewrite", golden("redex.lctrs").to_str().unwrap(), "start"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(
        "→[rho @ e] (cterm :logical (y':Int) (g y') :exists (x:Int) :guard (and (> x 0) (and (>= x 0) (> y' x))))"
    ));
}

#[test]
fn rewrite_json_is_machine_readable() {
    let o = lctrs(&["--json", "rewrite", golden("redex.lctrs").to_str().unwrap(), "start"]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ds = j["derivations"].as_array().unwrap();
    assert_eq!(ds.len(), 2);
    assert_eq!(ds[1]["steps"][0]["position"], "e");
    assert_eq!(ds[1]["steps"][0]["matcher"]["x'"], "x:Int");
}

#[test]
fn equiv_exit_codes() {
    let f = golden("ex1_1.lctrs");
    let f = f.to_str().unwrap();
    assert_eq!(lctrs(&["equiv", f, "g3", "gx"]).status.code(), Some(1));
    assert_eq!(lctrs(&["equiv", f, "gx", "gx"]).status.code(), Some(0));
    let inline = "(cterm :logical (y:Int) (g y) :guard (>= y 3))";
    assert_eq!(lctrs(&["equiv", f, "gx", inline]).status.code(), Some(0));
}

#[test]
fn subsume_reports_a_counterexample() {
    let f = golden("ex1_1.lctrs");
    let o = lctrs(&["subsume", f.to_str().unwrap(), "gx", "g3", "--finite", "-1:5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(g 4)"));
    let o = lctrs(&["subsume", f.to_str().unwrap(), "g3", "gx", "--finite", "-1:5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_flags_ill_formed_declarations() {
    assert_eq!(lctrs(&["check", golden("lvf.lctrs").to_str().unwrap()]).status.code(), Some(0));
    let bad = temp_file("(sort T :term)\n(fun f (Int) T :term)\n(cterm a :logical (x:Int) (f x) :guard (> x y))\n");
    let o = lctrs(&["check", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn deferred_derivation_reaches_goal() {
    let f = golden("lvf.lctrs");
    let o = lctrs(&["derive", f.to_str().unwrap(), "fx", "--goal", "zero", "--defer"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("reachable"));
    let o = lctrs(&["derive", f.to_str().unwrap(), "fx", "--goal", "f0", "--defer", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn translations() {
    let f = golden("ext_rmv.lctrs");
    let f = f.to_str().unwrap();
    let o = lctrs(&["ext", f, "nq2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(":exists (z:Int)"));
    let o = lctrs(&["rmv", f, "ec2"]);
    assert!(stdout(&o).contains(":logical (x:Int y:Int z:Int)"));
    let o = lctrs(&["lvf", golden("lvf.lctrs").to_str().unwrap(), "rho"]);
    assert_eq!(stdout(&o).trim(), "(rule rho :lvars (y:Int) (f y) 0 :guard (and true (= y 0)))");
    let o = lctrs(&["pg", golden("ex1_1.lctrs").to_str().unwrap(), "g3"]);
    assert!(stdout(&o).contains("(g w)"));
}

#[test]
fn props_runs_and_rejects_unknown_theorems() {
    let o = lctrs(&["props", "--theorems", "WD,EQMAP", "--count", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("EQMAP"));
    let o = lctrs(&["props", "--theorems", "NOPE"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lctrs(&["props", "--theorems", "UNIQ", "--count", "200", "--mutation", "skip-freshening"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solver_budget_and_override() {
    let f = golden("ex1_1.lctrs");
    let f = f.to_str().unwrap();
    let o = lctrs(&["--budget", "2", "equiv", f, "g3", "gx"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lctrs(&["--solver", "finite:0:4", "equiv", f, "g3", "gx"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lctrs(&["--solver", "nonsense", "equiv", f, "g3", "gx"]);
    assert_eq!(o.status.code(), Some(2));
}
