use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SAT: &str = "p cnf 3 4\n1 2 3 0\n1 -2 3 0\n-1 2 3 0\n-1 -2 -3 0\n";
const FIVE: &str = "p cnf 3 5\n1 2 3 0\n1 2 -3 0\n1 -2 3 0\n-1 2 3 0\n-1 -2 -3 0\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamereduce"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup(files: &[(&str, &str)]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn degree_reduction_keeps_satisfiability() {
    let dir = setup(&[("in.cnf", SAT)]);
    let o = run(dir.path(), &["to-3sat5", "in.cnf", "out.cnf", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("3sat5 ok"));
    let o = run(dir.path(), &["value", "exact", "out.cnf"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("value 1\n"), "{}", stdout(&o));
}

#[test]
fn unsatisfiable_value_is_below_one() {
    let dir = setup(&[("u.cnf", "p cnf 1 2\n1 0\n-1 0\n")]);
    let o = run(dir.path(), &["value", "exact", "u.cnf"]);
    assert!(stdout(&o).starts_with("value 1/2\n"), "{}", stdout(&o));
}

#[test]
fn built_instance_verifies() {
    let dir = setup(&[("in.cnf", FIVE)]);
    let o = run(dir.path(), &["build-slc", "in.cnf", "inst.slc", "--J", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["verify-slc", "inst.slc", "--J", "2", "--subsets", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("smoothness ok"));
}

#[test]
fn violation_exits_two_with_witness() {
    let dir = setup(&[("in.cnf", FIVE)]);
    run(dir.path(), &["build-slc", "in.cnf", "inst.slc", "--J", "1"]);
    let o = run(dir.path(), &["verify-slc", "inst.slc", "--J", "50", "--subsets", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("smoothness FAIL"));
    assert!(stdout(&o).contains(" at vertex "));
}

#[test]
fn identity_clf_pads_to_uniform() {
    let dir = setup(&[("toy.clf", "clf 2 2 1 1\nlevel 1 id\nlevel 2 id\n")]);
    let o = run(dir.path(), &["clm", "pad", "toy.clf", "--check-marginals"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("uniform marginal 1/20"), "{text}");
    assert!(text.contains("marginals uniform"));
}

#[test]
fn transport_values_agree() {
    let clf = "clf 2 2 1 1\nlevel 1 id\nlevel 2 table\nwhen 0 : 0\nwhen 1 : 1\nclf 2 2 1 1\nlevel 1 zero\nlevel 2 id\n";
    let dir = setup(&[("two.clf", clf)]);
    let o = run(dir.path(), &["clm", "transport", "two.clf", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = setup(&[]);
    assert_eq!(run(dir.path(), &["bogus"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["to-3sat5"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["value", "exact", "missing.cnf"]).status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let dir = setup(&[("in.cnf", FIVE)]);
    run(dir.path(), &["to-3sat5", "in.cnf", "a.cnf", "--seed", "3"]);
    run(dir.path(), &["--threads", "1", "to-3sat5", "in.cnf", "b.cnf", "--seed", "3"]);
    let a = fs::read(dir.path().join("a.cnf")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.cnf")).unwrap());
    let clf = "clf 3 1 2\nlevel 1 id\n";
    fs::write(dir.path().join("c.clf"), clf).unwrap();
    let x = stdout(&run(dir.path(), &["clm", "sample", "c.clf", "--seed", "5", "--count", "50"]));
    let y = stdout(&run(dir.path(), &["clm", "sample", "c.clf", "--seed", "5", "--count", "50"]));
    assert_eq!(x, y);
    assert_eq!(x.lines().count(), 50);
}

#[test]
fn report_goes_to_out_file() {
    let dir = setup(&[("in.cnf", FIVE)]);
    let o = run(dir.path(), &["--out", "r.txt", "two-orac", "in.cnf", "t.csx"]);
    assert!(stdout(&o).is_empty());
    let r = fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(r.contains("variable degrees"));
}
