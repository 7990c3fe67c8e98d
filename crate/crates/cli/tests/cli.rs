use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rarefied::automata::{load_text, save_text};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rarefied"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn script(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scripts")
        .join(name)
}

#[test]
fn sums() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in [
        (["sum", "f", "3", "0", "8"], "6\n"),
        (["sum", "f", "3", "0", "0"], "0\n"),
        (["sum", "g", "3", "0", "2"], "2\n"),
        (["sum", "f", "3", "0", "87"], "55\n"),
    ] {
        let o = run(dir.path(), &args);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o), want, "{args:?}");
    }
}

#[test]
fn infer_saves_the_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["infer", "g30"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("g30: 18 states"), "{}", stdout(&o));
    let dfa = load_text(&std::fs::read_to_string(dir.path().join("out/g30.txt")).unwrap()).unwrap();
    assert_eq!(dfa.trimmed_state_count(), 18);
    // g30(2) = 2, written 2 in base 3
    assert!(dfa.accepts(&[2, 2]).unwrap());
    assert!(!dfa.accepts(&[2, 1]).unwrap());
}

#[test]
fn verify_one_claim() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "b34"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("[PASS] b34"));
    let report = std::fs::read_to_string(dir.path().join("out/reports/b34.txt")).unwrap();
    assert_eq!(report, stdout(&o));
}

#[test]
fn verify_unknown_id_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "thm99"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid value 'thm99'"));
    assert!(stdout(&o).is_empty());
}

#[test]
fn query_script() {
    let dir = tempfile::tempdir().unwrap();
    let path = script("f30.txt");
    let o = run(dir.path(), &["query", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let out = stdout(&o);
    let verdicts: Vec<&str> = out.lines().filter(|l| l.starts_with("test30_")).collect();
    assert_eq!(verdicts.len(), 7, "{out}");
    assert!(verdicts.iter().all(|l| l.ends_with(" TRUE")), "{out}");
}

#[test]
fn query_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.txt"), "").unwrap();
    let o = run(dir.path(), &["query", "empty.txt"]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());

    std::fs::write(
        dir.path().join("bad.txt"),
        "eval ok \"1=1\":\neval no \"An (n<1\":\n",
    )
    .unwrap();
    let o = run(dir.path(), &["query", "bad.txt"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("parse error at 2:"), "{}", stderr(&o));

    std::fs::write(dir.path().join("false.txt"), "eval nope \"An n=n+1\":\n").unwrap();
    let o = run(dir.path(), &["query", "false.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "nope FALSE\n");
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["export", "f30"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dot = std::fs::read_to_string(dir.path().join("out/f30.dot")).unwrap();
    let nodes = dot
        .lines()
        .filter(|l| {
            let l = l.trim_start();
            l.starts_with(|c: char| c.is_ascii_digit()) && !l.contains("->")
        })
        .count();
    assert_eq!(nodes, 16);

    let o = run(dir.path(), &["export", "f30", "--format", "txt"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("out/f30.txt")).unwrap();
    let dfa = load_text(&text).unwrap();
    assert_eq!(save_text(&dfa), text);
    assert!(dfa.accepts(&[87, 55]).unwrap());

    let o = run(dir.path(), &["export", "nothing"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no automaton named `nothing`"));
}

#[test]
fn table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["table", "f30", "--n-max", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("out/f30_table.csv");
    let first = std::fs::read(&path).unwrap();
    let csv = String::from_utf8(first.clone()).unwrap();
    assert!(!csv.contains('\r'));
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "n,h,pseudopower,lower,upper,ratio");
    assert_eq!(rows.len(), 102);
    let row1: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(row1[..2], ["1", "1"]);
    assert_eq!(row1[5].parse::<f64>().unwrap(), 1.0);
    let row87: Vec<&str> = rows[88].split(',').collect();
    assert_eq!(row87[..2], ["87", "55"]);

    let o = run(dir.path(), &["table", "f30", "--n-max", "100"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn output_directory_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["table", "g30", "--n-max", "5", "--out", "elsewhere"],
    );
    assert!(o.status.success());
    assert!(dir.path().join("elsewhere/g30_table.csv").exists());
    assert!(!dir.path().join("out").exists());
}
