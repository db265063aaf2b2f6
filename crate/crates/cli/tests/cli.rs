//! End-to-end tests that spawn the built binary and check exit codes and
//! output shapes.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn maghom() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maghom"))
}

fn write_graph(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("maghom-cli-test-{name}"));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const C5: &str = "n 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";
const P3: &str = "n 3\n0 1\n1 2\n";

#[test]
fn compute_tree_table() {
    let path = write_graph("p3.edges", P3);
    let out = maghom()
        .args(["compute"])
        .arg(&path)
        .args(["--lmax", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# maghom-csv v1\nk,l,rank,torsion\n"));
    assert!(text.contains("0,0,3,\n"));
    for l in 1..=3 {
        assert!(text.contains(&format!("{l},{l},4,\n")), "missing ({l},{l})");
    }
}

#[test]
fn compute_agrees_with_no_morse() {
    let path = write_graph("c5-cmp.edges", C5);
    let fast = maghom()
        .args(["compute"])
        .arg(&path)
        .args(["--lmax", "4"])
        .output()
        .unwrap();
    let slow = maghom()
        .args(["compute"])
        .arg(&path)
        .args(["--lmax", "4", "--no-morse"])
        .output()
        .unwrap();
    assert_eq!(fast.status.code(), Some(0));
    assert_eq!(stdout(&fast), stdout(&slow));
}

#[test]
fn diagonal_exit_codes() {
    let c5 = write_graph("c5.edges", C5);
    let p3 = write_graph("p3-diag.edges", P3);
    let out = maghom().arg("diagonal").arg(&c5).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("NonDiagonal girth-witness"));
    let out = maghom().arg("diagonal").arg(&p3).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("Diagonal"));
}

#[test]
fn girth_uses_inf_token() {
    let path = write_graph("p3-girth.edges", P3);
    let out = maghom().arg("girth").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("global,,inf\n"));
    assert!(text.contains("vertex,0,inf\n"));
    assert!(text.contains("edge,0-1,inf\n"));
}

#[test]
fn magnitude_with_oracle() {
    let path = write_graph("p3-mag.edges", P3);
    let out = maghom()
        .arg("magnitude")
        .arg(&path)
        .args(["--lmax", "3", "--oracle"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "# maghom-csv v1\nl,chi\n0,3\n1,-4\n2,4\n3,-4\n"
    );
}

#[test]
fn reads_graph_from_stdin() {
    let mut child = maghom()
        .args(["diagonal", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(C5.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_and_input_errors() {
    let out = maghom().arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = maghom().args(["compute", "/no/such/file"]).output().unwrap();
    assert_eq!(out.status.code(), Some(65));
    let empty = write_graph("empty.edges", "n 0\n");
    let out = maghom().arg("compute").arg(&empty).output().unwrap();
    assert_eq!(out.status.code(), Some(65));
    let out = maghom()
        .args(["er", "sim", "--n", "50", "--c", "0.5", "--p", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64), "c and p are exclusive");
    let out = maghom()
        .args(["er", "sim", "--n", "50", "--c", "bad:grid"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn er_sim_is_deterministic_and_shaped() {
    let args = [
        "er", "sim", "--n", "60", "--c", "0.4:0.8:0.2", "--trials", "40", "--seed", "7",
    ];
    let a = maghom().args(args).output().unwrap();
    let b = maghom().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# maghom-csv v1");
    assert_eq!(
        lines[1],
        "c,empirical,ci_lo,ci_hi,limit_formula,unresolved_fraction"
    );
    assert_eq!(lines.len(), 2 + 3, "three grid points");
    for row in &lines[2..] {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn er_out_file_and_records() {
    let dir = std::env::temp_dir();
    let curve = dir.join("maghom-cli-test-curve.csv");
    let records = dir.join("maghom-cli-test-records.csv");
    let out = maghom()
        .args(["er", "sim", "--n", "40", "--c", "0.5", "--trials", "10", "--seed", "3"])
        .arg("--out")
        .arg(&curve)
        .arg("--records-out")
        .arg(&records)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let curve = std::fs::read_to_string(curve).unwrap();
    assert!(curve.starts_with("# maghom-csv v1\n"));
    let records = std::fs::read_to_string(records).unwrap();
    assert_eq!(records.lines().count(), 2 + 10);
}

#[test]
fn er_cycles_and_wlln_and_pawful_run() {
    let out = maghom()
        .args(["er", "cycles", "--n", "80", "--c", "1", "--m", "5", "--trials", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().count() >= 2 + 3);
    let out = maghom()
        .args([
            "er", "wlln", "--n", "40", "--c", "0.5", "--trials", "5", "--lmax", "2", "--pairs",
            "1,1", "1,2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = maghom()
        .args(["er", "pawful", "--n", "30", "--p", "0.9", "--trials", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_passes_on_petersen_shape() {
    // Petersen graph as an explicit edge list.
    let petersen = "n 10\n0 1\n1 2\n2 3\n3 4\n4 0\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n9 6\n6 8\n8 5\n";
    let path = write_graph("petersen.edges", petersen);
    let out = maghom()
        .arg("verify")
        .arg(&path)
        .args(["--lmax", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("DiagonalRankAtVertex"));
    assert!(text.contains(",true\n"));
    assert!(!text.contains(",false\n"));
}

#[test]
fn verify_random_samples() {
    let out = maghom()
        .args(["verify", "--random", "8", "4", "--lmax", "3", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_format_parses() {
    let path = write_graph("c5-json.edges", C5);
    let out = maghom()
        .args(["--format", "json", "compute"])
        .arg(&path)
        .args(["--lmax", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["l_max"], 2);
    assert!(v["groups"].as_array().unwrap().len() >= 3);
    let out = maghom()
        .args(["--format", "json", "diagonal"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "NonDiagonal");
}

#[test]
fn workers_flag_accepted() {
    let path = write_graph("p3-workers.edges", P3);
    let out = maghom()
        .args(["--workers", "2", "compute"])
        .arg(&path)
        .args(["--lmax", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = maghom()
        .env("MAGHOM_WORKERS", "2")
        .arg("compute")
        .arg(&path)
        .args(["--lmax", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
