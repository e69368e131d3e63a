//! End-to-end runs of the `pencils` binary: exit codes, output and
//! reproducible reports.

use fitting_pencils::io;
use fitting_pencils::linalg::{Mat, Vct};
use fitting_pencils::models::{self, SpacelikePlaneH22};
use fitting_pencils::symplectic::SymplecticSpace;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencils")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pencils-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn frame_file(name: &str, m: &Mat) -> String {
    let text = serde_json::to_string(&io::FrameJson { frame: io::rows(m) }).unwrap();
    scratch(name, &text).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn maslov_of_the_positive_normal_form_is_n() {
    let sp = SymplecticSpace::standard(2);
    let t = sp.normal_form_triple(&[1.0, 1.0]);
    let f: Vec<String> = t.iter().enumerate().map(|(i, l)| frame_file(&format!("l{i}.json"), &l.frame)).collect();
    let o = bin(&["lagrangian", "maslov", "--l1", &f[0], "--l2", &f[1], "--l3", &f[2]]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
    let t = sp.normal_form_triple(&[1.0, -1.0]);
    let f: Vec<String> = t.iter().enumerate().map(|(i, l)| frame_file(&format!("m{i}.json"), &l.frame)).collect();
    let o = bin(&["lagrangian", "maslov", "--l1", &f[0], "--l2", &f[1], "--l3", &f[2]]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn malformed_input_and_bad_usage_have_distinct_codes() {
    let bad = scratch("bad.json", "{\"frame\": [[1, 0], [0");
    let o = bin(&["lagrangian", "maslov", "--l1", bad.to_str().unwrap(), "--l2", bad.to_str().unwrap(), "--l3", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let missing = bin(&["pencil", "classify", "--pencil", "/nonexistent/pencil.json"]);
    assert_eq!(missing.status.code(), Some(3));
    assert_eq!(bin(&["lagrangian", "maslov", "--bogus"]).status.code(), Some(64));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(64));
    let help = bin(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("pencil"));
}

#[test]
fn exit_code_follows_the_report_status() {
    let maximal = models::spacelike_plane_pencil(&SpacelikePlaneH22::standard()).unwrap();
    let p = scratch("maximal.json", &serde_json::to_string(&io::pencil_json(&maximal.basis)).unwrap());
    let o = bin(&["pencil", "classify", "--pencil", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("winding"));
    // span{I, diag(1, 0, 0, 0)} contains a definite form, so it is not mixed
    let definite = [Mat::identity(4, 4), Mat::from_diagonal(&Vct::from_row_slice(&[1.0, 0.0, 0.0, 0.0]))];
    let p = scratch("definite.json", &serde_json::to_string(&io::pencil_json(&definite)).unwrap());
    assert_eq!(bin(&["pencil", "classify", "--pencil", p.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = std::env::temp_dir().join(format!("pencils-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let rep = dir.join("rep.json");
    let o = bin(&["rep", "build", "--kind", "schottky", "--embed", "irr", "--n", "2", "--out", rep.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("gap{k}.json"));
        let o = bin(&["rep", "anosov-gap", "--rep", rep.to_str().unwrap(), "--maxlen", "6", "--seed", "7", "--threads", "2", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let v: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(v["seed"], 7);
    let a = stdout(&bin(&["flow", "fibration", "--n", "1", "--embed", "irr", "--samples", "10", "--limit", "3", "--seed", "5", "--threads", "3", "--json"]));
    let b = stdout(&bin(&["flow", "fibration", "--n", "1", "--embed", "irr", "--samples", "10", "--limit", "3", "--seed", "5", "--threads", "1", "--json"]));
    assert_eq!(a, b);
}

#[test]
fn render_writes_an_svg() {
    let input = scratch("conic.json", r#"{"quadrics": [[[1, 0, 0], [0, 1, 0], [0, 0, -1]]], "hermitian": [[1, -4, 0, 0]]}"#);
    let out = input.with_file_name("conic.svg");
    let o = bin(&["render", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path"));
}
