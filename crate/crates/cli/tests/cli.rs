use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noetherkit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}):\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_file(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn describe_kepler() {
    let out = run(&["describe", "kepler3d"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("n = 3"));
    assert!(text.contains("Lambda = "));
    assert!(text.contains("regularity"));
}

#[test]
fn malformed_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "bad.sys", "[system]\nname = bad\ncoords = q\nlagrangian = 0.5*qdot^^2\n");
    let out = run(&["describe", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn unknown_flag_is_an_input_error() {
    let out = run(&["solve", "freeparticle", "qdot", "--mode", "sideways"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn degenerate_lagrangian_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "deg.sys", "[system]\nname = deg\ncoords = q\nlagrangian = qdot\n");
    let out = run(&["describe", &path]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn simplest_onflow_solution_for_free_particle_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let triple = dir.path().join("t.triple");
    let out = run(&["solve", "freeparticle", "qdot", "--mode", "onflow-simplest", "--out", triple.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["triple"]["tau"], "-2/qdot");
    assert_eq!(v["triple"]["xi"][0], "-2");
    assert_eq!(v["triple"]["f"], "0");
    assert_eq!(v["verification"]["verdict"], "PASS");

    // the written file verifies on its own
    let out = run(&["verify", "freeparticle", triple.to_str().unwrap(), "--integral", "qdot"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn strong_solution_for_runge_lenz() {
    let out = run(&["solve", "kepler3d", "lrl_u", "--mode", "strong", "--tau", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["triple"]["form"], "strong");
    assert_eq!(v["triple"]["tau"], "0");
    assert_eq!(v["verification"]["verdict"], "PASS");
}

#[test]
fn alternative_strong_solution() {
    let out = run(&["solve", "freeparticle", "energy", "--mode", "alt-strong", "--c", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["triple"]["form"], "alt-strong");
}

#[test]
fn non_conserved_integral_is_rejected() {
    let out = run(&["solve", "freeparticle", "q", "--mode", "onflow-simplest"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn vanishing_lagrangian_is_reported() {
    // velocities pinned at 0, so L = qdot^2/2 is zero on the whole box
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(dir.path(), "v.sys", "[system]\nname = v\ncoords = q\nlagrangian = 0.5*qdot^2\nrange.qdot = 0, 0\n");
    let out = run(&["solve", &path, "qdot", "--mode", "onflow-simplest"]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));
}

#[test]
fn verify_corpus_triples() {
    let out = run(&["verify", "kepler3d", "xi_z", "--form", "onflow"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["report"]["verdict"], "PASS");

    let out = run(&["verify", "kepler3d", "lrl_strong", "--form", "strong", "--integral", "lrl_u"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn on_flow_triple_fails_strong_check_with_witness() {
    let out = run(&["verify", "freeparticle", "gamma6", "--form", "strong"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["report"]["verdict"], "FAIL");
    assert!(v["report"]["worst_point"]["qddot"].is_number());
    assert!(stderr(&out).contains("qddot"), "{}", stderr(&out));

    let out = run(&["verify", "freeparticle", "gamma6", "--form", "onflow", "--integral", "galilei"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn integrate_free_particle_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = run(&[
        "integrate", "freeparticle", "--q0", "0.5", "--qdot0", "-0.25", "--t1", "2", "--dt", "0.01",
        "--monitor", "galilei,energy", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let q = v["final"]["q"][0].as_f64().unwrap();
    assert!((q - 0.0).abs() < 1e-12, "q(2) = {q}");
    for d in v["drift"].as_array().unwrap() {
        assert!(d["max_abs"].as_f64().unwrap() < 1e-12);
    }
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,q1,qdot1"));
    assert_eq!(lines.count(), 201);
}

#[test]
fn kepler_circular_orbit_drift() {
    let out = run(&[
        "integrate", "kepler3d", "--q0", "1,0,0", "--qdot0", "0,1,0", "--t1", "6.283185307179586",
        "--dt", "0.001", "--monitor", "energy,l3,lrl_u",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let q = &v["final"]["q"];
    let r = (q[0].as_f64().unwrap().powi(2) + q[1].as_f64().unwrap().powi(2)).sqrt();
    assert!((r - 1.0).abs() < 1e-6, "|r| = {r}");
    for d in v["drift"].as_array().unwrap() {
        assert!(d["max_abs"].as_f64().unwrap() < 1e-9, "{d}");
    }
}

#[test]
fn radial_plunge_is_truncated() {
    let out = run(&["integrate", "kepler3d", "--q0", "1,0,0", "--qdot0", "0,0,0", "--t1", "5"]);
    assert_eq!(code(&out), 6, "{}", stderr(&out));
    let v = json(&out);
    assert!(v["truncated"]["t"].as_f64().unwrap() < 1.2);
}

#[test]
fn fixed_seed_is_reproducible() {
    let args = ["verify", "kepler3d", "levy_leblond", "--seed", "7", "--k", "50"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["report"]["seed"], 7);
}

#[test]
fn corpus_listing_and_export() {
    let out = run(&["corpus", "list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["freeparticle", "kepler3d", "isochrony:inverse-cube:0"] {
        assert!(text.contains(name));
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("iso.sys");
    let out = run(&["corpus", "export", "isochrony:radical-neg", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["verify", path.to_str().unwrap(), "n3_onflow", "--integral", "n3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = run(&["corpus", "export", "nonesuch"]);
    assert_eq!(code(&out), 2);
}
