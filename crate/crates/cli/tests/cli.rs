use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

fn explode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_explode")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn scratch(name: &str, contents: &str) -> tempfile::TempPath {
    let mut f = tempfile::Builder::new().suffix(name).tempfile().unwrap();
    std::io::Write::write_all(&mut f, contents.as_bytes()).unwrap();
    f.into_temp_path()
}

fn manifests() -> Vec<PathBuf> {
    let mut all: Vec<PathBuf> = std::fs::read_dir(fixtures().join("manifests"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "manifest"))
        .collect();
    all.sort();
    all
}

#[test]
fn projective_plane_betti_lines() {
    let o = explode(&["--format", "machine", "cohomology", &fixture("manifests/p2.manifest")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "dimension 4\nbetti 0 1\nbetti 2 1\nbetti 4 1\n");
    let text = stdout(&explode(&["cohomology", &fixture("manifests/p2.manifest")]));
    assert!(text.contains("betti 0 1\nbetti 2 1\nbetti 4 1\n"), "{text}");
}

#[test]
fn every_fixture_manifest_passes_cohomology_and_duality() {
    let all = manifests();
    assert!(all.len() >= 6);
    for m in all {
        let m = m.display().to_string();
        let o = explode(&["cohomology", &m]);
        assert_eq!(code(&o), 0, "{m}: {}", stderr(&o));
        let o = explode(&["pd-check", &m]);
        assert_eq!(code(&o), 0, "{m}: {}", stderr(&o));
        assert!(stdout(&o).contains("verified"));
    }
}

#[test]
fn empty_and_malformed_input_exit_one_with_positions() {
    let empty = scratch(".manifest", "");
    let o = explode(&["cohomology", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains(":1:1:"), "{}", stderr(&o));

    let bad = scratch(".manifest", "[chart a]\nn = 0\n1 x >= 0\n");
    let o = explode(&["cohomology", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains(":3:3:"), "{}", stderr(&o));

    let form = scratch(".form", "# note\nchart: n=0 m=1; 1 >= 0\nform: bump(0, 1, r) * dth ^ \n");
    let o = explode(&["stokes", form.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));

    let o = explode(&["cohomology", "/nonexistent/file.manifest"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn refinement_output_is_deterministic_and_matches_the_fixtures() {
    for name in ["p1", "p2", "p1xp1", "hirzebruch1"] {
        let fan = fixture(&format!("fans/{name}.fan"));
        let a = explode(&["refine", &fan]);
        let b = explode(&["refine", &fan]);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
        let stored = std::fs::read_to_string(fixture(&format!("manifests/{name}.manifest"))).unwrap();
        assert_eq!(stdout(&a), stored);
    }
}

#[test]
fn winding_form_is_annotated_not_refuted() {
    let o = explode(&["stokes", &fixture("forms/winding.form")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("hypothesis violated"), "{out}");
    assert!(out.contains("6.283185"), "{out}");
}

#[test]
fn admissible_forms_verify() {
    for f in ["collar", "gaussian_strip", "bump_circle"] {
        let o = explode(&["--format", "machine", "stokes", &fixture(&format!("forms/{f}.form"))]);
        assert_eq!(code(&o), 0, "{f}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).ends_with("status verified\n"));
    }
}

#[test]
fn forms_without_compact_support_can_refute() {
    // no longer zero at the open end r -> +inf, so Stokes does not apply
    let form = scratch(".form", "chart: n=0 m=1; 1 >= 0\n(1 - step(0, 1, r)) * dth\n");
    let o = explode(&["stokes", form.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("refuted"));
}

#[test]
fn chart_flags_override_the_file() {
    let form = scratch(".form", "exp(x) * bump(0, 1, r) * dr ^ dth\n");
    let o = explode(&["stokes", form.to_str().unwrap(), "--chart", "n=1 m=1; 1 >= 0; -1 >= -1", "--boundary", "0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("6.283185"));
}

#[test]
fn pairing_on_the_square() {
    let o = explode(&["--format", "machine", "pair", "n=0 m=2; 1 0 >= 0; -1 0 >= -1; 0 1 >= 0; 0 -1 >= -1", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("rank 2"));
    let o = explode(&["pair", "n=0 m=1; 1 x= 0", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn orientation_fixtures() {
    for f in ["transverse", "line_in_plane"] {
        let o = explode(&["orient", &fixture(&format!("maps/{f}.maps"))]);
        assert_eq!(code(&o), 0, "{f}: {}", stderr(&o));
    }
    let o = explode(&["--format", "machine", "orient", &fixture("maps/line_in_plane.maps")]);
    assert!(stdout(&o).contains("swap_sign -1"));
    let parallel = scratch(".maps", "f = 1; 0\ng = 1; 0\n");
    assert_eq!(code(&explode(&["orient", parallel.to_str().unwrap()])), 1);
}

#[test]
fn fiber_fixtures() {
    for f in ["radial_gaussian", "skew_gaussian", "torus_factor", "square_family"] {
        let o = explode(&["fiber-check", &fixture(&format!("fibers/{f}.fiber"))]);
        assert_eq!(code(&o), 0, "{f}: {}{}", stdout(&o), stderr(&o));
    }
    let o = explode(&["fiber-check", &fixture("fibers/slanted_ray.fiber")]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("surjectivity"), "{}", stderr(&o));
}

#[test]
fn output_is_byte_for_byte_repeatable() {
    let args = ["--format", "machine", "fiber-check", &fixture("fibers/torus_factor.fiber")];
    let args: Vec<&str> = args.iter().map(|s| &**s).collect();
    assert_eq!(explode(&args).stdout, explode(&args).stdout);
}
