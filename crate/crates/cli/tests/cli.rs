use std::path::Path;
use std::process::{Command, Output};

fn srpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srpb")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verify(path: &Path) -> Output {
    srpb(&["verify", "--cert", path.to_str().unwrap()])
}

#[test]
fn decompose_reports_apex_and_pieces() {
    let o = srpb(&["complex", "decompose", "--vertices", "3", "--facets", "0,1;1,2;0,2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("apex 0\n"));
}

#[test]
fn normal_form_drops_nonface_terms() {
    let o = srpb(&["ring", "nf", "--vars", "2", "--ideal", "x0*x1", "--poly", "(x0+x1)^2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "x0^2 + x1^2");
}

#[test]
fn syntax_errors_are_input_errors_with_offsets() {
    let o = srpb(&["ring", "nf", "--vars", "2", "--poly", "x0 + "]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 5"));
}

#[test]
fn unknown_flags_are_rejected() {
    assert_eq!(code(&srpb(&["complex", "faces", "--vertices", "2", "--bogus"])), 2);
}

#[test]
fn square_check_on_a_simplex_is_a_precondition_failure() {
    let o = srpb(&["square", "check", "--vertices", "2", "--facets", "0,1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn extend_certificate_verifies_and_a_corrupted_copy_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.cert");
    let o = srpb(&[
        "extend", "--vertices", "2", "--facets", "0;1",
        "--matrix", "1, x0; 0, 0",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&verify(&path)), 0);

    let text = std::fs::read_to_string(&path).unwrap();
    let at = text.find("\nmatrix M").unwrap();
    let bad = format!("{}{}", &text[..at], text[at..].replacen("\nx0\n", "\n2*x0\n", 1));
    assert_ne!(bad, text);
    let bad_path = dir.path().join("bad.cert");
    std::fs::write(&bad_path, bad).unwrap();
    let o = verify(&bad_path);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("failed"));
}

#[test]
fn stub_oracle_leaves_an_obligation() {
    let o = srpb(&[
        "extend", "--vertices", "3", "--facets", "0,1;1,2;0,2",
        "--matrix", "1, x0; 0, 0", "--oracle", "stub",
    ]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("obligation"));
}

#[test]
fn umrow_lift_certificate_re_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.cert");
    let o = srpb(&[
        "umrow", "lift", "--vars", "2", "--ideal", "x0*x1",
        "--row", "1+x0*x1, x0, x0^2", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&verify(&path)), 0);
}

#[test]
fn empty_certificate_passes_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.cert");
    std::fs::write(&path, "srpb/1\nend\n").unwrap();
    let o = verify(&path);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("warning"));
}

#[test]
fn missing_certificate_file_is_an_input_error() {
    assert_eq!(code(&verify(Path::new("/nonexistent/cert"))), 2);
}
