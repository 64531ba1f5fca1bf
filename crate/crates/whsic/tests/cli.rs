//! End-to-end tests of the `whsic` binary: file round trips, exit codes,
//! and determinism.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use whsic::files::{ReportFile, VectorFile};
use whsic::linalg::{cr, CVec};
use whsic::sicframes::known_fiducial;

fn whsic_bin() -> &'static str {
    env!("CARGO_BIN_EXE_whsic")
}

fn run(args: &[&str]) -> Output {
    Command::new(whsic_bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn report_of(output: &Output) -> ReportFile {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is a report: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

fn write_known_fiducial(dir: &Path, d: usize) -> PathBuf {
    let path = dir.join(format!("fiducial_d{d}.json"));
    let fid = known_fiducial(d).unwrap();
    VectorFile::fiducial(fid.vector(), BTreeMap::new())
        .write(&path)
        .unwrap();
    path
}

#[test]
fn gen_basis_verify_project_chain() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("basis.json");
    let basis_str = basis.to_str().unwrap();

    let generated = run(&["gen-basis", "-d", "3", "--canonical", "--out", basis_str]);
    assert_eq!(generated.status.code(), Some(0));
    assert!(report_of(&generated).pass);

    let verified = run(&["verify", basis_str]);
    assert_eq!(verified.status.code(), Some(0));
    let verify_report = report_of(&verified);
    assert!(verify_report.pass);
    assert_eq!(verify_report.command, "verify");
    assert!(verify_report
        .checks
        .iter()
        .all(|c| c.pass && !c.value.is_empty()));

    let projected = run(&["project", basis_str]);
    assert_eq!(projected.status.code(), Some(0));
    let project_report = report_of(&projected);
    assert!(project_report.pass);
    assert_eq!(project_report.results["schmidt_rank"], serde_json::json!(2));
}

#[test]
fn written_files_reparse_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("basis.json");
    let basis_str = basis.to_str().unwrap();
    let status = run(&["gen-basis", "-d", "4", "--seed", "11", "--out", basis_str]);
    assert_eq!(status.status.code(), Some(0));

    // The CLI's own reader accepts the file, and a decode/encode round trip
    // reproduces the same bytes.
    let file = VectorFile::read(&basis).unwrap();
    let v = file.to_vector().unwrap();
    let again = VectorFile::basis_vector(&v, file.d, file.metadata.clone());
    assert_eq!(
        serde_json::to_string(&again).unwrap(),
        serde_json::to_string(&file).unwrap()
    );
}

#[test]
fn gen_basis_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for path in [&first, &second] {
        let out = run(&[
            "gen-basis",
            "-d",
            "4",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "same seed must produce identical files"
    );
}

#[test]
fn search_reports_are_deterministic_up_to_wall_clock() {
    let normalize = |output: Output| -> String {
        let mut report = report_of(&output);
        report.elapsed_seconds = 0.0;
        report.to_json().unwrap()
    };
    let args = ["search", "-d", "2", "--restarts", "3", "--seed", "5"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(normalize(first), normalize(second));
}

#[test]
fn search_writes_a_verifying_fiducial() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("found.json");
    let out_str = out.to_str().unwrap();
    let searched = run(&[
        "search",
        "-d",
        "2",
        "--restarts",
        "8",
        "--seed",
        "1",
        "--refine",
        "--tol",
        "1e-12",
        "--out",
        out_str,
    ]);
    assert_eq!(searched.status.code(), Some(0));
    assert!(report_of(&searched).pass);

    let verified = run(&["verify", "--tol", "1e-12", out_str]);
    assert_eq!(
        verified.status.code(),
        Some(0),
        "refined output verifies strictly"
    );
}

#[test]
fn lift_and_stff_accept_a_sic_fiducial() {
    let dir = tempfile::tempdir().unwrap();
    let fiducial = write_known_fiducial(dir.path(), 3);
    let fiducial_str = fiducial.to_str().unwrap();
    let basis = dir.path().join("lifted.json");

    let lifted = run(&["lift", fiducial_str, "--out", basis.to_str().unwrap()]);
    assert_eq!(lifted.status.code(), Some(0));
    assert!(report_of(&lifted).pass);

    let projected = run(&["project", basis.to_str().unwrap()]);
    let project_report = report_of(&projected);
    assert_eq!(
        project_report.results["schmidt_rank"],
        serde_json::json!(1),
        "lifted frame vectors are product states"
    );

    let stff = run(&["stff", fiducial_str, "--geometric"]);
    assert_eq!(stff.status.code(), Some(0));
    let stff_report = report_of(&stff);
    assert!(stff_report.pass);
    assert!(stff_report
        .checks
        .iter()
        .any(|c| c.name == "geometric_equality_residual"));

    let custom = run(&["stff", fiducial_str, "--matrix", "0,1,1,0"]);
    assert_eq!(custom.status.code(), Some(0));
}

#[test]
fn verification_failures_exit_one_with_a_failing_report() {
    let dir = tempfile::tempdir().unwrap();

    // A product basis vector e₀⊗e₁ is unit but not a basis fiducial.
    let mut v = CVec::zeros(9);
    v[1] = cr(1.0);
    let bad_basis = dir.path().join("bad_basis.json");
    VectorFile::basis_vector(&v, 3, BTreeMap::new())
        .write(&bad_basis)
        .unwrap();
    let verified = run(&["verify", bad_basis.to_str().unwrap()]);
    assert_eq!(verified.status.code(), Some(1));
    assert!(!report_of(&verified).pass);

    // Lifting a non-SIC fiducial fails and attaches the component Gram.
    let mut e0 = CVec::zeros(3);
    e0[0] = cr(1.0);
    let bad_fiducial = dir.path().join("bad_fiducial.json");
    VectorFile::fiducial(&e0, BTreeMap::new())
        .write(&bad_fiducial)
        .unwrap();
    let lifted = run(&["lift", bad_fiducial.to_str().unwrap()]);
    assert_eq!(lifted.status.code(), Some(1));
    let lift_report = report_of(&lifted);
    assert!(!lift_report.pass);
    assert!(lift_report.results.contains_key("component_gram_class_0"));

    // A search that cannot converge reports no solution.
    let searched = run(&["search", "-d", "3", "--restarts", "1", "--max-iter", "5"]);
    assert_eq!(searched.status.code(), Some(1));
    let search_report = report_of(&searched);
    assert!(!search_report.pass);
    assert!(search_report.results.contains_key("failure"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    // Dimension too small.
    let out = dir.path().join("x.json");
    let small = run(&[
        "gen-basis",
        "-d",
        "1",
        "--canonical",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(small.status.code(), Some(2));

    // Missing source flag (clap usage error).
    let no_source = run(&["gen-basis", "-d", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(no_source.status.code(), Some(2));

    // Unknown subcommand.
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    // Missing file.
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["verify", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );

    // Truncated JSON.
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, "{\"d\": 3, \"kind\": \"fidu").unwrap();
    assert_eq!(
        run(&["verify", truncated.to_str().unwrap()]).status.code(),
        Some(2)
    );

    // Fusion frames in even dimension are rejected.
    let f2 = write_known_fiducial(dir.path(), 2);
    assert_eq!(run(&["stff", f2.to_str().unwrap()]).status.code(), Some(2));

    // Lattice matrix with the wrong determinant.
    let f3 = write_known_fiducial(dir.path(), 3);
    let bad_det = run(&["stff", f3.to_str().unwrap(), "--matrix", "1,0,0,1"]);
    assert_eq!(bad_det.status.code(), Some(2));
}

#[test]
fn report_flag_writes_the_stdout_report() {
    let dir = tempfile::tempdir().unwrap();
    let fiducial = write_known_fiducial(dir.path(), 3);
    let report_path = dir.path().join("report.json");
    let output = run(&[
        "verify",
        "--report",
        report_path.to_str().unwrap(),
        fiducial.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let written = std::fs::read_to_string(&report_path).unwrap();
    assert_eq!(written.as_bytes(), &output.stdout[..]);
}

#[test]
fn warm_start_accepts_a_lifted_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let fiducial = write_known_fiducial(dir.path(), 3);
    let basis = dir.path().join("lifted.json");
    let lifted = run(&[
        "lift",
        fiducial.to_str().unwrap(),
        "--out",
        basis.to_str().unwrap(),
    ]);
    assert_eq!(lifted.status.code(), Some(0));

    let searched = run(&[
        "search",
        "-d",
        "3",
        "--restarts",
        "1",
        "--warm-start",
        basis.to_str().unwrap(),
    ]);
    assert_eq!(
        searched.status.code(),
        Some(0),
        "warm start from the solution converges"
    );
    let report = report_of(&searched);
    assert!(report.pass);
}
