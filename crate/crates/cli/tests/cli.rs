//! End-to-end runs of the binary, one or more per exit path.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sweepoutlab"));
    c.env_remove("SWEEPOUTLAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A config small enough for tests, writing under `dir`.
fn small_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let body = format!(
        r#"seed = 5
output_dir = "{}"
{extra}

[samples]
global_max = 40
width = 60
width_mesh_checks = 2
genus = 10
appendix_a = 6
appendix_a_meshes = 1
equivariance = 40

[grids]
cubic_n = 24
parity_n = 96
plot_mesh_n = 24
"#,
        dir.join("out").display()
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

#[test]
fn mesh_equatorial_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mesh", "--proj", "0,0,0,1,0", "--a5", "0", "--grid-n", "32", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let area = v["area"]["value"].as_f64().unwrap();
    assert!((area - std::f64::consts::PI).abs() < 1e-3 * std::f64::consts::PI, "{area}");
    assert_eq!(v["genus"], 0);
    assert!(Path::new(v["mesh"]["path"].as_str().unwrap()).exists());
}

#[test]
fn mesh_phi5_three_roots_has_genus_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.ply");
    let o = run(&["mesh", "--phi5", "0,0,-0.6,0.1,1,0.3", "--format", "ply", "--output", file.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["genus"], 1);
    assert_eq!(v["profile"]["kind"], "ThreeSimple");
    assert!(std::fs::read(&file).unwrap().starts_with(b"ply"));
}

#[test]
fn mesh_rotation_and_negative_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mesh", "--proj", "-0.2,0.1,0,1,-0.3", "--a5", "0.2", "--rot", "1,1,0,0", "--grid-n", "24", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn mesh_singular_point_exits_2_and_names_it() {
    let o = run(&["mesh", "--proj", "1,0,0,0,0", "--a5", "0.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("(0.000000, 0.000000, 0.000000)"), "{}", stderr(&o));
}

#[test]
fn mesh_crossing_planes_exit_2() {
    let o = run(&["mesh", "--proj", "1,0,0,0,0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn mesh_bad_arguments_exit_2() {
    assert_eq!(code(&run(&["mesh", "--proj", "0,0,1"])), 2);
    assert_eq!(code(&run(&["mesh", "--proj", "0,0,0,0,0"])), 2);
    assert_eq!(code(&run(&["mesh", "--proj", "0,0,0,1,0", "--a5", "2"])), 2);
    assert_eq!(code(&run(&["mesh", "--proj", "0,0,0,1,0", "--grid-n", "4"])), 2);
    assert_eq!(code(&run(&["mesh"])), 2);
}

#[test]
fn mesh_unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("m.obj");
    let o = run(&["mesh", "--proj", "0,0,0,1,0", "--grid-n", "24", "--output", target.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn verify_width_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "a5_list = [0.01]");
    let o = run(&["verify", "width", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let out = dir.path().join("out/width");
    for f in ["report.json", "records_a5_0.01.csv", "mesh_checks_a5_0.01.csv", "config.toml", "metadata.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn verify_width_at_a5_zero_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "a5_list = [0.0]");
    let o = run(&["verify", "width", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "a5_list = [0.01, 0.05]");
    let out = dir.path().join("out/width");
    let snapshot = || -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            // metadata carries timestamps, the config copy records the thread override
            .filter(|p| !["metadata.json", "config.toml"].contains(&p.file_name().unwrap().to_str().unwrap()))
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    assert_eq!(code(&run(&["verify", "width", cfg.to_str().unwrap()])), 0);
    let first = snapshot();
    assert_eq!(code(&bin().args(["verify", "width", cfg.to_str().unwrap()]).env("SWEEPOUTLAB_THREADS", "2").output().unwrap()), 0);
    assert_eq!(first, snapshot());
    assert_eq!(first.len(), 5);
}

#[test]
fn verify_small_campaigns_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    for campaign in ["global-max", "cubic-lemma", "genus", "appendixA", "equivariance"] {
        let o = run(&["verify", campaign, cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{campaign}: {}{}", stdout(&o), stderr(&o));
        assert!(dir.path().join("out").join(campaign).join("report.json").exists());
    }
}

#[test]
fn verify_parity_table_prints_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let o = run(&["verify", "parity-table", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    for row in ["A0", "A1", "A2", "A3", "A4"] {
        assert!(text.contains(row), "{text}");
    }
    assert!(!text.contains("MISMATCH"));
}

#[test]
fn verify_seed_and_out_flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let other = dir.path().join("elsewhere");
    let o = run(&["--seed", "99", "--out", other.to_str().unwrap(), "verify", "equivariance", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let copied = std::fs::read_to_string(other.join("equivariance/config.toml")).unwrap();
    assert!(copied.contains("seed = 99"), "{copied}");
}

#[test]
fn verify_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    assert_eq!(code(&run(&["verify", "no-such-campaign", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["verify", "width", dir.path().join("absent.toml").to_str().unwrap()])), 2);
    let bad = small_config(dir.path(), "eps2 = 1e-7");
    assert_eq!(code(&run(&["verify", "width", bad.to_str().unwrap()])), 2);
    let typo = small_config(dir.path(), "sede = 3");
    assert_eq!(code(&run(&["verify", "width", typo.to_str().unwrap()])), 2);
    let o = bin().args(["verify", "equivariance", cfg.to_str().unwrap()]).env("SWEEPOUTLAB_THREADS", "0").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "not a directory").unwrap();
    let cfg = small_config(dir.path(), "");
    let o = run(&["--out", blocker.to_str().unwrap(), "verify", "equivariance", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn plot_data_table1_annotations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let o = run(&["plot-data", "table1", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = dir.path().join("out/plot-data/table1");
    let dat = std::fs::read_to_string(out.join("table1.dat")).unwrap();
    let row = |set: &str, b3: &str, s: &str| {
        dat.lines().find(|l| l.starts_with(&format!("{set} {b3}")) && l.split(' ').nth(2) == Some(s)).unwrap_or_else(|| panic!("{dat}")).to_string()
    };
    assert!(row("printed", "0.100000000", "0.05").contains("OneSimple"));
    assert!(row("printed", "0.407000000", "0.3").contains("OneSimple"));
    assert!(row("corrected", "-0.407162642", "0.05").contains("SimplePlusDouble"));
    let three = row("corrected", "-0.600000000", "0.3");
    assert!(three.contains("ThreeSimple") && three.contains(" 3 1 "), "{three}");
    assert!(out.join("printed_b3_0.10000_s_0.05.obj").exists());
    assert!(out.join("table1_profiles.dat").exists());
}

#[test]
fn plot_data_phi1_figure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "a5_list = [0.01]");
    let o = run(&["plot-data", "phi1-figure", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dat = std::fs::read_to_string(dir.path().join("out/plot-data/phi1-figure/area_curve.dat")).unwrap();
    let rows: Vec<Vec<f64>> = dat.lines().skip(1).map(|l| l.split(' ').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 181);
    // every member of the pencil stays below 2π, the plane z = 0 has area π
    assert!(rows.iter().all(|r| r[3] + r[4] < 2.0 * std::f64::consts::PI));
    assert!((rows[90][3] - std::f64::consts::PI).abs() <= rows[90][4] + 1e-12);
}

#[test]
fn plot_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    assert_eq!(code(&run(&["plot-data", "figure9", cfg.to_str().unwrap()])), 2);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    assert_eq!(code(&run(&["--out", blocker.to_str().unwrap(), "plot-data", "table1", cfg.to_str().unwrap()])), 1);
}
