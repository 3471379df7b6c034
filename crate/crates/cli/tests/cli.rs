use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const REGEN: &str = "HYPFILL_UPDATE_GOLDEN";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hypfill"));
    c.env_remove("HYPFILL_THREADS");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Compare against `tests/golden/<name>`; rewrite it when the regeneration flag is set.
fn golden(name: &str, actual: &str) {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var(REGEN).is_ok_and(|v| v == "1") {
        fs::write(&p, actual).unwrap();
        return;
    }
    let want = fs::read_to_string(&p).unwrap_or_else(|_| panic!("missing golden {}; rerun with {REGEN}=1", p.display()));
    assert_eq!(actual, want, "golden mismatch for {name}");
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn tall_family_writes_mesh_and_height() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["family", "tall", "--C", "0.5", "--a", "0", "--res", "64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ell: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("ell = "))
        .expect("height printed")
        .parse()
        .unwrap();
    assert!(ell > std::f64::consts::PI);
    for f in ["tall_rectangle.obj", "tall_rectangle_vertices.csv", "tall_rectangle_triangles.csv", "tall_rectangle_profile.csv"] {
        assert!(d.path().join(f).exists(), "{f}");
    }
    let obj = fs::read_to_string(d.path().join("tall_rectangle.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64 * 64);
    let m = manifest(d.path());
    assert_eq!(m["command"], "family");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["config"]["res"], 64);
    assert!(m["summary"]["profile"]["exceeds_pi"].as_bool().unwrap());
}

#[test]
fn slice_is_planar_with_zero_residual() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["family", "slice", "--t", "2", "--res", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(d.path());
    assert_eq!(m["summary"]["residual"]["sup"], 0.0);
    let verts = fs::read_to_string(d.path().join("horizontal_slice_vertices.csv")).unwrap();
    assert!(verts.lines().skip(1).all(|l| l.ends_with(",2")));
    golden("slice_t2_res8.obj", &fs::read_to_string(d.path().join("horizontal_slice.obj")).unwrap());
}

#[test]
fn catenoid_below_half_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["family", "catenoid", "--C", "0.4"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"], "validation_error");
    assert!(err["message"].as_str().unwrap().contains("1/2"));
    assert_eq!(manifest(d.path())["status"], "validation_error");
}

#[test]
fn tall_table_matches_golden() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["table", "tall", "--linspace", "0.1,0.9,9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("table_tall.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.lines().skip(1).all(|l| l.contains(",pass,")));
    golden("table_tall.csv", &csv);
}

#[test]
fn catenoid_table_matches_golden() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["table", "catenoid", "--logspace", "0.6,50,8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("table_catenoid.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",pass,")));
    golden("table_catenoid.csv", &csv);
}

#[test]
fn table_rows_fail_independently() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["table", "catenoid", "--values", "0.4,1,5"]);
    assert_eq!(o.status.code(), Some(2));
    let csv = fs::read_to_string(d.path().join("table_catenoid.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(rows[0].starts_with("0.4,,,error,"));
    assert!(rows[1..].iter().all(|l| l.contains(",pass,")));
}

#[test]
fn empty_grid_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["table", "tall"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));
}

#[test]
fn tables_are_deterministic_across_thread_counts() {
    let mut out = Vec::new();
    for threads in ["1", "4", "1"] {
        let d = tempfile::tempdir().unwrap();
        let o = bin()
            .env("HYPFILL_THREADS", threads)
            .arg("--out")
            .arg(d.path())
            .args(["table", "catenoid", "--logspace", "0.51,60,25"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(manifest(d.path())["config"]["threads"], threads.parse::<u64>().unwrap());
        out.push(fs::read(d.path().join("table_catenoid.csv")).unwrap());
    }
    assert!(out.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn bad_thread_count_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let o = bin()
        .env("HYPFILL_THREADS", "many")
        .arg("--out")
        .arg(d.path())
        .args(["table", "tall", "--values", "0.5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn constant_data_solves_to_constant() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["solve", "--problem", data("const5.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("solution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 33 * 33);
    assert!(csv.lines().skip(1).all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() == 5.0));
    let log: Value = serde_json::from_str(&fs::read_to_string(d.path().join("convergence.json")).unwrap()).unwrap();
    assert_eq!(log["converged"], true);
    assert!(log["iterations"].as_u64().unwrap() <= 2);
    let m = manifest(d.path());
    assert_eq!(m["config"]["tol"], 1e-8);
    assert_eq!(m["config"]["max_iter"], 50);
    assert!(m["config"]["inputs"][0].as_str().unwrap().ends_with("const5.json"));
}

#[test]
fn bump_respects_maximum_principle_and_grid_flag() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["solve", "--problem", data("bump.json").to_str().unwrap(), "--grid", "41x49"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(d.path().join("solution.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 41 * 49);
    let u: Vec<f64> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(u.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));
}

#[test]
fn solver_failures_map_to_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["solve", "--problem", data("mismatch.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("corner"));

    let o = run(d.path(), &["solve", "--problem", data("bump.json").to_str().unwrap(), "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(d.path().join("solution.csv").exists());
    assert_eq!(manifest(d.path())["status"], "numerical_failure");

    let o = run(d.path(), &["solve", "--problem", data("const5.json").to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn butterfly_reports_short_component() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["classify", "--curve", data("butterfly.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("status: short_not_tall"), "{s}");
    assert!(s.contains("short component over theta = -0.1"), "{s}");
    golden("classify_butterfly.json", &fs::read_to_string(d.path().join("classify.json")).unwrap());
}

#[test]
fn twisted_curve_is_fillable() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["classify", "--curve", data("twisted.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("status: fillable_by_criterion"));
}

#[test]
fn geodesic_sets_are_classified() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("set.json");
    fs::write(&p, r#"{"equator_arcs":[{"from":"inf","to":"inf","full":true}],"poles":[],"chambers":[]}"#).unwrap();
    let o = run(d.path(), &["classify", "--geodesic", "--curve", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("equator"), "{}", stdout(&o));
}

#[test]
fn malformed_curve_is_a_validation_error() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("bad.json");
    fs::write(&p, r#"{"segments":[{"kind":"vertical","at":0.0,"from":0.0,"to":1.0}]}"#).unwrap();
    let o = run(d.path(), &["classify", "--curve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn traced_slice_is_the_equator() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["family", "slice", "--res", "64"]);
    assert!(o.status.success());
    let mesh = d.path().join("horizontal_slice.obj");
    let o = run(d.path(), &["trace", "--mesh", mesh.to_str().unwrap(), "--radius", "1", "--bins", "90"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t: Value = serde_json::from_str(&fs::read_to_string(d.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(t["type"]["type"], "equator");
    assert_eq!(t["oscillation"], "ok");

    let o = run(d.path(), &["trace", "--mesh", mesh.to_str().unwrap(), "--radius", "50"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("cfg.json");
    fs::write(&cfg, r#"{"res": 12, "tol": 1e-9}"#).unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--out").arg(d.path()).args(["family", "slice"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(d.path())["config"]["res"], 12);
    let o = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(d.path())
        .args(["family", "slice", "--res", "9"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(manifest(d.path())["config"]["res"], 9);

    fs::write(&cfg, r#"{"resolution": 12}"#).unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--out").arg(d.path()).args(["family", "slice"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

/// Known failures of the acceptance suite; `accept` must exit nonzero while any remain.
const KNOWN_FAILURES: [&str; 1] = ["1b"];

#[test]
fn accept_reports_every_criterion() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["accept"]);
    let s = stdout(&o);
    print!("{s}");
    let failed: Vec<String> = s
        .lines()
        .filter(|l| l.starts_with("FAIL"))
        .map(|l| l.split(['[', ']']).nth(1).unwrap().to_string())
        .collect();
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 9);
    assert_eq!(failed, KNOWN_FAILURES);
    assert_eq!(o.status.code(), Some(if failed.is_empty() { 0 } else { 3 }));
    let report: Value = serde_json::from_str(&fs::read_to_string(d.path().join("acceptance.json")).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 9);
}
