//! End-to-end runs of the `fokas` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fokas_core::formats::{profile_to_string, Report};
use fokas_core::{read_field, read_profile, read_table, Axis, Profile, C64};
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Report,
    stderr: String,
}

fn fokas(dir: &Path, args: &[&str]) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_fokas"))
        .current_dir(dir)
        .args(["--set", "out_dir=out", "--set", "nodes_per_ray=16", "--set", "truncation_radius=2"])
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        report: Report::parse(&String::from_utf8_lossy(&out.stdout)),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write_profile(dir: &Path, name: &str, axis: Axis, h: f64, n: usize, f: impl Fn(f64) -> C64) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, profile_to_string(&Profile::from_fn(axis, h, n, f).unwrap())).unwrap();
    path
}

fn zero_inputs(dir: &Path) {
    let z = |_| C64::default();
    write_profile(dir, "u0.profile", Axis::X, 0.05, 101, z);
    for g in ["g0", "g1", "g2"] {
        write_profile(dir, &format!("{g}.profile"), Axis::Y, 0.01, 51, z);
    }
}

#[test]
fn scatter_of_zero_data_is_trivial() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    let r = fokas(d.path(), &["scatter", "u0.profile"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.get("failed"), Some("0"));
    let t = read_table(&d.path().join("out/spectral_x.table")).unwrap();
    let with_ab: Vec<_> = t.records.iter().filter(|x| x.a.is_some()).collect();
    assert!(!with_ab.is_empty());
    for rec in with_ab {
        assert_eq!(rec.a, Some(C64::new(1.0, 0.0)));
        assert_eq!(rec.b, Some(C64::default()));
    }
    let b = fokas(d.path(), &["boundary-scatter", "g0.profile", "g1.profile", "g2.profile"]);
    assert_eq!(b.code, 0, "{}", b.stderr);
    let t = read_table(&d.path().join("out/spectral_y.table")).unwrap();
    for rec in t.records.iter().filter(|x| x.big_a.is_some()) {
        assert_eq!(rec.big_a, Some(C64::new(1.0, 0.0)));
        assert_eq!(rec.big_b, Some(C64::default()));
    }
}

#[test]
fn missing_file_is_an_input_error_naming_the_path() {
    let d = TempDir::new().unwrap();
    let r = fokas(d.path(), &["scatter", "no_such.profile"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("no_such.profile"), "{}", r.stderr);
}

#[test]
fn mismatched_boundary_lengths_are_rejected() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    write_profile(d.path(), "short.profile", Axis::Y, 0.01, 40, |_| C64::default());
    let r = fokas(d.path(), &["boundary-scatter", "g0.profile", "short.profile", "g2.profile"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("mismatched"), "{}", r.stderr);
}

#[test]
fn bad_config_is_an_input_error() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    assert_eq!(fokas(d.path(), &["--set", "bogus=1", "scatter", "u0.profile"]).code, 2);
    assert_eq!(fokas(d.path(), &["--set", "L=-1", "scatter", "u0.profile"]).code, 2);
    fs::write(d.path().join("run.cfg"), "amplitude_guard=0.9\n").unwrap();
    assert_eq!(fokas(d.path(), &["--config", "run.cfg", "scatter", "u0.profile"]).code, 2);
}

#[test]
fn config_file_is_echoed_into_the_report() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    fs::write(d.path().join("run.cfg"), "# sweep\nseed=11\nrtol=1e-9\n").unwrap();
    let r = fokas(d.path(), &["--config", "run.cfg", "scatter", "u0.profile"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.get("config.seed"), Some("11"));
    assert_eq!(r.report.get("config.source"), Some("run.cfg"));
    let saved = Report::parse(&fs::read_to_string(d.path().join("out/scatter.report")).unwrap());
    assert_eq!(saved, r.report);
}

#[test]
fn trivial_tables_validate_and_solve_to_zero() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    assert_eq!(fokas(d.path(), &["scatter", "u0.profile"]).code, 0);
    assert_eq!(fokas(d.path(), &["boundary-scatter", "g0.profile", "g1.profile", "g2.profile"]).code, 0);
    let tables = ["out/spectral_x.table", "out/spectral_y.table"];
    let v = fokas(d.path(), &["validate", tables[0], tables[1]]);
    assert_eq!(v.code, 0, "{}", v.stderr);
    assert_eq!(v.report.get("status"), Some("pass"));
    assert_eq!(v.report.get("failed"), Some("0"));
    assert!(v.report.get("global_relation.outer_residual.status").is_some());

    let s = fokas(d.path(), &["solve", tables[0], tables[1], "--hx", "0.5", "--nx", "3", "--hy", "0.1", "--ny", "2"]);
    assert_eq!(s.code, 0, "{}", s.stderr);
    assert_eq!(s.report.get("family"), Some("principal"));
    let u = read_field(&d.path().join("out/u.field")).unwrap();
    assert_eq!((u.nx, u.ny), (3, 2));
    assert!(u.max_abs() < 1e-14);
}

#[test]
fn far_field_solve_warns() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    assert_eq!(fokas(d.path(), &["scatter", "u0.profile"]).code, 0);
    let s = fokas(d.path(), &["solve", "out/spectral_x.table", "--hx", "50", "--nx", "2"]);
    assert_eq!(s.code, 0, "{}", s.stderr);
    assert!(s.stderr.contains("warning"), "{}", s.stderr);
    assert!(s.report.get("warning.0").unwrap().contains("x up to 50"));
}

#[test]
fn oracle_of_zero_input_is_zero_and_traces_agree() {
    let d = TempDir::new().unwrap();
    zero_inputs(d.path());
    let cfg = ["--set", "x_max=5", "--set", "x_left=5", "--set", "hx=0.05", "--set", "L=0.01", "--set", "store_every=10"];
    let mut args = cfg.to_vec();
    args.extend(["oracle", "u0.profile"]);
    let r = fokas(d.path(), &args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let f = read_field(&d.path().join("out/oracle.field")).unwrap();
    assert_eq!(f.max_abs(), 0.0);
    let g0 = read_profile(&d.path().join("out/g0.profile")).unwrap();
    assert_eq!(g0.len(), f.ny);

    let t = fokas(d.path(), &["traces", "out/oracle.field"]);
    assert_eq!(t.code, 0, "{}", t.stderr);
    assert_eq!(read_profile(&d.path().join("out/g0.profile")).unwrap(), g0);
    assert_eq!(t.report.get("corner.max"), Some("0.000000e0"));
}

#[test]
fn unstable_step_is_refused_with_a_suggestion() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "bump.profile", Axis::X, 0.05, 201, |x| C64::new(0.1 * (-(x - 2.0) * (x - 2.0)).exp(), 0.0));
    let r = fokas(
        d.path(),
        &["--set", "scheme=direct", "--set", "hy=0.05", "--set", "store_every=1", "oracle", "bump.profile"],
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("try hy <="), "{}", r.stderr);
}

#[test]
fn amplitude_guard_is_enforced() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "big.profile", Axis::X, 0.05, 101, |x| C64::new(0.4 * (-(x - 2.0) * (x - 2.0)).exp(), 0.0));
    let r = fokas(d.path(), &["--set", "amplitude_guard=0.2", "oracle", "big.profile"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("amplitude_guard"), "{}", r.stderr);
}

#[test]
fn manufactured_mode_writes_a_convergence_table() {
    let d = TempDir::new().unwrap();
    let r = fokas(
        d.path(),
        &["--set", "L=0.05", "--set", "hx=0.2", "--set", "hy=2e-3", "--set", "x_max=14", "--set", "x_left=10", "oracle", "--manufactured"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    for i in 1..3 {
        let q: f64 = r.report.get(&format!("level.{i}.ratio")).unwrap().parse().unwrap();
        assert!((8.0..32.0).contains(&q), "level {i}: {q}");
    }
    let table = fs::read_to_string(d.path().join("out/manufactured.table")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn oracle_check_on_step_data_passes() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "steps.profile", Axis::X, 0.25, 17, |x| {
        if (1.0..2.0).contains(&x) {
            C64::new(0.3, -0.1)
        } else if (2.5..3.5).contains(&x) {
            C64::new(-0.2, 0.0)
        } else {
            C64::default()
        }
    });
    let r = fokas(d.path(), &["scatter", "--oracle-check", "steps.profile"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.get("oracle_check.ab.status"), Some("pass"));
    assert_eq!(r.report.get("oracle_check.steps"), Some("2"));
}

#[test]
fn zeros_of_small_data_are_absent() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "u0.profile", Axis::X, 0.1, 101, |x| C64::new(0.05 * (-(x - 3.0) * (x - 3.0)).exp(), 0.0));
    let r = fokas(d.path(), &["--set", "zero_radius=1.5", "zeros", "--initial", "u0.profile"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.get("zero_free"), Some("true"));
    assert_eq!(r.report.get("family"), Some("x"));
    assert!(d.path().join("out/residues.txt").exists());
}

#[test]
fn outputs_are_deterministic() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "u0.profile", Axis::X, 0.1, 101, |x| {
        C64::new(0.05 * (-(x - 3.0) * (x - 3.0)).exp(), 0.02 * (-(x - 4.0) * (x - 4.0)).exp())
    });
    assert_eq!(fokas(d.path(), &["scatter", "u0.profile", "-o", "first.table"]).code, 0);
    assert_eq!(fokas(d.path(), &["scatter", "u0.profile", "-o", "second.table"]).code, 0);
    assert_eq!(fs::read(d.path().join("first.table")).unwrap(), fs::read(d.path().join("second.table")).unwrap());
}

#[test]
fn validate_flags_structural_failures_with_exit_one() {
    let d = TempDir::new().unwrap();
    write_profile(d.path(), "u0.profile", Axis::X, 0.1, 101, |x| C64::new(0.05 * (-(x - 3.0) * (x - 3.0)).exp(), 0.0));
    assert_eq!(fokas(d.path(), &["scatter", "u0.profile"]).code, 0);
    let v = fokas(d.path(), &["validate", "out/spectral_x.table"]);
    let failed: usize = v.report.get("failed").unwrap().parse().unwrap();
    assert_eq!(v.code, if failed > 0 { 1 } else { 0 });
    assert_eq!(v.report.get("parity.a.status"), Some("pass"));
}
