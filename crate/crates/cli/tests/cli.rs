//! End-to-end tests driving the compiled binary: exit codes, artifact
//! layout, determinism, and dump round-trips.

use std::path::Path;
use std::process::{Command, Output};

use navier_series::field::io::read_dump;
use navier_series::TrigPoly64;

const BIN: &str = env!("CARGO_BIN_EXE_navier-series");

fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(dir).env_remove("NAVIER_SERIES_OUT");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_taylor_green_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["validate", "taylor_green", "--nu", "0.1", "--order", "8"],
        &[],
    );
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS"));
    assert!(dir.path().join("out/validation.json").is_file());
}

#[test]
fn corrupted_order_fails_validation_and_names_the_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "validate",
            "taylor_green",
            "--nu",
            "0.1",
            "--order",
            "6",
            "--corrupt-order",
            "3",
        ],
        &[],
    );
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("order 3"), "{}", stdout(&out));
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "no_such_file.cfg"], &[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.cfg"),
        "problem.preset = zero\nproblem.nu = 0\nproblem.order = 2\nproblem.bogus = 1\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "bad.cfg"], &[]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("problem.bogus"));
}

#[test]
fn unknown_preset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["validate", "vortex", "--nu", "0.1", "--order", "4"],
        &[],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 6\noutputs.dir = artifacts\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "tg.cfg"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let base = dir.path().join("artifacts");
    assert!(base.join("orders.csv").is_file());
    assert!(base.join("radius.json").is_file());
    // Velocity orders 0..=6 and pressure orders 0..6.
    assert!(base.join("fields/u_0.trig").is_file());
    assert!(base.join("fields/w_6.trig").is_file());
    assert!(base.join("fields/p_5.trig").is_file());
    assert!(!base.join("fields/p_6.trig").exists());
}

#[test]
fn env_var_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 4\noutputs.dir = ignored\n",
    )
    .unwrap();
    let target = dir.path().join("elsewhere");
    let out = run_in(
        dir.path(),
        &["run", "tg.cfg"],
        &[("NAVIER_SERIES_OUT", target.to_str().unwrap())],
    );
    assert_eq!(exit_code(&out), 0);
    assert!(target.join("orders.csv").is_file());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn random_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "problem.preset = random\nproblem.nu = 0.05\nproblem.order = 5\n\
               problem.seed = 42\nproblem.k_max = 2\n";
    std::fs::write(dir.path().join("r.cfg"), cfg).unwrap();
    let read_all = |out_dir: &str| {
        let base = dir.path().join(out_dir).join("fields");
        let mut blobs = Vec::new();
        let mut names: Vec<_> = std::fs::read_dir(&base)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            blobs.push((name.clone(), std::fs::read(base.join(name)).unwrap()));
        }
        blobs
    };
    for out_dir in ["a", "b"] {
        let out = run_in(
            dir.path(),
            &["run", "r.cfg"],
            &[("NAVIER_SERIES_OUT", out_dir)],
        );
        assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read_all("a"), read_all("b"), "artifacts must be reproducible");
}

#[test]
fn trig_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 2\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "tg.cfg"], &[]);
    assert_eq!(exit_code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("out/fields/u_0.trig")).unwrap();
    let parsed = TrigPoly64::parse_dump(&text).unwrap();
    let expected = navier_series::oracle::ExactFlow::taylor_green(0.1)
        .initial_velocity()
        .x
        .clone();
    assert!(parsed.sub(&expected).max_norm() < 1e-15);
}

#[test]
fn grid_run_writes_readable_binary_fields() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 3\n\
         problem.backend = grid\ngrid.n = 16\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "tg.cfg"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("out/fields/u_0.field");
    let mut file = std::fs::File::open(path).unwrap();
    let dump = read_dump(&mut file).unwrap();
    let field = dump.to_grid_field().unwrap();
    assert_eq!(field.spec().dims(), [16, 16, 16]);
    assert!((field.max_norm() - 1.0).abs() < 1e-12);
}

#[test]
fn radius_on_run_output_reports_unbounded_hint() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 10\n",
    )
    .unwrap();
    assert_eq!(exit_code(&run_in(dir.path(), &["run", "tg.cfg"], &[])), 0);
    let out = run_in(dir.path(), &["radius", "out"], &[]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Viscous decay of a single harmonic: ratio estimates trend to zero.
    assert_eq!(json["radius_lower_hint"]["kind"], "unbounded");
    assert!(json["note"].as_str().unwrap().contains("empirical"));
}

#[test]
fn radius_without_run_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["radius", "missing"], &[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn poisson_oracle_reports_calibrated_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["poisson-oracle", "--half-width", "8", "--n", "32"],
        &[],
    );
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["pass"], true);
    let err = json["relative_max_error"].as_f64().unwrap();
    let bound = json["calibrated_bound"].as_f64().unwrap();
    assert!(err > 0.0 && err <= bound);
}

#[test]
fn poisson_oracle_rejects_tiny_domain() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["poisson-oracle", "--half-width", "2", "--n", "16"],
        &[],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn zero_initial_field_yields_zero_dumps() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("zero.cfg"),
        "problem.preset = zero\nproblem.nu = 0.1\nproblem.order = 3\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "zero.cfg"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for n in 0..=3 {
        let text = std::fs::read_to_string(dir.path().join(format!("out/fields/u_{n}.trig")))
            .unwrap();
        let p = TrigPoly64::parse_dump(&text).unwrap();
        assert_eq!(p.max_norm(), 0.0);
    }
}

#[test]
fn run_diagnostics_norms_match_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tg.cfg"),
        "problem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 10\n\
         outputs.fields = false\n",
    )
    .unwrap();
    assert_eq!(exit_code(&run_in(dir.path(), &["run", "tg.cfg"], &[])), 0);
    let csv = std::fs::read_to_string(dir.path().join("out/orders.csv")).unwrap();
    let mut factorial = 1.0f64;
    for (n, line) in csv.lines().skip(1).enumerate() {
        if n > 0 {
            factorial *= n as f64;
        }
        let norm: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        let expected = 0.2f64.powi(n as i32) / factorial;
        assert!(
            (norm - expected).abs() <= 1e-10 * expected,
            "order {n}: norm {norm} vs expected {expected}"
        );
    }
}

#[test]
fn euler_inline_modes_run() {
    let dir = tempfile::tempdir().unwrap();
    // Planar shear u = (sin y, 0, 0): divergence-free inline initial data.
    std::fs::write(
        dir.path().join("inline.cfg"),
        "problem.nu = 0\nproblem.order = 4\n\
         problem.mode = 0 1 0 u 0 -0.5\nproblem.mode = 0 -1 0 u 0 0.5\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["run", "inline.cfg"], &[]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
