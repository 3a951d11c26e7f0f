use std::path::Path;
use std::process::{Command, Output};
use thermo1d::bounds::{gamma1, gamma2, BaseConstants};
use thermo1d::Material;

fn thermo1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermo1d"))
        .args(args)
        .env_remove("THERMO1D_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn value(stdout: &str, name: &str) -> f64 {
    stdout
        .lines()
        .find_map(|l| {
            let (k, rest) = l.split_once('=')?;
            (k.trim() == name).then(|| rest.split('#').next().unwrap().trim().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{name}` line in\n{stdout}"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn constants_match_the_bounds_module() {
    let out = thermo1d(&[
        "constants",
        "--eta",
        "0.5",
        "--K",
        "1",
        "--omega",
        "0,1",
        "--material",
        "identity",
    ]);
    assert!(out.status.success(), "{out:?}");
    let s = String::from_utf8(out.stdout).unwrap();
    let base = BaseConstants::for_interval(0.0, 1.0, &Material::identity()).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(value(&s, "Gamma1"), gamma1(0.5, 1.0, &base).unwrap()) < 1e-9);
    assert!(rel(value(&s, "Gamma2"), gamma2(1.0, &base).unwrap()) < 1e-9);
    assert!(rel(value(&s, "c1"), base.c1) < 1e-9);
    assert!(rel(value(&s, "c2"), base.c2) < 1e-9);
    assert_eq!(value(&s, "c4"), 0.0);
}

#[test]
fn unknown_subcommand_prints_usage_and_exits_2() {
    let out = thermo1d(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_errors_exit_2_and_list_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "[solver]\nepsilon = -1\nscheme = rk4\n");
    let out = thermo1d(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3: solver.scheme"), "{err}");
}

#[test]
fn equilibrium_run_keeps_energy_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("eq.cfg");
    write(
        &cfg,
        "[grid]\nn_cells = 32\n[solver]\nt_end = 0.25\n[initial_data]\nkind = equilibrium\ntheta = 1.5\n[output]\nrecord_every = 8\n",
    );
    let out_dir = dir.path().join("out");
    let out = thermo1d(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let energies: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 17);
    for e in &energies {
        assert!((e - 1.5).abs() <= 1e-14, "{e}");
    }
    // steps 8 and 16 plus the initial state
    assert_eq!(
        std::fs::read_dir(out_dir.join("snapshots"))
            .unwrap()
            .count(),
        3
    );
}

#[test]
fn failing_checks_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    write(&cfg, "[grid]\nn_cells = 16\n[solver]\nt_end = 0.5\n");
    let out = thermo1d(&[
        "energy-audit",
        "--config",
        cfg.to_str().unwrap(),
        "--tol",
        "1e-14",
        "--output",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
    assert!(dir.path().join("o/report.json").exists());
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_thermo1d"))
        .args(["time-shift", "--shifts", "0.05", "--plot"])
        .env("THERMO1D_OUTPUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let d = dir.path().join("time-shift");
    for f in [
        "report.json",
        "summary.txt",
        "time_shift.csv",
        "plot_time_shift.gp",
    ] {
        assert!(d.join(f).exists(), "{f}");
    }
}
