use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpsolve_cli::run::RunSummary;
use mpsolve_cli::{compare_dirac, parse_scenario, parse_scenario_str};
use mpsolve_core::projection::{reconstruct, stepwise_hamiltonian};
use mpsolve_core::{eigendecompose, Complex64};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"))
}

fn mpsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn every_bundled_scenario_validates() {
    for name in [
        "quench_eta025", "quench_eta081", "quench_eta121", "pulse_eta4", "pulse_eta081",
        "stationary", "smooth_ramp", "dirac_weak",
    ] {
        let out = mpsolve(&["validate", bundled(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let c = parse_scenario(&bundled("quench_eta025")).unwrap();
    match c.hamiltonian.potential() {
        mpsolve_core::PotentialSpec::ScaledHarmonic { profile, .. } => {
            assert_eq!(*profile, mpsolve_core::ScaleProfile::Step { eta: 0.25, t_on: 0.0 });
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"potential": {"kind": "scaled_harmonic", "profile": {"kind": "step", "eta": -1}},
            "schedule": {"t1": 1, "slices": 1}, "grid": {"points": 2}}"#,
    );
    let out = mpsolve(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("potential.profile.eta: must be > 0"), "{err}");
    assert!(err.contains("grid.points: must be at least 3"), "{err}");

    let ambiguous = write(
        dir.path(),
        "amb.json",
        r#"{"potential": {"kind": "harmonic"}, "schedule": {"t1": 1, "slices": 1},
            "initial_state": {"eigenstate": 0, "amplitude_file": "x.csv"}}"#,
    );
    let out = mpsolve(&["run", ambiguous.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ambiguous initial state"));
}

#[test]
fn usage_errors_exit_one() {
    let s = bundled("smooth_ramp");
    let out = mpsolve(&["converge", s.to_str().unwrap(), "--doublings", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("doublings"));
    assert_eq!(mpsolve(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mpsolve(&["run"]).status.code(), Some(1));
    assert_eq!(mpsolve(&["--help"]).status.code(), Some(0));
}

#[test]
fn engine_failure_exits_two_and_leaves_no_files() {
    let dir = tempfile::tempdir().unwrap();
    // The table ends at t = 1 but the schedule runs to t = 2.
    let s = write(
        dir.path(),
        "short_table.json",
        r#"{"grid": {"x_min": -1, "x_max": 1, "points": 5},
            "potential": {"kind": "tabulated", "times": [0, 1],
                          "values": [[1, 0.5, 0, 0.5, 1], [2, 1, 0, 1, 2]]},
            "schedule": {"t1": 2, "slices": 4}, "basis": {"truncation": 3}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = mpsolve(&["run", s.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time out of range"));
    let leftovers = std::fs::read_dir(&out_dir).map(|d| d.count()).unwrap_or(0);
    assert_eq!(leftovers, 0);
}

#[test]
fn truncated_quench_reproduces_six_term_energy() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(bundled("quench_eta025"))
        .unwrap()
        .replace(r#""truncation": "full""#, r#""truncation": 7"#);
    let s = write(dir.path(), "q7.json", &text);
    let out_dir = dir.path().join("out");
    let out = mpsolve(&["run", s.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let summary: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert!((summary.energy_ratio - 0.6246).abs() < 1e-3, "{}", summary.energy_ratio);
    assert!(summary.final_norm < 1.0);
    assert_eq!(summary.final_coefficients.len(), 7);
}

#[test]
fn stationary_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpsolve(&["run", bundled("stationary").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("energy.csv"));
    assert_eq!(rows.len(), 1000);
    let e0 = rows[0][1];
    for r in &rows {
        assert!((r[2] - 1.0).abs() <= 1e-9);
        assert!((r[1] - e0).abs() <= 1e-9);
    }
    let coeffs = std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    assert!(coeffs.starts_with("slice,k,re,im,abs2\n"));
    assert_eq!(coeffs.lines().count(), 1 + 1000 * 64);
    assert!(!coeffs.contains('\r'));
}

#[test]
fn summary_coefficients_rebuild_final_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = bundled("pulse_eta081");
    let out = mpsolve(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let summary: RunSummary =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let phase = summary.reference_phase.as_ref().unwrap().phase;
    assert!((phase - 0.6981).abs() < 1e-2);

    let config = parse_scenario(&path).unwrap();
    let boundaries = mpsolve_cli::run::schedule_for(&config, &config.hamiltonian, config.schedule.slices)
        .unwrap()
        .boundaries()
        .to_vec();
    let last = (boundaries[boundaries.len() - 2], boundaries[boundaries.len() - 1]);
    let m = stepwise_hamiltonian(&config.hamiltonian, &config.grid, last, config.schedule.averaging).unwrap();
    let basis = eigendecompose(&m, &config.grid, config.truncation).unwrap();
    let coeffs: Vec<Complex64> = summary
        .final_coefficients
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    let rebuilt = reconstruct(&coeffs, &basis, None).unwrap();
    let state = read_csv(&dir.path().join("state.csv"));
    assert_eq!(state.len(), config.grid.points());
    for (row, a) in state.iter().zip(rebuilt.amplitudes()) {
        assert!((Complex64::new(row[1], row[2]) - a).norm() <= 1e-12);
    }
}

#[test]
fn final_state_seeds_a_new_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert!(mpsolve(&["run", bundled("pulse_eta4").to_str().unwrap(), "--out", first.to_str().unwrap()])
        .status
        .success());
    let s = write(
        dir.path(),
        "seeded.json",
        r#"{"potential": {"kind": "harmonic"}, "schedule": {"t1": 0.5, "slices": 2},
            "initial_state": {"amplitude_file": "first/state.csv"}}"#,
    );
    let out = mpsolve(&["run", s.to_str().unwrap(), "--out", dir.path().join("second").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn converge_on_step_profile_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "step.json",
        r#"{"grid": {"x_min": -16, "x_max": 16, "points": 321},
            "potential": {"kind": "scaled_harmonic", "profile": {"kind": "step", "eta": 0.25, "t_on": 0.3}},
            "schedule": {"t1": 1, "slices": 2}, "basis": {"truncation": 24}}"#,
    );
    let out = mpsolve(&["converge", s.to_str().unwrap(), "--doublings", "3", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("convergence trivially flat"));
    let rows = read_csv(&dir.path().join("convergence.csv"));
    assert_eq!(rows.iter().map(|r| r[0] as usize).collect::<Vec<_>>(), vec![2, 4, 8, 16]);
    for r in &rows {
        assert!(r[1] <= 1e-9, "{r:?}");
    }
}

#[test]
fn zero_perturbation_gives_zero_transitions() {
    let c = parse_scenario_str(
        r#"{"grid": {"x_min": -10, "x_max": 10, "points": 401},
            "potential": {"kind": "harmonic"}, "schedule": {"t1": 2, "slices": 5},
            "initial_state": {"eigenstate": 1},
            "dirac": {"basis_size": 8, "steps": 200, "quadrature_steps": 2000}}"#,
        Path::new("."),
        "free",
    )
    .unwrap();
    let cmp = compare_dirac(&c).unwrap();
    assert_eq!(cmp.initial, 1);
    assert_eq!(cmp.rows.len(), 7);
    for r in &cmp.rows {
        assert!(r.projection.norm() <= 1e-12, "{r:?}");
        assert!(r.rk4.unwrap().norm() <= 1e-12);
        assert!(r.first_order.norm() <= 1e-12);
    }
    assert_eq!(cmp.divergence.report.first_exceedance, None);
}

#[test]
fn weak_pulse_comparison_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = mpsolve(&["compare-dirac", bundled("dirac_weak").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let rows = read_csv(&dir.path().join("dirac_compare.csv"));
    let m2 = rows.iter().find(|r| r[0] == 2.0).unwrap();
    let (proj, rk4, first) = (m2[1], m2[2], m2[3]);
    assert!((rk4 - proj).abs() / proj < 0.05);
    assert!((first - proj).abs() / proj < 0.05);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("divergence.json")).unwrap()).unwrap();
    assert!(report["max_norm"].as_f64().unwrap() <= 1.0 + 1e-4);
    let history = read_csv(&dir.path().join("dirac_norm_history.csv"));
    assert_eq!(history[0], vec![0.0, 1.0]);
}
