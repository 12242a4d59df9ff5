//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mpsolve_cli::scenario::InitialState;
use mpsolve_cli::{compare_dirac, converge, parse_scenario, parse_scenario_str, run, ScenarioConfig};
use mpsolve_core::eigensolver::residual;
use mpsolve_core::oscillator::{
    pulse_phase_prediction, sudden_energy_ratio, sudden_quench_coefficients,
    truncated_quench_energy, wrap_phase,
};
use mpsolve_core::projection::{project, reconstruct};
use mpsolve_core::{
    discretize, eigendecompose, inner_product, Grid, HamiltonianSpec, PotentialSpec,
    ScaleProfile, Truncation, WaveFunction,
};

type Outcome = Result<String, String>;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn scenario(name: &str) -> ScenarioConfig {
    parse_scenario(&scenarios_dir().join(format!("{name}.json"))).expect("bundled scenario parses")
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check(
        (got - want).abs() <= tol,
        format!("{name} = {got:.6} outside {want} ± {tol:e}"),
    )
}

fn quench_coefficients() -> Outcome {
    let g = Grid::standard();
    let unit = HamiltonianSpec::natural(PotentialSpec::Harmonic { k: 1.0 }).map_err(|e| e.to_string())?;
    let quenched = HamiltonianSpec::natural(PotentialSpec::Harmonic { k: 0.25 }).map_err(|e| e.to_string())?;
    let psi0 = eigendecompose(&discretize(&unit, &g, 0.0).unwrap(), &g, Truncation::States(1))
        .unwrap()
        .state(0);
    let basis = eigendecompose(&discretize(&quenched, &g, 0.0).unwrap(), &g, Truncation::States(8)).unwrap();
    let grid_c = project(&psi0, &basis).map_err(|e| e.to_string())?;
    let oracle = sudden_quench_coefficients(0.25, 6).map_err(|e| e.to_string())?;
    let published = [(0, 0.9710), (2, -0.2289), (4, 0.0661), (6, -0.0201)];
    for (n, want) in published {
        within(&format!("grid C{n}"), grid_c[n].re, want, 1e-3)?;
        within(&format!("oracle C{n}"), oracle.coefficients[n], want, 1e-3)?;
        within(&format!("grid-oracle C{n}"), grid_c[n].re, oracle.coefficients[n], 1e-3)?;
    }
    Ok(format!(
        "C0..C6 grid [{:.4}, {:.4}, {:.4}, {:.4}]",
        grid_c[0].re, grid_c[2].re, grid_c[4].re, grid_c[6].re
    ))
}

fn with_truncation(config: &ScenarioConfig, t: Truncation) -> ScenarioConfig {
    ScenarioConfig {
        truncation: t,
        ..config.clone()
    }
}

fn quench_energies() -> Outcome {
    let mut notes = Vec::new();
    for (name, eta, published) in [
        ("quench_eta025", 0.25, 0.6246),
        ("quench_eta081", 0.81, 0.9050),
        ("quench_eta121", 1.21, 1.1050),
    ] {
        within(&format!("oracle n<=6 eta={eta}"), truncated_quench_energy(eta, 6).unwrap(), published, 5e-4)?;
        let config = scenario(name);
        let truncated = run(&with_truncation(&config, Truncation::States(7))).map_err(|e| e.to_string())?;
        let ratio = truncated.summary(&config).energy_ratio;
        within(&format!("engine n<=6 eta={eta}"), ratio, published, 5e-4)?;
        let full = run(&config).map_err(|e| e.to_string())?;
        let exact = full.summary(&config).energy_ratio;
        within(&format!("full-basis eta={eta}"), exact, sudden_energy_ratio(eta), 1e-3)?;
        notes.push(format!("{eta}: {ratio:.4}/{exact:.4}"));
    }
    Ok(format!("truncated/full {}", notes.join(", ")))
}

fn pulse_phase() -> Outcome {
    let mut notes = Vec::new();
    for (name, eta, want) in [("pulse_eta4", 4.0, PI), ("pulse_eta081", 0.81, 0.6981)] {
        let config = scenario(name);
        let out = run(&config).map_err(|e| e.to_string())?;
        let (abs, arg) = out.reference.ok_or("no reference run")?;
        within(&format!("|overlap| eta={eta}"), abs, 1.0, 1e-4)?;
        // Angles are compared on the circle: −π and π are the same phase.
        let miss = wrap_phase(arg - want).abs();
        check(miss <= 1e-2, format!("phase eta={eta} = {arg:.5}, expected {want:.5} ± 1e-2"))?;
        within("prediction", pulse_phase_prediction(eta), want, 1e-4)?;
        notes.push(format!("eta={eta}: {arg:.4} rad"));
    }
    Ok(notes.join(", "))
}

fn stationarity() -> Outcome {
    let config = scenario("stationary");
    check(config.schedule.slices == 1000, "stationary scenario must use 10^3 slices".into())?;
    let out = run(&config).map_err(|e| e.to_string())?;
    let b0 = eigendecompose(
        &discretize(&config.hamiltonian, &config.grid, config.schedule.t0).unwrap(),
        &config.grid,
        Truncation::States(8),
    )
    .unwrap();
    let c0 = out.result.project_onto(&b0).unwrap()[0].norm();
    within("|C0|", c0, 1.0, 1e-8)?;
    let start = mpsolve_core::norm_squared(&out.initial_state);
    let drift = out
        .result
        .reports
        .iter()
        .map(|r| (r.norm_squared - start).abs())
        .fold(0.0, f64::max);
    check(drift <= 1e-6, format!("norm drift {drift:e} > 1e-6"))?;
    Ok(format!("|C0| - 1 = {:.1e}, drift {drift:.1e}", c0 - 1.0))
}

fn unitarity() -> Outcome {
    let g = Grid::standard();
    let h = HamiltonianSpec::natural(PotentialSpec::Harmonic { k: 0.6 }).unwrap();
    let basis = eigendecompose(&discretize(&h, &g, 0.0).unwrap(), &g, Truncation::Full).unwrap();
    let psi = WaveFunction::from_fn(g, |x| {
        mpsolve_core::Complex64::new((-(x - 1.5).powi(2)).exp(), 0.4 * (x + 0.5) * (-0.5 * x * x).exp())
    })
    .normalized()
    .unwrap();
    let back = reconstruct(&project(&psi, &basis).unwrap(), &basis, None).unwrap();
    let err = back.distance(&psi).unwrap();
    check(err <= 1e-9, format!("round trip error {err:e} > 1e-9"))?;

    let ramp = r#"{"grid": {"x_min": -8, "x_max": 8, "points": 161},
        "potential": {"kind": "scaled_harmonic", "profile":
            {"kind": "sampled", "times": [0, 1, 2, 3], "values": [1, 2.5, 0.5, 1.2]}},
        "schedule": {"t1": 3, "slices": 300},
        "basis": {"truncation": "full"}}"#;
    let mut worst: f64 = 0.0;
    for config in [
        scenario("quench_eta025"),
        parse_scenario_str(ramp, Path::new("."), "ramp").map_err(|e| e.to_string())?,
    ] {
        let out = run(&config).map_err(|e| e.to_string())?;
        for r in &out.result.reports {
            worst = worst.max((r.norm_squared - 1.0).abs());
        }
    }
    check(worst <= 1e-9, format!("per-slice norm error {worst:e} > 1e-9"))?;
    Ok(format!("round trip {err:.1e}, per-slice norm error {worst:.1e}"))
}

fn first_order() -> Outcome {
    let base = scenario("dirac_weak");
    let weak = compare_dirac(&base).map_err(|e| e.to_string())?;
    let row = weak.rows.iter().find(|r| r.m == 2).ok_or("no m=2 row")?;
    let p = row.projection.norm();
    for (name, v) in [("rk4", row.rk4.map(|c| c.norm())), ("first order", Some(row.first_order.norm()))] {
        let v = v.ok_or("rk4 diverged")?;
        check((v - p).abs() / p < 0.05, format!("{name} |C2| {v:e} vs projection {p:e}"))?;
    }

    let mut d = Vec::new();
    for eps in [1e-2, 5e-3, 2.5e-3] {
        let mut config = base.clone();
        config.hamiltonian = base
            .hamiltonian
            .with_potential(PotentialSpec::ScaledHarmonic {
                k: 1.0,
                profile: ScaleProfile::Pulse { eta: 1.0 + eps, t_on: 0.25, t_off: 1.25 },
            })
            .unwrap();
        let cmp = compare_dirac(&config).map_err(|e| e.to_string())?;
        let row = cmp.rows.iter().find(|r| r.m == 2).ok_or("no m=2 row")?;
        d.push(row.mutual_discrepancy());
    }
    let ratios: Vec<f64> = d.windows(2).map(|w| w[0] / w[1]).collect();
    for r in &ratios {
        check((3.0..=5.0).contains(r), format!("discrepancies {}, ratios {ratios:.3?}", sci(&d)))?;
    }
    Ok(format!("discrepancy {}, halving ratios {ratios:.2?}", sci(&d)))
}

fn eigensolver_quality() -> Outcome {
    let g = Grid::standard();
    let h = HamiltonianSpec::natural(PotentialSpec::Harmonic { k: 1.0 }).unwrap();
    let m = discretize(&h, &g, 0.0).unwrap();
    let b = eigendecompose(&m, &g, Truncation::States(11)).unwrap();
    let mut worst_rel: f64 = 0.0;
    for (n, e) in b.energies().iter().enumerate() {
        let exact = n as f64 + 0.5;
        worst_rel = worst_rel.max((e - exact).abs() / exact);
    }
    check(worst_rel <= 1e-3, format!("spectrum relative error {worst_rel:e}"))?;
    let mut worst_orth: f64 = 0.0;
    for j in 0..b.len() {
        for k in 0..b.len() {
            let want = if j == k { 1.0 } else { 0.0 };
            worst_orth = worst_orth.max((b.solver_overlap(j, k) - want).abs());
            let trap = inner_product(&b.state(j), &b.state(k)).unwrap();
            worst_orth = worst_orth.max((trap - want).norm());
        }
    }
    check(worst_orth <= 1e-10, format!("orthonormality {worst_orth:e}"))?;
    let res = residual(&m, &b).unwrap().into_iter().fold(0.0, f64::max);
    check(res <= 1e-8, format!("residual {res:e}"))?;
    Ok(format!("rel {worst_rel:.1e}, orth {worst_orth:.1e}, residual {res:.1e}"))
}

fn convergence_ladder() -> Outcome {
    let table = converge(&scenario("smooth_ramp"), 5).map_err(|e| e.to_string())?;
    check(!table.trivially_flat, "smooth ramp flagged as piecewise constant".into())?;
    let errors: Vec<f64> = table.rows.iter().map(|r| r.error).collect();
    check(
        errors.windows(2).all(|w| w[1] < w[0]),
        format!("errors not decreasing: {}", sci(&errors)),
    )?;
    let last = table.rows.last().and_then(|r| r.order).ok_or("no order")?;
    check(last >= 1.5, format!("final observed order {last:.3} < 1.5"))?;
    Ok(format!("{} rungs, final order {last:.3}", table.rows.len()))
}

fn divergence() -> Outcome {
    let config = scenario("quench_eta025");
    let cmp = compare_dirac(&config).map_err(|e| e.to_string())?;
    let max = cmp.trajectory.norm_history.iter().copied().fold(0.0, f64::max);
    check(max > 1.0, format!("norm history never exceeds 1 (max {max})"))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    mpsolve_cli::write_comparison(&cmp, dir.path()).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(dir.path().join("divergence.json")).map_err(|e| e.to_string())?;
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    check(report.get("max_norm").is_some(), "report lacks max_norm".into())?;
    Ok(format!("max norm {max:.3e}, first exceedance {}", report["first_exceedance"]))
}

fn mpsolve(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mpsolve"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(
        out.status.success(),
        format!("mpsolve {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)),
    )
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut names: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let mut compared = 0;
    for path in &names {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let config = parse_scenario(path).map_err(|e| e.to_string())?;
        let scenario = path.to_str().unwrap();
        let mut runs = Vec::new();
        for i in 0..2 {
            let dir = tmp.path().join(format!("{stem}-{i}"));
            let d = dir.to_str().unwrap();
            mpsolve(&["run", scenario, "--out", d])?;
            if config.dirac.is_some() && matches!(config.initial, InitialState::Eigenstate(_)) {
                mpsolve(&["compare-dirac", scenario, "--out", d])?;
            }
            if stem == "smooth_ramp" {
                mpsolve(&["converge", scenario, "--doublings", "2", "--out", d])?;
            }
            runs.push(csv_files(&dir));
        }
        check(!runs[0].is_empty(), format!("{stem}: no CSV output"))?;
        check(runs[0] == runs[1], format!("{stem}: CSV output differs between runs"))?;
        compared += runs[0].len();
    }
    Ok(format!("{} scenarios, {compared} CSV files identical", names.len()))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "quench coefficients", budget: Some(Duration::from_secs(5)), check: quench_coefficients },
        Criterion { id: 2, name: "quench energies", budget: Some(Duration::from_secs(10)), check: quench_energies },
        Criterion { id: 3, name: "pulse phase", budget: Some(Duration::from_secs(10)), check: pulse_phase },
        Criterion { id: 4, name: "stationarity", budget: None, check: stationarity },
        Criterion { id: 5, name: "unitarity/completeness", budget: None, check: unitarity },
        Criterion { id: 6, name: "first-order consistency", budget: Some(Duration::from_secs(30)), check: first_order },
        Criterion { id: 7, name: "eigensolver quality", budget: None, check: eigensolver_quality },
        Criterion { id: 8, name: "convergence ladder", budget: Some(Duration::from_secs(60)), check: convergence_ladder },
        Criterion { id: 9, name: "divergence diagnostic", budget: None, check: divergence },
        Criterion { id: 10, name: "determinism", budget: None, check: determinism },
    ];
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.check)
            .unwrap_or_else(|_| Err("panicked".into()))
            .and_then(|detail| match c.budget {
                Some(b) if start.elapsed() > b => Err(format!("{detail}; took {:.2?} > {b:?}", start.elapsed())),
                _ => Ok(detail),
            });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {}: {detail} ({took:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {}: {why} ({took:.2?})", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
