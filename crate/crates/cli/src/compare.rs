//! `mpsolve compare-dirac`: multi-projection vs RK4 amplitude equations vs
//! the first-order formula, all in the eigenbasis of `H(t0)`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use mpsolve_core::{
    discretize, divergence_diagnostic, eigendecompose, first_order_amplitude,
    integrate_amplitudes, AmplitudeTrajectory, Complex64, DivergenceReport, Error,
    PerturbationMatrix, TimePartition, Transition, Truncation,
};

use crate::output::{Cell, Csv, OutputSet};
use crate::run::{evolve_scenario, initial_state};
use crate::scenario::{InitialState, ScenarioConfig};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct DiracRow {
    pub m: usize,
    /// `<m|ψ(T)>` from the multi-projection run.
    pub projection: Complex64,
    /// `<m|ψ(T)>` from RK4; absent if the integration blew up.
    pub rk4: Option<Complex64>,
    pub first_order: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceOutput {
    pub basis_size: usize,
    pub steps: usize,
    #[serde(flatten)]
    pub report: DivergenceReport,
    /// Step and time of the first non-finite amplitude.
    pub diverged_at: Option<DivergedAt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergedAt {
    pub step: usize,
    pub time: f64,
}

#[derive(Clone, Debug)]
pub struct DiracComparison {
    pub initial: usize,
    pub rows: Vec<DiracRow>,
    pub trajectory: AmplitudeTrajectory,
    pub divergence: DivergenceOutput,
}

pub fn compare_dirac(config: &ScenarioConfig) -> Result<DiracComparison, CliError> {
    let Some(dc) = &config.dirac else {
        return Err(CliError::Validation(vec![
            "dirac: section required for compare-dirac".into(),
        ]));
    };
    let InitialState::Eigenstate(n) = config.initial else {
        return Err(CliError::Validation(vec![
            "initial_state: compare-dirac needs an eigenstate initial state".into(),
        ]));
    };
    let (t0, t1) = (config.schedule.t0, config.schedule.t1);
    let h = &config.hamiltonian;
    let m0 = discretize(h, &config.grid, t0)?;
    let basis = eigendecompose(&m0, &config.grid, Truncation::States(dc.basis_size))?;

    let psi0 = initial_state(config)?;
    let engine = evolve_scenario(config, &psi0, h, config.schedule.slices)?.project_onto(&basis)?;

    let v = PerturbationMatrix::new(h, &basis, t0)?;
    let mut c0 = vec![Complex64::new(0.0, 0.0); dc.basis_size];
    c0[n] = Complex64::new(1.0, 0.0);
    let (trajectory, diverged_at) = match integrate_amplitudes(&v, &c0, (t0, t1), dc.steps) {
        Ok(t) => (t, None),
        Err(Error::AmplitudeDiverged { step, time, partial }) => {
            (*partial, Some(DivergedAt { step, time }))
        }
        Err(e) => return Err(e.into()),
    };
    let rk4_final =
        diverged_at.is_none().then(|| trajectory.state_coefficients(trajectory.last_row()));

    let quad = TimePartition::new(t0, t1, dc.quadrature_steps, &v.breakpoints())?;
    let omegas = v.omegas();
    let targets: Vec<usize> = if dc.targets.is_empty() {
        (0..dc.basis_size).filter(|&m| m != n).collect()
    } else {
        dc.targets.clone()
    };
    let rows = targets
        .into_iter()
        .map(|m| {
            let first_order = first_order_amplitude(
                v.element(m, n),
                Transition { from: n, to: m },
                &omegas,
                h.hbar(),
                &quad,
            )?;
            Ok(DiracRow {
                m,
                projection: engine[m],
                rk4: rk4_final.as_ref().map(|c| c[m]),
                first_order,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let divergence = DivergenceOutput {
        basis_size: dc.basis_size,
        steps: dc.steps,
        report: divergence_diagnostic(&trajectory),
        diverged_at,
    };
    Ok(DiracComparison {
        initial: n,
        rows,
        trajectory,
        divergence,
    })
}

impl DiracRow {
    /// Largest pairwise `|a − b|` among the available methods.
    pub fn mutual_discrepancy(&self) -> f64 {
        let mut d = (self.projection - self.first_order).norm();
        if let Some(r) = self.rk4 {
            d = d.max((self.projection - r).norm()).max((r - self.first_order).norm());
        }
        d
    }
}

impl DiracComparison {
    pub fn compare_csv(&self) -> String {
        let mut csv = Csv::new(&[
            "m",
            "projection_abs",
            "rk4_abs",
            "first_order_abs",
            "diff_projection_rk4",
            "diff_projection_first_order",
            "diff_rk4_first_order",
        ]);
        for r in &self.rows {
            let nan = f64::NAN;
            csv.row(&[
                Cell::Int(r.m),
                Cell::Float(r.projection.norm()),
                Cell::Float(r.rk4.map_or(nan, |c| c.norm())),
                Cell::Float(r.first_order.norm()),
                Cell::Float(r.rk4.map_or(nan, |c| (r.projection - c).norm())),
                Cell::Float((r.projection - r.first_order).norm()),
                Cell::Float(r.rk4.map_or(nan, |c| (c - r.first_order).norm())),
            ]);
        }
        csv.into_string()
    }

    pub fn norm_history_csv(&self) -> String {
        let mut csv = Csv::new(&["t", "norm"]);
        for (t, n) in self.trajectory.times.iter().zip(&self.trajectory.norm_history) {
            csv.row(&[Cell::Float(*t), Cell::Float(*n)]);
        }
        csv.into_string()
    }
}

pub fn write_comparison(cmp: &DiracComparison, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = OutputSet::create(dir)?;
    files.write("dirac_compare.csv", &cmp.compare_csv())?;
    files.write("dirac_norm_history.csv", &cmp.norm_history_csv())?;
    let json = serde_json::to_string_pretty(&cmp.divergence).expect("plain data");
    files.write("divergence.json", &(json + "\n"))?;
    Ok(files.commit())
}
