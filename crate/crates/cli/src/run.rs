//! `mpsolve run`: one evolution plus an optional reference run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use mpsolve_core::projection::{intermediate_energy, relative_phase};
use mpsolve_core::{
    discretize, eigendecompose, evolve, EvolutionResult, HamiltonianSpec, SliceSchedule,
    TimePartition, Truncation, WaveFunction,
};

use crate::output::{Cell, Csv, OutputSet};
use crate::scenario::{InitialState, ScenarioConfig};
use crate::CliError;

/// Slices `[t0, t1]` uniformly, adding the potential's jump times.
pub fn schedule_for(
    config: &ScenarioConfig,
    h: &HamiltonianSpec,
    slices: usize,
) -> Result<SliceSchedule, CliError> {
    let s = &config.schedule;
    let partition = TimePartition::new(s.t0, s.t1, slices, &h.potential().discontinuities())?;
    Ok(SliceSchedule::new(partition, s.averaging))
}

pub fn initial_state(config: &ScenarioConfig) -> Result<WaveFunction, CliError> {
    match &config.initial {
        InitialState::Eigenstate(n) => {
            let m = discretize(&config.hamiltonian, &config.grid, config.schedule.t0)?;
            Ok(eigendecompose(&m, &config.grid, Truncation::States(n + 1))?.state(*n))
        }
        InitialState::Amplitudes { values, .. } => {
            Ok(WaveFunction::new(config.grid, values.clone())?.normalized()?)
        }
    }
}

/// Evolves the scenario's initial state with `slices` uniform slices.
pub fn evolve_scenario(
    config: &ScenarioConfig,
    psi0: &WaveFunction,
    h: &HamiltonianSpec,
    slices: usize,
) -> Result<EvolutionResult, CliError> {
    let schedule = schedule_for(config, h, slices)?;
    Ok(evolve(psi0, h, &schedule, config.truncation, config.refresh)?)
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub initial_state: WaveFunction,
    pub initial_energy: f64,
    pub result: EvolutionResult,
    /// `(|<ψ_ref|ψ>|, arg <ψ_ref|ψ>)` at the final time.
    pub reference: Option<(f64, f64)>,
    pub wall_time: f64,
}

pub fn run(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let psi0 = initial_state(config)?;
    let h0 = discretize(&config.hamiltonian, &config.grid, config.schedule.t0)?;
    let initial_energy = intermediate_energy(&psi0, &h0)?;
    let result = evolve_scenario(config, &psi0, &config.hamiltonian, config.schedule.slices)?;
    let reference = match &config.reference {
        Some(h) => {
            let r = evolve_scenario(config, &psi0, h, config.schedule.slices)?;
            Some(relative_phase(&r.final_state, &result.final_state)?)
        }
        None => None,
    };
    Ok(RunOutput {
        initial_state: psi0,
        initial_energy,
        result,
        reference,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub k: usize,
    pub energy: f64,
    pub re: f64,
    pub im: f64,
    pub abs2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePhase {
    pub overlap_abs: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub scenario_hash: String,
    pub slices: usize,
    pub final_time: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// `final_energy / initial_energy`.
    pub energy_ratio: f64,
    pub final_norm: f64,
    /// Final state in the eigenbasis of the last slice's Hamiltonian.
    pub final_coefficients: Vec<CoefficientEntry>,
    pub reference_phase: Option<ReferencePhase>,
    pub wall_time_seconds: f64,
}

impl RunOutput {
    pub fn summary(&self, config: &ScenarioConfig) -> RunSummary {
        let last = self.result.final_report();
        let final_coefficients = self
            .result
            .final_coefficients
            .iter()
            .zip(self.result.final_basis.energies())
            .enumerate()
            .map(|(k, (c, &energy))| CoefficientEntry {
                k,
                energy,
                re: c.re,
                im: c.im,
                abs2: c.norm_sqr(),
            })
            .collect();
        RunSummary {
            scenario: config.name.clone(),
            scenario_hash: config.hash.clone(),
            slices: self.result.reports.len(),
            final_time: last.t_end,
            initial_energy: self.initial_energy,
            final_energy: last.energy,
            energy_ratio: last.energy / self.initial_energy,
            final_norm: last.norm_squared,
            final_coefficients,
            reference_phase: self.reference.map(|(overlap_abs, phase)| ReferencePhase {
                overlap_abs,
                phase,
            }),
            wall_time_seconds: self.wall_time,
        }
    }

    pub fn energy_csv(&self) -> String {
        let mut csv = Csv::new(&["t_end", "energy", "norm"]);
        for r in &self.result.reports {
            csv.row(&[Cell::Float(r.t_end), Cell::Float(r.energy), Cell::Float(r.norm_squared)]);
        }
        csv.into_string()
    }

    pub fn coefficients_csv(&self) -> String {
        let mut csv = Csv::new(&["slice", "k", "re", "im", "abs2"]);
        for r in &self.result.reports {
            for (k, c) in r.coefficients.iter().enumerate() {
                csv.row(&[
                    Cell::Int(r.slice_index),
                    Cell::Int(k),
                    Cell::Float(c.re),
                    Cell::Float(c.im),
                    Cell::Float(c.norm_sqr()),
                ]);
            }
        }
        csv.into_string()
    }

    /// Same layout as an amplitude file, so a final state can seed a new run.
    pub fn state_csv(&self) -> String {
        let psi = &self.result.final_state;
        let mut csv = Csv::new(&["x", "re", "im"]);
        for (i, a) in psi.amplitudes().iter().enumerate() {
            csv.row(&[Cell::Float(psi.grid().x(i)), Cell::Float(a.re), Cell::Float(a.im)]);
        }
        csv.into_string()
    }
}

pub fn write_run(
    config: &ScenarioConfig,
    out: &RunOutput,
    dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let emit = config.outputs.emit;
    let mut files = OutputSet::create(dir)?;
    if emit.energy {
        files.write("energy.csv", &out.energy_csv())?;
    }
    if emit.coefficients {
        files.write("coefficients.csv", &out.coefficients_csv())?;
    }
    if emit.state {
        files.write("state.csv", &out.state_csv())?;
    }
    if emit.summary {
        let json = serde_json::to_string_pretty(&out.summary(config))
            .expect("summary contains only plain data");
        files.write("summary.json", &(json + "\n"))?;
    }
    Ok(files.commit())
}
