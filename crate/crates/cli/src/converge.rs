//! `mpsolve converge`: final-state error over a ladder of slice doublings.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::output::{Cell, Csv, OutputSet};
use crate::run::{evolve_scenario, initial_state};
use crate::scenario::ScenarioConfig;
use crate::CliError;

/// The reference run uses this many times the finest rung's slices.
pub const REFERENCE_FACTOR: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub slices: usize,
    /// Trapezoidal L2 distance to the reference final state.
    pub error: f64,
    /// `log2(e_prev / e)`; absent on the first rung.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub reference_slices: usize,
    /// The potential only jumps between constants, so slicing cannot change
    /// the result beyond roundoff.
    pub trivially_flat: bool,
}

pub fn converge(config: &ScenarioConfig, doublings: usize) -> Result<ConvergenceTable, CliError> {
    if doublings < 2 {
        return Err(CliError::Usage(format!(
            "--doublings must be at least 2 (got {doublings})"
        )));
    }
    let base = config.schedule.slices;
    let mut counts: Vec<usize> = (0..=doublings).map(|i| base << i).collect();
    let reference_slices = counts[doublings] * REFERENCE_FACTOR;
    counts.push(reference_slices);

    let psi0 = initial_state(config)?;
    let mut finals = counts
        .par_iter()
        .map(|&n| evolve_scenario(config, &psi0, &config.hamiltonian, n).map(|r| r.final_state))
        .collect::<Result<Vec<_>, _>>()?;
    let reference = finals.pop().expect("reference run is last");

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(finals.len());
    for (psi, &slices) in finals.iter().zip(&counts) {
        let error = psi.distance(&reference)?;
        let order = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(ConvergenceRow { slices, error, order });
    }
    Ok(ConvergenceTable {
        rows,
        reference_slices,
        trivially_flat: config.hamiltonian.potential().is_piecewise_constant(),
    })
}

impl ConvergenceTable {
    pub fn csv(&self) -> String {
        let mut csv = Csv::new(&["slices", "l2_error", "observed_order"]);
        for r in &self.rows {
            csv.row(&[
                Cell::Int(r.slices),
                Cell::Float(r.error),
                r.order.map_or(Cell::Empty, Cell::Float),
            ]);
        }
        csv.into_string()
    }
}

pub fn write_convergence(table: &ConvergenceTable, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = OutputSet::create(dir)?;
    files.write("convergence.csv", &table.csv())?;
    Ok(files.commit())
}
