//! Time evolution by chained projections between the eigenbases of
//! piecewise-constant Hamiltonians.
//!
//! Over each slice `[t_{j-1}, t_j]` the Hamiltonian is replaced by its
//! average `Ĥ_j`. The incoming state is projected onto the eigenbasis of
//! `Ĥ_j`, each component picks up `exp(-i E_k Δt / ħ)`, and the components
//! are summed back onto the grid. Nothing else happens to the state: the
//! dynamics is entirely phase accumulation between projections.

use std::sync::Arc;

use num_complex::Complex64;

use crate::eigensolver::{eigendecompose, EigenBasis, SymTridiagonal, Truncation};
use crate::error::{Error, Result};
use crate::grid::{inner_product, norm_squared, Grid, WaveFunction};
use crate::potential::HamiltonianSpec;
use crate::schedule::{Averaging, SliceSchedule};

/// Whether the eigendecomposition is reused across slices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RefreshPolicy {
    /// Decompose afresh on every slice.
    PerSlice,
    /// Reuse the previous decomposition while the frozen Hamiltonian is
    /// bit-for-bit unchanged.
    #[default]
    Cached,
}

#[derive(Clone, Debug)]
pub struct ProjectionStepReport {
    pub slice_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Projection coefficients onto this slice's basis with the slice phase
    /// already applied.
    pub coefficients: Vec<Complex64>,
    pub norm_squared: f64,
    /// `<ψ|Ĥ_j|ψ> / <ψ|ψ>` with `Ĥ_j` of the slice just completed.
    pub energy: f64,
    pub basis_refreshed: bool,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub final_state: WaveFunction,
    pub reports: Vec<ProjectionStepReport>,
    /// Basis of the last slice; `final_state` is exactly
    /// `reconstruct(final_coefficients, final_basis)`.
    pub final_basis: Arc<EigenBasis>,
    pub final_coefficients: Vec<Complex64>,
}

impl EvolutionResult {
    /// Coefficients of the final state in a caller-chosen basis.
    pub fn project_onto(&self, basis: &EigenBasis) -> Result<Vec<Complex64>> {
        project(&self.final_state, basis)
    }

    pub fn final_report(&self) -> &ProjectionStepReport {
        self.reports.last().expect("a schedule has at least one slice")
    }
}

/// Frozen Hamiltonian for the slice `[ta, tb]`. Only the potential depends on
/// time, so only the diagonal is averaged.
pub fn stepwise_hamiltonian(
    h: &HamiltonianSpec,
    grid: &Grid,
    slice: (f64, f64),
    averaging: Averaging,
) -> Result<SymTridiagonal> {
    let (ta, tb) = slice;
    if ta.partial_cmp(&tb) != Some(std::cmp::Ordering::Less) {
        return Err(Error::param("slice", format!("empty slice [{ta}, {tb}]")));
    }
    let v = h.potential().averaged_samples(grid, ta, tb, averaging)?;
    SymTridiagonal::from_potential(h, grid, &v)
}

/// `C_k = <W_k|ψ>` for every retained basis state.
pub fn project(psi: &WaveFunction, basis: &EigenBasis) -> Result<Vec<Complex64>> {
    if psi.grid() != basis.grid() {
        return Err(Error::IncompatibleGrids);
    }
    let weights = basis.grid().weights();
    let weighted: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .zip(&weights)
        .map(|(a, w)| a * w)
        .collect();
    Ok((0..basis.len())
        .map(|k| {
            basis
                .state_values(k)
                .iter()
                .zip(&weighted)
                .map(|(v, a)| a * v)
                .sum()
        })
        .collect())
}

/// `Σ_k C_k phase_k W_k`; `phases = None` means all ones.
pub fn reconstruct(
    coefficients: &[Complex64],
    basis: &EigenBasis,
    phases: Option<&[Complex64]>,
) -> Result<WaveFunction> {
    if coefficients.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            found: coefficients.len(),
        });
    }
    if let Some(p) = phases {
        if p.len() != coefficients.len() {
            return Err(Error::LengthMismatch {
                expected: coefficients.len(),
                found: p.len(),
            });
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); basis.grid().points()];
    for (k, &c) in coefficients.iter().enumerate() {
        let c = match phases {
            Some(p) => c * p[k],
            None => c,
        };
        for (o, v) in out.iter_mut().zip(basis.state_values(k)) {
            *o += c * v;
        }
    }
    WaveFunction::new(*basis.grid(), out)
}

/// `exp(-i E_k Δt / ħ)` for every basis energy.
pub fn phase_factors(basis: &EigenBasis, dt: f64, hbar: f64) -> Vec<Complex64> {
    basis
        .energies()
        .iter()
        .map(|e| Complex64::from_polar(1.0, -e * dt / hbar))
        .collect()
}

/// `<ψ|Ĥ|ψ> / <ψ|ψ>`.
pub fn intermediate_energy(psi: &WaveFunction, m: &SymTridiagonal) -> Result<f64> {
    if psi.len() != m.len() {
        return Err(Error::LengthMismatch {
            expected: m.len(),
            found: psi.len(),
        });
    }
    let norm = norm_squared(psi);
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let h_psi = WaveFunction::new(*psi.grid(), m.apply(psi.amplitudes()))?;
    Ok(inner_product(psi, &h_psi)?.re / norm)
}

/// Magnitude and argument of `<reference|ψ>`.
pub fn relative_phase(reference: &WaveFunction, psi: &WaveFunction) -> Result<(f64, f64)> {
    let overlap = inner_product(reference, psi)?;
    Ok((overlap.norm(), overlap.arg()))
}

struct CachedBasis {
    matrix: SymTridiagonal,
    basis: Arc<EigenBasis>,
}

/// Evolves `psi0` across every slice of `schedule`.
pub fn evolve(
    psi0: &WaveFunction,
    h: &HamiltonianSpec,
    schedule: &SliceSchedule,
    truncation: Truncation,
    refresh: RefreshPolicy,
) -> Result<EvolutionResult> {
    if !psi0.is_finite() {
        return Err(Error::NonFiniteState { slice: 0 });
    }
    let grid = *psi0.grid();
    let mut psi = psi0.clone();
    let mut cache: Option<CachedBasis> = None;
    let mut reports = Vec::with_capacity(schedule.slice_count());
    let mut last = None;

    for (j, (ta, tb)) in schedule.slices().enumerate() {
        let at_slice = |e: Error| Error::Slice {
            slice: j,
            source: Box::new(e),
        };
        let matrix =
            stepwise_hamiltonian(h, &grid, (ta, tb), schedule.averaging()).map_err(at_slice)?;
        let reuse = refresh == RefreshPolicy::Cached
            && cache.as_ref().is_some_and(|c| c.matrix == matrix);
        if !reuse {
            let basis = eigendecompose(&matrix, &grid, truncation).map_err(at_slice)?;
            cache = Some(CachedBasis {
                matrix,
                basis: Arc::new(basis),
            });
        }
        let current = cache.as_ref().expect("filled above");
        let basis = &current.basis;

        let phases = phase_factors(basis, tb - ta, h.hbar());
        let coefficients: Vec<Complex64> = project(&psi, basis)?
            .into_iter()
            .zip(&phases)
            .map(|(c, p)| c * p)
            .collect();
        psi = reconstruct(&coefficients, basis, None)?;
        if !psi.is_finite() {
            return Err(Error::NonFiniteState { slice: j });
        }
        let energy = intermediate_energy(&psi, &current.matrix).map_err(at_slice)?;
        reports.push(ProjectionStepReport {
            slice_index: j,
            t_start: ta,
            t_end: tb,
            coefficients: coefficients.clone(),
            norm_squared: norm_squared(&psi),
            energy,
            basis_refreshed: !reuse,
        });
        last = Some((Arc::clone(basis), coefficients));
    }

    let (final_basis, final_coefficients) = last.expect("a schedule has at least one slice");
    Ok(EvolutionResult {
        final_state: psi,
        reports,
        final_basis,
        final_coefficients,
    })
}
