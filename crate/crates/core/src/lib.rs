//! Time-dependent Schrödinger solver for one spatial dimension based on
//! repeated projection onto the eigenbasis of slice-averaged Hamiltonians.
//!
//! The grid engine lives in [`projection`], the tridiagonal eigensolvers in
//! [`eigensolver`]. [`oscillator`] holds closed-form harmonic results used as
//! an oracle and [`dirac`] the conventional amplitude-equation baseline.

pub mod dirac;
pub mod eigensolver;
pub mod error;
pub mod grid;
pub mod oscillator;
pub mod potential;
pub mod projection;
pub mod quadrature;
pub mod schedule;

pub use num_complex::Complex64;

pub use dirac::{
    divergence_diagnostic, first_order_amplitude, integrate_amplitudes, perturbation_elements,
    AmplitudeTrajectory, DivergenceReport, ElementMatrix, PerturbationMatrix, Transition,
};
pub use eigensolver::{discretize, eigendecompose, EigenBasis, SymTridiagonal, Truncation};
pub use error::{Error, Result};
pub use grid::{inner_product, norm_squared, Grid, WaveFunction};
pub use oscillator::{OscillatorParams, QuenchCoefficients};
pub use potential::{
    evaluate_potential, HamiltonianSpec, PotentialSpec, ScaleProfile, Side, TabulatedPotential,
};
pub use projection::{evolve, EvolutionResult, ProjectionStepReport, RefreshPolicy};
pub use schedule::{build_schedule, Averaging, SliceSchedule, TimePartition};
