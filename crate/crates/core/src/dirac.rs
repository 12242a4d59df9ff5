//! The conventional baseline: expand in the eigenbasis of `H(t₀)` and
//! integrate the coupled amplitude equations
//! `iħ dC_k/dt = Σ_m C_m e^{i(ω_k − ω_m)(t − t₀)} V_km(t)`,
//! plus the first-order transition amplitude and a norm-growth diagnostic.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolver::EigenBasis;
use crate::error::{Error, Result};
use crate::potential::{HamiltonianSpec, PotentialSpec, ScaleProfile, Side};
use crate::schedule::TimePartition;

/// Real symmetric matrix of `<k|V|m>` values, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementMatrix {
    size: usize,
    data: Vec<f64>,
}

impl ElementMatrix {
    pub fn zeros(size: usize) -> Self {
        ElementMatrix {
            size,
            data: vec![0.0; size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.data[k * self.size + m]
    }

    /// Largest `|V_km − conj(V_mk)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.size {
            for m in k + 1..self.size {
                worst = worst.max((self.get(k, m) - self.get(m, k)).abs());
            }
        }
        worst
    }

    fn scaled(&self, s: f64) -> ElementMatrix {
        ElementMatrix {
            size: self.size,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }
}

/// `<k|f|m>` by trapezoidal quadrature for every retained pair.
fn matrix_elements(basis: &EigenBasis, f: &[f64]) -> ElementMatrix {
    let grid = basis.grid();
    let size = basis.len();
    let weighted: Vec<Vec<f64>> = (0..size)
        .map(|k| {
            basis
                .state_values(k)
                .iter()
                .zip(f)
                .enumerate()
                .map(|(i, (v, fv))| v * fv * grid.weight(i))
                .collect()
        })
        .collect();
    let mut out = ElementMatrix::zeros(size);
    for (k, row) in weighted.iter().enumerate() {
        for m in k..size {
            let s: f64 = row
                .iter()
                .zip(basis.state_values(m))
                .map(|(a, b)| a * b)
                .sum();
            out.data[k * size + m] = s;
            out.data[m * size + k] = s;
        }
    }
    out
}

/// `V_km(t) = <k|V(·, t) − V(·, t₀)|m>`.
pub fn perturbation_elements(
    h: &HamiltonianSpec,
    basis: &EigenBasis,
    t0: f64,
    t: f64,
) -> Result<ElementMatrix> {
    let grid = basis.grid();
    let now = h.potential().sample(grid, t, Side::Exact)?;
    let start = h.potential().sample(grid, t0, Side::Exact)?;
    let diff: Vec<f64> = now.iter().zip(&start).map(|(a, b)| a - b).collect();
    Ok(matrix_elements(basis, &diff))
}

#[derive(Clone, Debug)]
enum Variation {
    Zero,
    /// `(S(t) − S(t₀)) <k|k x²/2|m>`.
    Scaled {
        profile: ScaleProfile,
        s0: f64,
        base: ElementMatrix,
    },
    /// One matrix per table row, interpolated linearly in time.
    Tabulated {
        times: Vec<f64>,
        rows: Vec<ElementMatrix>,
    },
}

/// `V_km(t)` over the retained `H(t₀)` basis, with the time dependence
/// factored out so each evaluation costs O(M²) instead of a grid sweep.
#[derive(Clone, Debug)]
pub struct PerturbationMatrix {
    t0: f64,
    hbar: f64,
    energies: Vec<f64>,
    variation: Variation,
}

impl PerturbationMatrix {
    pub fn new(h: &HamiltonianSpec, basis: &EigenBasis, t0: f64) -> Result<Self> {
        let grid = basis.grid();
        let variation = match h.potential() {
            PotentialSpec::Harmonic { .. } => Variation::Zero,
            PotentialSpec::ScaledHarmonic { k, profile } => {
                let spring: Vec<f64> = grid.nodes().map(|x| 0.5 * k * x * x).collect();
                Variation::Scaled {
                    profile: profile.clone(),
                    s0: profile.value(t0)?,
                    base: matrix_elements(basis, &spring),
                }
            }
            PotentialSpec::Tabulated(tab) => {
                if tab.grid() != grid {
                    return Err(Error::IncompatibleGrids);
                }
                let start = h.potential().sample(grid, t0, Side::Exact)?;
                let rows = tab
                    .values()
                    .iter()
                    .map(|row| {
                        let diff: Vec<f64> = row.iter().zip(&start).map(|(a, b)| a - b).collect();
                        matrix_elements(basis, &diff)
                    })
                    .collect();
                Variation::Tabulated {
                    times: tab.times().to_vec(),
                    rows,
                }
            }
        };
        Ok(PerturbationMatrix {
            t0,
            hbar: h.hbar(),
            energies: basis.energies().to_vec(),
            variation,
        })
    }

    pub fn size(&self) -> usize {
        self.energies.len()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `ω_k = E_k / ħ` of the reference basis.
    pub fn omegas(&self) -> Vec<f64> {
        self.energies.iter().map(|e| e / self.hbar).collect()
    }

    /// Times where `V(t)` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.variation {
            Variation::Scaled { profile, .. } => profile.discontinuities(),
            _ => Vec::new(),
        }
    }

    pub fn at(&self, t: f64, side: Side) -> Result<ElementMatrix> {
        match &self.variation {
            Variation::Zero => Ok(ElementMatrix::zeros(self.size())),
            Variation::Scaled { profile, s0, base } => {
                Ok(base.scaled(profile.value_at(t, side)? - s0))
            }
            Variation::Tabulated { times, rows } => {
                if times.len() == 1 {
                    return Ok(rows[0].clone());
                }
                let (min, max) = (times[0], times[times.len() - 1]);
                if !(t >= min && t <= max) {
                    return Err(Error::TimeOutOfRange { t, min, max });
                }
                let j = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1) - 1;
                let lambda = (t - times[j]) / (times[j + 1] - times[j]);
                let (a, b) = (&rows[j], &rows[j + 1]);
                Ok(ElementMatrix {
                    size: a.size,
                    data: a
                        .data
                        .iter()
                        .zip(&b.data)
                        .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
                        .collect(),
                })
            }
        }
    }

    /// `t ↦ V_mn(t)` as needed by [`first_order_amplitude`].
    pub fn element(&self, m: usize, n: usize) -> impl Fn(f64, Side) -> Result<Complex64> + '_ {
        move |t, side| Ok(Complex64::new(self.at(t, side)?.get(m, n), 0.0))
    }
}

/// `C_k(t)` on the integration grid.
#[derive(Clone, Debug)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    /// One row per entry of `times`.
    pub amplitudes: Vec<Vec<Complex64>>,
    /// `Σ_k |C_k|²` per entry of `times`.
    pub norm_history: Vec<f64>,
    omegas: Vec<f64>,
    t0: f64,
}

impl AmplitudeTrajectory {
    /// Amplitudes with the unperturbed phases restored:
    /// `C_k(t) exp(−i ω_k (t − t₀))`, i.e. `<k|ψ(t)>`.
    pub fn state_coefficients(&self, row: usize) -> Vec<Complex64> {
        let tau = self.times[row] - self.t0;
        self.amplitudes[row]
            .iter()
            .zip(&self.omegas)
            .map(|(c, w)| c * Complex64::from_polar(1.0, -w * tau))
            .collect()
    }

    pub fn last_row(&self) -> usize {
        self.times.len() - 1
    }
}

fn amplitude_rhs(
    v: &PerturbationMatrix,
    omegas: &[f64],
    t: f64,
    side: Side,
    c: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mat = v.at(t, side)?;
    let tau = t - v.t0;
    let rotated: Vec<Complex64> = c
        .iter()
        .zip(omegas)
        .map(|(c, w)| c * Complex64::from_polar(1.0, -w * tau))
        .collect();
    let factor = Complex64::new(0.0, -1.0 / v.hbar);
    Ok((0..c.len())
        .map(|k| {
            let coupled: Complex64 = rotated
                .iter()
                .enumerate()
                .map(|(m, a)| a * mat.get(k, m))
                .sum();
            factor * Complex64::from_polar(1.0, omegas[k] * tau) * coupled
        })
        .collect())
}

/// Classical fixed-step RK4 over `span`, with the perturbation's jump times
/// added to the step grid so no step straddles a discontinuity.
pub fn integrate_amplitudes(
    v: &PerturbationMatrix,
    c0: &[Complex64],
    span: (f64, f64),
    steps: usize,
) -> Result<AmplitudeTrajectory> {
    if c0.len() != v.size() {
        return Err(Error::LengthMismatch {
            expected: v.size(),
            found: c0.len(),
        });
    }
    if !c0.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::param("c0", "initial amplitudes must be finite"));
    }
    let grid = TimePartition::new(span.0, span.1, steps, &v.breakpoints())?;
    let omegas = v.omegas();
    let norm = |c: &[Complex64]| c.iter().map(|z| z.norm_sqr()).sum::<f64>();

    let mut traj = AmplitudeTrajectory {
        times: vec![span.0],
        amplitudes: vec![c0.to_vec()],
        norm_history: vec![norm(c0)],
        omegas: omegas.clone(),
        t0: v.t0,
    };
    let mut c = c0.to_vec();
    for (step, (ta, tb)) in grid.intervals().enumerate() {
        let h = tb - ta;
        let mid = ta + 0.5 * h;
        let axpy = |base: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
            base.iter().zip(k).map(|(b, k)| b + k * s).collect()
        };
        let k1 = amplitude_rhs(v, &omegas, ta, Side::Right, &c)?;
        let k2 = amplitude_rhs(v, &omegas, mid, Side::Exact, &axpy(&c, &k1, 0.5 * h))?;
        let k3 = amplitude_rhs(v, &omegas, mid, Side::Exact, &axpy(&c, &k2, 0.5 * h))?;
        let k4 = amplitude_rhs(v, &omegas, tb, Side::Left, &axpy(&c, &k3, h))?;
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
        if !c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::AmplitudeDiverged {
                step,
                time: tb,
                partial: Box::new(traj),
            });
        }
        traj.times.push(tb);
        traj.norm_history.push(norm(&c));
        traj.amplitudes.push(c.clone());
    }
    Ok(traj)
}

/// Initial and target state of a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
}

/// First-order amplitude of `|to>` at the end of `quadrature`, starting from
/// `|from>` at its start:
///
/// `b_m = −(i/ħ) e^{−iω_m T} ∫ V_mn(t) e^{−i(ω_n − ω_m)(t − t₀)} dt`.
///
/// The integral uses the trapezoidal rule on the partition. Each panel reads
/// `V` from inside itself, so jumps on partition boundaries are integrated
/// exactly.
pub fn first_order_amplitude<F>(
    v_mn: F,
    transition: Transition,
    omegas: &[f64],
    hbar: f64,
    quadrature: &TimePartition,
) -> Result<Complex64>
where
    F: Fn(f64, Side) -> Result<Complex64>,
{
    let Transition { from: n, to: m } = transition;
    if n == m {
        return Err(Error::DiagonalAmplitude(n));
    }
    for idx in [n, m] {
        if idx >= omegas.len() {
            return Err(Error::LengthMismatch {
                expected: idx + 1,
                found: omegas.len(),
            });
        }
    }
    let t0 = quadrature.start();
    let detuning = omegas[n] - omegas[m];
    let integrand = |t: f64, side: Side| -> Result<Complex64> {
        Ok(v_mn(t, side)? * Complex64::from_polar(1.0, -detuning * (t - t0)))
    };
    let mut integral = Complex64::new(0.0, 0.0);
    for (a, b) in quadrature.intervals() {
        integral += (integrand(a, Side::Right)? + integrand(b, Side::Left)?) * (0.5 * (b - a));
    }
    let duration = quadrature.end() - t0;
    Ok(Complex64::new(0.0, -1.0 / hbar) * Complex64::from_polar(1.0, -omegas[m] * duration) * integral)
}

/// Norm-growth summary of an amplitude trajectory. Observational only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub initial_norm: f64,
    pub max_norm: f64,
    pub final_norm: f64,
    /// First time `Σ|C_k|²` exceeded [`DivergenceReport::THRESHOLD`].
    pub first_exceedance: Option<f64>,
}

impl DivergenceReport {
    pub const THRESHOLD: f64 = 1.1;
}

pub fn divergence_diagnostic(traj: &AmplitudeTrajectory) -> DivergenceReport {
    let first_exceedance = traj
        .norm_history
        .iter()
        .position(|&n| n > DivergenceReport::THRESHOLD)
        .map(|i| traj.times[i]);
    DivergenceReport {
        initial_norm: traj.norm_history.first().copied().unwrap_or(0.0),
        max_norm: traj.norm_history.iter().copied().fold(0.0, f64::max),
        final_norm: traj.norm_history.last().copied().unwrap_or(0.0),
        first_exceedance,
    }
}
