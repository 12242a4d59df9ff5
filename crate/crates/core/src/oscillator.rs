//! Closed-form harmonic-oscillator results used as an independent check on
//! the grid engine: normalized Hermite functions, sudden-quench overlaps, the
//! energies they imply, and the phase picked up across a revival pulse.
//!
//! Nothing here touches the finite-difference grid; overlaps are computed by
//! Gauss–Legendre quadrature on the continuous line.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Highest Hermite order evaluated.
pub const MAX_ORDER: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    hbar: f64,
    k: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, hbar: f64, k: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("hbar", hbar), ("k", k)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(OscillatorParams { mass, hbar, k })
    }

    /// `m = ħ = k = 1`.
    pub fn unit() -> Self {
        OscillatorParams {
            mass: 1.0,
            hbar: 1.0,
            k: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> f64 {
        (self.k / self.mass).sqrt()
    }

    /// Inverse length scale `(m k / ħ²)^{1/4}`.
    pub fn alpha(&self) -> f64 {
        (self.mass * self.k / (self.hbar * self.hbar)).powf(0.25)
    }

    /// Same oscillator with spring constant `eta * k`.
    pub fn quenched(&self, eta: f64) -> Result<Self> {
        Self::new(self.mass, self.hbar, self.k * eta)
    }

    pub fn energy(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.hbar * self.omega()
    }
}

/// `φ_0 … φ_{n_max}` at `x`.
///
/// Iterates directly on the normalized functions,
/// `φ_{n+1} = √(2/(n+1)) ξ φ_n − √(n/(n+1)) φ_{n−1}`, so no factorials or
/// bare Hermite polynomials appear.
pub fn hermite_functions(params: &OscillatorParams, n_max: usize, x: f64) -> Result<Vec<f64>> {
    if n_max > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n: n_max,
            max: MAX_ORDER,
        });
    }
    let alpha = params.alpha();
    let xi = alpha * x;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push((alpha / PI.sqrt()).sqrt() * (-0.5 * xi * xi).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * xi * out[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// `N_n(α) H_n(αx) exp(−α²x²/2)`.
pub fn hermite_eigenfunction(params: &OscillatorParams, n: usize, x: f64) -> Result<f64> {
    Ok(hermite_functions(params, n, x)?[n])
}

/// `∫ φ_m^{(a)}(x) φ_n^{(b)}(x) dx` by panel-doubling Gauss–Legendre on
/// `[−L, L]`, `L = 10 / min(α_a, α_b)`, until two successive estimates agree
/// to `1e-10`.
pub fn overlap_integral(
    a: &OscillatorParams,
    m: usize,
    b: &OscillatorParams,
    n: usize,
) -> Result<f64> {
    Ok(overlap_row(a, m, b, n)?[n])
}

/// `∫ φ_m^{(a)} φ_j^{(b)} dx` for every `j ≤ n_max`.
fn overlap_row(a: &OscillatorParams, m: usize, b: &OscillatorParams, n_max: usize) -> Result<Vec<f64>> {
    if m > MAX_ORDER || n_max > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n: m.max(n_max),
            max: MAX_ORDER,
        });
    }
    let half_width = 10.0 / a.alpha().min(b.alpha());
    let rule = GaussLegendre::new(24);
    let integrate = |panels: usize| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; n_max + 1];
        let width = 2.0 * half_width / panels as f64;
        for p in 0..panels {
            let lo = -half_width + p as f64 * width;
            for (x, w) in rule.mapped(lo, lo + width) {
                let fa = hermite_functions(a, m, x)?[m];
                let fb = hermite_functions(b, n_max, x)?;
                for (s, f) in acc.iter_mut().zip(fb) {
                    *s += w * fa * f;
                }
            }
        }
        Ok(acc)
    };
    let mut panels = 8;
    let mut prev = integrate(panels)?;
    loop {
        panels *= 2;
        let next = integrate(panels)?;
        let change = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if change < 1e-10 || panels >= 4096 {
            return Ok(next);
        }
        prev = next;
    }
}

/// Overlaps of the pre-quench ground state with the eigenstates of the
/// quenched oscillator (`k → η k`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchCoefficients {
    pub eta: f64,
    pub coefficients: Vec<f64>,
}

impl QuenchCoefficients {
    pub fn population(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
}

/// `C_n = ∫ φ_0^{(α)} φ_n^{(α′)} dx`, `α′ = η^{1/4} α`, for `n ≤ n_max`.
///
/// The ground state is even, so odd-`n` overlaps vanish identically; they are
/// stored as exact zeros.
pub fn sudden_quench_coefficients(eta: f64, n_max: usize) -> Result<QuenchCoefficients> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be positive, got {eta}")));
    }
    let before = OscillatorParams::unit();
    let after = before.quenched(eta)?;
    let mut coefficients = overlap_row(&before, 0, &after, n_max)?;
    for c in coefficients.iter_mut().skip(1).step_by(2) {
        *c = 0.0;
    }
    Ok(QuenchCoefficients { eta, coefficients })
}

/// `C_0` in closed form: `√(2 α α′ / (α² + α′²))`.
pub fn ground_overlap_closed_form(eta: f64) -> f64 {
    let a = 1.0;
    let b = eta.powf(0.25);
    (2.0 * a * b / (a * a + b * b)).sqrt()
}

/// `⟨E⟩ / E_0` after the quench, keeping only `n ≤ n_max`:
/// `Σ C_n² (n + ½) √η / ½`.
pub fn truncated_quench_energy(eta: f64, n_max: usize) -> Result<f64> {
    let q = sudden_quench_coefficients(eta, n_max)?;
    Ok(q.coefficients
        .iter()
        .enumerate()
        .map(|(n, c)| c * c * (n as f64 + 0.5) * eta.sqrt())
        .sum::<f64>()
        / 0.5)
}

/// `<ψ_0|H′|ψ_0> / E_0 = (1 + η) / 2`.
pub fn sudden_energy_ratio(eta: f64) -> f64 {
    0.5 * (1.0 + eta)
}

/// Pulse duration `4π / ω′` after which every quenched component is back in
/// phase.
pub fn revival_time(params: &OscillatorParams, eta: f64) -> f64 {
    4.0 * PI / (eta.sqrt() * params.omega())
}

/// Predicted `arg <ψ_unperturbed(T)|ψ_pulsed(T)>` for a revival pulse:
/// `2π/√η` wrapped into `(−π, π]`.
pub fn pulse_phase_prediction(eta: f64) -> f64 {
    wrap_phase(2.0 * PI / eta.sqrt())
}

/// Reduces an angle into `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let turns = ((theta - PI) / (2.0 * PI)).ceil();
    let r = theta - 2.0 * PI * turns;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}
