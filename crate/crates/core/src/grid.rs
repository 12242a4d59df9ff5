//! Uniform 1-D lattices, complex wavefunctions on them, and the trapezoidal
//! inner product everything else is measured with.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice `x_i = x_min + i * dx` with `points` nodes. The walls sit on
/// the first and last node; amplitudes are implicitly zero outside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min ({x_min}) must be below x_max ({x_max})"
            )));
        }
        if points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {points}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            points,
        })
    }

    /// `[-12, 12]` with 1024 nodes.
    pub fn standard() -> Self {
        Grid {
            x_min: -12.0,
            x_max: 12.0,
            points: 1024,
        }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    /// Node coordinate, computed from the index so nothing accumulates.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            return self.x_max;
        }
        self.x_min + i as f64 * (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.x(i))
    }

    /// Trapezoidal weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.points {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.weight(i)).collect()
    }

    /// Nearest node index for `x`, if `x` lies within half a spacing of one.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let s = (x - self.x_min) / self.dx();
        let i = s.round();
        if i < 0.0 || i >= self.points as f64 || (s - i).abs() > 1e-9 {
            None
        } else {
            Some(i as usize)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                found: amplitudes.len(),
            });
        }
        Ok(WaveFunction { grid, amplitudes })
    }

    pub fn zeros(grid: Grid) -> Self {
        WaveFunction {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.points()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.nodes().map(f).collect();
        WaveFunction { grid, amplitudes }
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        WaveFunction {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Copy rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = norm_squared(self);
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Trapezoidal L2 distance to `other`.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleGrids);
        }
        let d: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .enumerate()
            .map(|(i, (a, b))| self.grid.weight(i) * (a - b).norm_sqr())
            .sum();
        Ok(d.sqrt())
    }
}

/// `Σ conj(bra_i) ket_i w_i` with trapezoidal weights.
pub fn inner_product(bra: &WaveFunction, ket: &WaveFunction) -> Result<Complex64> {
    if bra.grid != ket.grid {
        return Err(Error::IncompatibleGrids);
    }
    let grid = &bra.grid;
    Ok(bra
        .amplitudes
        .iter()
        .zip(&ket.amplitudes)
        .enumerate()
        .map(|(i, (b, k))| b.conj() * k * grid.weight(i))
        .sum())
}

pub fn norm_squared(psi: &WaveFunction) -> f64 {
    let grid = &psi.grid;
    psi.amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * grid.weight(i))
        .sum()
}
