//! Frozen Hamiltonians as symmetric tridiagonal matrices, and their
//! eigenpairs.
//!
//! Two solvers are provided. The full spectrum uses implicit-shift QL with
//! eigenvector accumulation; a short low-lying window uses Sturm-sequence
//! bisection followed by inverse iteration, which is O(N) per eigenpair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, WaveFunction};
use crate::potential::{HamiltonianSpec, Side};

/// `H` under the 3-point finite-difference Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::LengthMismatch {
                expected: diagonal.len().saturating_sub(1),
                found: off_diagonal.len(),
            });
        }
        if !diagonal.iter().chain(&off_diagonal).all(|v| v.is_finite()) {
            return Err(Error::param("matrix", "entries must be finite"));
        }
        Ok(SymTridiagonal {
            diagonal,
            off_diagonal,
        })
    }

    /// Kinetic stencil plus the given potential values on each node.
    pub fn from_potential(h: &HamiltonianSpec, grid: &Grid, potential: &[f64]) -> Result<Self> {
        if potential.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                found: potential.len(),
            });
        }
        let dx = grid.dx();
        let kinetic = h.hbar() * h.hbar() / (h.mass() * dx * dx);
        let diagonal = potential.iter().map(|v| kinetic + v).collect();
        let off_diagonal = vec![-0.5 * kinetic; grid.points() - 1];
        Self::new(diagonal, off_diagonal)
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let (d, e) = (&self.diagonal, &self.off_diagonal);
        (0..n)
            .map(|i| {
                let mut s = v[i] * d[i];
                if i > 0 {
                    s += v[i - 1] * e[i - 1];
                }
                if i + 1 < n {
                    s += v[i + 1] * e[i];
                }
                s
            })
            .collect()
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        let (d, e) = (&self.diagonal, &self.off_diagonal);
        (0..n)
            .map(|i| {
                let mut s = v[i] * d[i];
                if i > 0 {
                    s += v[i - 1] * e[i - 1];
                }
                if i + 1 < n {
                    s += v[i + 1] * e[i];
                }
                s
            })
            .collect()
    }

    /// Gershgorin interval containing the spectrum.
    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off_diagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }
}

/// Grid representation of `H(t_freeze)`.
pub fn discretize(h: &HamiltonianSpec, grid: &Grid, t_freeze: f64) -> Result<SymTridiagonal> {
    let v = h.potential().sample(grid, t_freeze, Side::Exact)?;
    SymTridiagonal::from_potential(h, grid, &v)
}

/// How many of the lowest eigenpairs to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    Full,
    States(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::States(64)
    }
}

impl Truncation {
    pub fn resolve(self, dimension: usize) -> Result<usize> {
        match self {
            Truncation::Full => Ok(dimension),
            Truncation::States(0) => Err(Error::param("truncation", "must keep at least one state")),
            Truncation::States(m) if m > dimension => Err(Error::param(
                "truncation",
                format!("{m} states requested from a {dimension}-dimensional problem"),
            )),
            Truncation::States(m) => Ok(m),
        }
    }
}

/// Eigenvalues (ascending) with unit-norm eigenvectors in the plain dot
/// product.
#[derive(Clone, Debug)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const MAX_QL_SWEEPS: usize = 60;

/// Full decomposition by implicit-shift QL.
pub fn ql_implicit(m: &SymTridiagonal) -> Result<TridiagonalEigen> {
    let n = m.len();
    let mut d = m.diagonal.clone();
    let mut e = m.off_diagonal.clone();
    e.push(0.0);
    // Column-major: column i is eigenvector i.
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() + dd == dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (left, right) = z.split_at_mut((i + 1) * n);
                let zi = &mut left[i * n..];
                let zi1 = &mut right[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&i| z[i * n..(i + 1) * n].to_vec()).collect();
    Ok(TridiagonalEigen { values, vectors })
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(T - shift) x = b` in place with partial pivoting.
fn shifted_solve(m: &SymTridiagonal, shift: f64, b: &mut [f64], tiny: f64) {
    let n = m.len();
    let mut dd: Vec<f64> = m.diagonal.iter().map(|v| v - shift).collect();
    let mut dl = m.off_diagonal.clone();
    let mut du = m.off_diagonal.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == 0.0 {
                dd[i] = tiny;
            }
            let fact = dl[i] / dd[i];
            dl[i] = fact;
            dd[i + 1] -= fact * du[i];
        } else {
            let fact = dd[i] / dl[i];
            dd[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = dd[i + 1];
            dd[i + 1] = temp - fact * dd[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if dd[n - 1] == 0.0 {
        dd[n - 1] = tiny;
    }
    for i in 0..n - 1 {
        if swapped[i] {
            let temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl[i] * b[i];
        } else {
            b[i + 1] -= dl[i] * b[i];
        }
    }
    b[n - 1] /= dd[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i];
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

const INVERSE_ITERATIONS: usize = 3;

/// Lowest `count` eigenpairs by bisection and inverse iteration.
pub fn bisection_lowest(m: &SymTridiagonal, count: usize) -> Result<TridiagonalEigen> {
    let n = m.len();
    let d = &m.diagonal;
    let e2: Vec<f64> = m.off_diagonal.iter().map(|v| v * v).collect();
    let max_e2 = e2.iter().copied().fold(1.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_e2;
    let (gl, gu) = m.gershgorin();
    let norm = gl.abs().max(gu.abs()).max(f64::MIN_POSITIVE);
    let (mut lo_floor, hi_ceiling) = (gl - 1e-12 * norm, gu + 1e-12 * norm);

    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        let (mut lo, mut hi) = (lo_floor, hi_ceiling);
        let mut converged = false;
        for _ in 0..256 {
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin;
            if hi - lo <= tol {
                converged = true;
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                converged = true;
                break;
            }
            if sturm_count(d, &e2, mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { index: k });
        }
        values.push(0.5 * (lo + hi));
        lo_floor = lo;
    }

    let tiny = f64::EPSILON * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (k, &lambda) in values.iter().enumerate() {
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7 + k as f64).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            shifted_solve(m, lambda, &mut v, tiny);
            if normalize(&mut v) == 0.0 || !v.iter().all(|x| x.is_finite()) {
                return Err(Error::NoConvergence { index: k });
            }
            for prev in &vectors {
                let overlap: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(x, p)| *x -= overlap * p);
            }
            normalize(&mut v);
        }
        vectors.push(v);
    }
    Ok(TridiagonalEigen { values, vectors })
}

/// Orthonormal eigenstates of one frozen Hamiltonian, lowest first.
///
/// Each state is a unit eigenvector divided by `√dx`, so the states are
/// orthonormal under `dx · dot` and any state vanishing at the walls has unit
/// trapezoidal norm. The first component above `1e-8` in magnitude is
/// positive.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    energies: Vec<f64>,
    states: Vec<Vec<f64>>,
    grid: Grid,
    dimension: usize,
}

impl EigenBasis {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Size of the underlying matrix.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.dimension
    }

    /// Real amplitudes of state `k` on the grid.
    pub fn state_values(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn state(&self, k: usize) -> WaveFunction {
        WaveFunction::from_real(self.grid, &self.states[k]).expect("basis states match their grid")
    }

    /// `<v_j|v_k>` in the solver's metric, `dx` times the dot product.
    pub fn solver_overlap(&self, j: usize, k: usize) -> f64 {
        let dot: f64 = self.states[j]
            .iter()
            .zip(&self.states[k])
            .map(|(a, b)| a * b)
            .sum();
        dot * self.grid.dx()
    }

    /// Keeps the lowest `count` states.
    pub fn truncated(&self, count: usize) -> EigenBasis {
        let count = count.min(self.len());
        EigenBasis {
            energies: self.energies[..count].to_vec(),
            states: self.states[..count].to_vec(),
            grid: self.grid,
            dimension: self.dimension,
        }
    }

    #[cfg(test)]
    pub(crate) fn state_values_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.states[k]
    }
}

pub fn eigendecompose(
    m: &SymTridiagonal,
    grid: &Grid,
    truncation: Truncation,
) -> Result<EigenBasis> {
    let n = m.len();
    if n != grid.points() {
        return Err(Error::LengthMismatch {
            expected: grid.points(),
            found: n,
        });
    }
    let keep = truncation.resolve(n)?;
    let raw = if keep * 4 <= n {
        bisection_lowest(m, keep)?
    } else {
        ql_implicit(m)?
    };

    let scale = 1.0 / grid.dx().sqrt();
    let mut energies = Vec::with_capacity(keep);
    let mut states = Vec::with_capacity(keep);
    for (value, mut v) in raw.values.into_iter().zip(raw.vectors).take(keep) {
        let flip = v
            .iter()
            .map(|a| a * scale)
            .find(|a| a.abs() > 1e-8)
            .is_some_and(|a| a < 0.0);
        let signed = if flip { -scale } else { scale };
        v.iter_mut().for_each(|a| *a *= signed);
        energies.push(value);
        states.push(v);
    }
    Ok(EigenBasis {
        energies,
        states,
        grid: *grid,
        dimension: n,
    })
}

/// `‖H v_k − E_k v_k‖₂` for each retained pair, with `v_k` unit-normalized in
/// the plain 2-norm.
pub fn residual(m: &SymTridiagonal, basis: &EigenBasis) -> Result<Vec<f64>> {
    if m.len() != basis.dimension || m.len() != basis.grid.points() {
        return Err(Error::LengthMismatch {
            expected: basis.dimension,
            found: m.len(),
        });
    }
    Ok((0..basis.len())
        .map(|k| {
            let mut v = basis.states[k].clone();
            normalize(&mut v);
            let hv = m.apply_real(&v);
            let e = basis.energies[k];
            hv.iter()
                .zip(&v)
                .map(|(a, b)| (a - e * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}
