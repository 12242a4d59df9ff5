//! Time-dependent scalar potentials and the Hamiltonians built from them.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::GaussLegendre;
use crate::schedule::Averaging;

/// Which one-sided limit to take when evaluating at a discontinuity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The value the profile assigns at `t` itself.
    Exact,
    /// Limit approaching `t` from below.
    Left,
    /// Limit approaching `t` from above.
    Right,
}

/// Multiplier `S(t)` applied to a harmonic spring constant.
///
/// Step and pulse profiles use closed-left/open-right branches: `S = 1` for
/// `t <= t_on`, `S = eta` on `(t_on, t_off)`, and `S = 1` again for `t >= t_off`.
/// Sampled profiles interpolate linearly between samples and are undefined
/// outside the sampled range.
#[derive(Clone, Debug, PartialEq)]
pub enum ScaleProfile {
    Constant { value: f64 },
    Step { eta: f64, t_on: f64 },
    Pulse { eta: f64, t_on: f64, t_off: f64 },
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl ScaleProfile {
    pub fn unit() -> Self {
        ScaleProfile::Constant { value: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScaleProfile::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::param("value", "must be finite"));
                }
            }
            ScaleProfile::Step { eta, t_on } => {
                check_eta(*eta)?;
                if !t_on.is_finite() {
                    return Err(Error::param("t_on", "must be finite"));
                }
            }
            ScaleProfile::Pulse { eta, t_on, t_off } => {
                check_eta(*eta)?;
                if !(t_on.is_finite() && t_off.is_finite()) || t_on >= t_off {
                    return Err(Error::param("t_off", "must be finite and after t_on"));
                }
            }
            ScaleProfile::Sampled { times, values } => {
                if times.len() < 2 || times.len() != values.len() {
                    return Err(Error::param(
                        "times",
                        "need at least two samples and one value per time",
                    ));
                }
                if !times.windows(2).all(|w| w[0] < w[1]) || !times.iter().all(|t| t.is_finite())
                {
                    return Err(Error::param("times", "must be finite and strictly increasing"));
                }
                if !values.iter().all(|v| v.is_finite()) {
                    return Err(Error::param("values", "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.value_at(t, Side::Exact)
    }

    pub fn value_at(&self, t: f64, side: Side) -> Result<f64> {
        Ok(match *self {
            ScaleProfile::Constant { value } => value,
            ScaleProfile::Step { eta, t_on } => {
                let before = match side {
                    Side::Exact | Side::Left => t <= t_on,
                    Side::Right => t < t_on,
                };
                if before {
                    1.0
                } else {
                    eta
                }
            }
            ScaleProfile::Pulse { eta, t_on, t_off } => {
                let (before, inside) = match side {
                    Side::Exact => (t <= t_on, t < t_off),
                    Side::Left => (t <= t_on, t <= t_off),
                    Side::Right => (t < t_on, t < t_off),
                };
                if before || !inside {
                    1.0
                } else {
                    eta
                }
            }
            ScaleProfile::Sampled {
                ref times,
                ref values,
            } => interpolate(times, values, t)?,
        })
    }

    /// Jump locations of `S(t)`.
    pub fn discontinuities(&self) -> Vec<f64> {
        match *self {
            ScaleProfile::Step { t_on, .. } => vec![t_on],
            ScaleProfile::Pulse { t_on, t_off, .. } => vec![t_on, t_off],
            _ => Vec::new(),
        }
    }

    /// Points where `S(t)` is not smooth: jumps plus interpolation nodes.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            ScaleProfile::Sampled { times, .. } => times.clone(),
            _ => self.discontinuities(),
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, ScaleProfile::Sampled { .. })
    }

    /// Mean of `S` over `[ta, tb]`: 16-point Gauss–Legendre on every smooth
    /// piece, which is exact for the piecewise-constant and piecewise-linear
    /// profiles this type can express.
    pub fn average(&self, ta: f64, tb: f64) -> Result<f64> {
        if let ScaleProfile::Constant { value } = *self {
            return Ok(value);
        }
        let parts = pieces(ta, tb, &self.breakpoints());
        if self.is_piecewise_constant() {
            if let [(a, b)] = parts[..] {
                return self.value(0.5 * (a + b));
            }
            let total: f64 = parts
                .iter()
                .map(|&(a, b)| Ok((b - a) * self.value(0.5 * (a + b))?))
                .sum::<Result<f64>>()?;
            return Ok(total / (tb - ta));
        }
        let rule = GaussLegendre::sixteen();
        let mut total = 0.0;
        for (a, b) in parts {
            for (t, w) in rule.mapped(a, b) {
                total += w * self.value(t)?;
            }
        }
        Ok(total / (tb - ta))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::param("eta", format!("must be positive, got {eta}")))
    }
}

/// Splits `[a, b]` at every breakpoint strictly inside it.
pub(crate) fn pieces(a: f64, b: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for c in cuts {
        out.push((lo, c));
        lo = c;
    }
    out.push((lo, b));
    out
}

/// Locates `t` in `times`: index of the left sample and the fractional weight
/// of the right one.
fn locate(times: &[f64], t: f64) -> Result<(usize, f64)> {
    let (min, max) = (times[0], times[times.len() - 1]);
    if !(t >= min && t <= max) {
        return Err(Error::TimeOutOfRange { t, min, max });
    }
    let j = match times.binary_search_by(|s| s.total_cmp(&t)) {
        Ok(j) => return Ok((j.min(times.len() - 2), if j == times.len() - 1 { 1.0 } else { 0.0 })),
        Err(j) => j - 1,
    };
    let lambda = (t - times[j]) / (times[j + 1] - times[j]);
    Ok((j, lambda))
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> Result<f64> {
    let (j, lambda) = locate(times, t)?;
    Ok((1.0 - lambda) * values[j] + lambda * values[j + 1])
}

/// `V(x_i, t_j)` on a fixed grid, linear in `t` between samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedPotential {
    grid: Grid,
    times: Vec<f64>,
    /// One row per time sample, one column per grid node.
    values: Vec<Vec<f64>>,
}

impl TabulatedPotential {
    pub fn new(grid: Grid, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::param("times", "need one row of values per time sample"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) || !times.iter().all(|t| t.is_finite()) {
            return Err(Error::param("times", "must be finite and strictly increasing"));
        }
        for row in &values {
            if row.len() != grid.points() {
                return Err(Error::LengthMismatch {
                    expected: grid.points(),
                    found: row.len(),
                });
            }
            if !row.iter().all(|v| v.is_finite()) {
                return Err(Error::param("values", "must be finite"));
            }
        }
        Ok(TabulatedPotential {
            grid,
            times,
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Row index and weight of the following row. A single-row table is
    /// static in time.
    fn time_weights(&self, t: f64) -> Result<(usize, f64)> {
        if self.times.len() == 1 {
            return Ok((0, 0.0));
        }
        locate(&self.times, t)
    }

    fn row_at(&self, t: f64) -> Result<Vec<f64>> {
        let (j, lambda) = self.time_weights(t)?;
        if lambda == 0.0 {
            return Ok(self.values[j].clone());
        }
        Ok(self.values[j]
            .iter()
            .zip(&self.values[j + 1])
            .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
            .collect())
    }

    fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        let row_a_b = self.time_weights(t)?;
        let g = &self.grid;
        if x < g.x_min() || x > g.x_max() {
            return Err(Error::param("x", format!("{x} outside the tabulated grid")));
        }
        let s = ((x - g.x_min()) / g.dx()).min((g.points() - 1) as f64);
        let i = (s.floor() as usize).min(g.points() - 2);
        let mu = s - i as f64;
        let at = |row: &Vec<f64>| (1.0 - mu) * row[i] + mu * row[i + 1];
        let (j, lambda) = row_a_b;
        let v0 = at(&self.values[j]);
        if lambda == 0.0 {
            return Ok(v0);
        }
        Ok((1.0 - lambda) * v0 + lambda * at(&self.values[j + 1]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    /// `k x² / 2`.
    Harmonic { k: f64 },
    /// `S(t) k x² / 2`.
    ScaledHarmonic { k: f64, profile: ScaleProfile },
    Tabulated(TabulatedPotential),
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Harmonic { k } => check_spring(*k),
            PotentialSpec::ScaledHarmonic { k, profile } => {
                check_spring(*k)?;
                profile.validate()
            }
            PotentialSpec::Tabulated(_) => Ok(()),
        }
    }

    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            PotentialSpec::Harmonic { k } => Ok(0.5 * k * x * x),
            PotentialSpec::ScaledHarmonic { k, profile } => Ok(profile.value(t)? * 0.5 * k * x * x),
            PotentialSpec::Tabulated(tab) => tab.evaluate(x, t),
        }
    }

    /// Potential at every node of `grid` at time `t`.
    pub fn sample(&self, grid: &Grid, t: f64, side: Side) -> Result<Vec<f64>> {
        match self {
            PotentialSpec::Harmonic { k } => Ok(spring_samples(grid, *k, 1.0)),
            PotentialSpec::ScaledHarmonic { k, profile } => {
                Ok(spring_samples(grid, *k, profile.value_at(t, side)?))
            }
            PotentialSpec::Tabulated(tab) => {
                if tab.grid != *grid {
                    return Err(Error::IncompatibleGrids);
                }
                tab.row_at(t)
            }
        }
    }

    /// Node values of the potential averaged over `[ta, tb]`.
    ///
    /// Endpoint averaging uses the one-sided limits from inside the slice, so a
    /// slice bounded by a jump sees only the branch it covers.
    pub fn averaged_samples(
        &self,
        grid: &Grid,
        ta: f64,
        tb: f64,
        averaging: Averaging,
    ) -> Result<Vec<f64>> {
        match averaging {
            Averaging::MidpointEndpointMean => {
                let a = self.sample(grid, ta, Side::Right)?;
                let b = self.sample(grid, tb, Side::Left)?;
                Ok(a.iter().zip(&b).map(|(a, b)| 0.5 * (a + b)).collect())
            }
            Averaging::Integral => match self {
                PotentialSpec::Harmonic { k } => Ok(spring_samples(grid, *k, 1.0)),
                PotentialSpec::ScaledHarmonic { k, profile } => {
                    Ok(spring_samples(grid, *k, profile.average(ta, tb)?))
                }
                PotentialSpec::Tabulated(tab) => {
                    if tab.grid != *grid {
                        return Err(Error::IncompatibleGrids);
                    }
                    let rule = GaussLegendre::sixteen();
                    let mut acc = vec![0.0; grid.points()];
                    for (a, b) in pieces(ta, tb, &tab.times) {
                        for (t, w) in rule.mapped(a, b) {
                            let (j, lambda) = tab.time_weights(t)?;
                            let lo = &tab.values[j];
                            if lambda == 0.0 {
                                acc.iter_mut().zip(lo).for_each(|(s, v)| *s += w * v);
                            } else {
                                let hi = &tab.values[j + 1];
                                for ((s, v0), v1) in acc.iter_mut().zip(lo).zip(hi) {
                                    *s += w * ((1.0 - lambda) * v0 + lambda * v1);
                                }
                            }
                        }
                    }
                    let span = tb - ta;
                    Ok(acc.into_iter().map(|s| s / span).collect())
                }
            },
        }
    }

    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            PotentialSpec::ScaledHarmonic { profile, .. } => profile.discontinuities(),
            _ => Vec::new(),
        }
    }

    /// True when `V` only ever jumps between constant values.
    pub fn is_piecewise_constant(&self) -> bool {
        match self {
            PotentialSpec::Harmonic { .. } => true,
            PotentialSpec::ScaledHarmonic { profile, .. } => profile.is_piecewise_constant(),
            PotentialSpec::Tabulated(tab) => tab.values.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

fn check_spring(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::param("k", format!("must be positive, got {k}")))
    }
}

fn spring_samples(grid: &Grid, k: f64, scale: f64) -> Vec<f64> {
    grid.nodes().map(|x| scale * 0.5 * k * x * x).collect()
}

/// `H(t) = p²/2m + V(x, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    mass: f64,
    hbar: f64,
    potential: PotentialSpec,
}

impl HamiltonianSpec {
    pub fn new(mass: f64, hbar: f64, potential: PotentialSpec) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::param("mass", format!("must be positive, got {mass}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::param("hbar", format!("must be positive, got {hbar}")));
        }
        potential.validate()?;
        Ok(HamiltonianSpec {
            mass,
            hbar,
            potential,
        })
    }

    /// `ħ = m = 1`.
    pub fn natural(potential: PotentialSpec) -> Result<Self> {
        Self::new(1.0, 1.0, potential)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn with_potential(&self, potential: PotentialSpec) -> Result<Self> {
        Self::new(self.mass, self.hbar, potential)
    }
}

pub fn evaluate_potential(h: &HamiltonianSpec, x: f64, t: f64) -> Result<f64> {
    h.potential.evaluate(x, t)
}
