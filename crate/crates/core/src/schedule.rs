//! Partitions of a time interval into slices.

use crate::error::{Error, Result};
use crate::potential::ScaleProfile;

/// How the Hamiltonian is frozen over a slice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Averaging {
    /// Exact time average of `H(t)` over the slice.
    #[default]
    Integral,
    /// `[H(t_a) + H(t_b)] / 2`.
    MidpointEndpointMean,
}

/// Strictly increasing time boundaries: a uniform partition with the given
/// breakpoints spliced in.
#[derive(Clone, Debug, PartialEq)]
pub struct TimePartition {
    boundaries: Vec<f64>,
}

impl TimePartition {
    /// `intervals` uniform pieces of `[t0, t1]`, then every breakpoint strictly
    /// inside added. A breakpoint within rounding distance of an existing
    /// boundary replaces it instead of creating a sliver.
    pub fn new(t0: f64, t1: f64, intervals: usize, breakpoints: &[f64]) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::param("slices", "need at least one slice"));
        }
        if !(t0.is_finite() && t1.is_finite()) || t0 >= t1 {
            return Err(Error::param("t1", format!("need t0 < t1, got [{t0}, {t1}]")));
        }
        let span = t1 - t0;
        let mut boundaries: Vec<f64> = (0..=intervals)
            .map(|j| {
                if j == intervals {
                    t1
                } else {
                    t0 + span * j as f64 / intervals as f64
                }
            })
            .collect();
        let tol = 1e-12 * span.max(t0.abs()).max(t1.abs());
        for &d in breakpoints {
            if !(d > t0 && d < t1) {
                continue;
            }
            let pos = boundaries.partition_point(|&b| b < d);
            let near = |i: usize| boundaries.get(i).is_some_and(|&b| (b - d).abs() <= tol);
            if near(pos) {
                if pos != 0 && pos != boundaries.len() - 1 {
                    boundaries[pos] = d;
                }
            } else if pos > 0 && near(pos - 1) {
                if pos - 1 != 0 {
                    boundaries[pos - 1] = d;
                }
            } else {
                boundaries.insert(pos, d);
            }
        }
        Ok(TimePartition { boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn end(&self) -> f64 {
        self.boundaries[self.boundaries.len() - 1]
    }

    pub fn intervals(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SliceSchedule {
    partition: TimePartition,
    averaging: Averaging,
}

impl SliceSchedule {
    pub fn new(partition: TimePartition, averaging: Averaging) -> Self {
        SliceSchedule {
            partition,
            averaging,
        }
    }

    pub fn t0(&self) -> f64 {
        self.partition.start()
    }

    pub fn t1(&self) -> f64 {
        self.partition.end()
    }

    pub fn boundaries(&self) -> &[f64] {
        self.partition.boundaries()
    }

    pub fn averaging(&self) -> Averaging {
        self.averaging
    }

    pub fn slice_count(&self) -> usize {
        self.partition.len()
    }

    pub fn slices(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.partition.intervals()
    }
}

/// Uniform slicing of `[t0, t1]` with the profile's jumps inserted as extra
/// boundaries.
pub fn build_schedule(
    t0: f64,
    t1: f64,
    slices: usize,
    profile: &ScaleProfile,
    averaging: Averaging,
) -> Result<SliceSchedule> {
    let partition = TimePartition::new(t0, t1, slices, &profile.discontinuities())?;
    Ok(SliceSchedule::new(partition, averaging))
}
