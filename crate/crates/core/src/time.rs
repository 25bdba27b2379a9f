//! Integer time base and the activation-timing scan grid.
//!
//! The scan step of 12.5 ps has no exact binary-float representation, so
//! every timing is stored as an integer count of femtoseconds. Picosecond
//! floats only appear at the API boundary.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Femtoseconds per picosecond.
pub const FS_PER_PS: i64 = 1_000;

/// A time offset or delay, stored in integer femtoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeFs(i64);

impl TimeFs {
    pub const ZERO: TimeFs = TimeFs(0);

    pub const fn from_fs(fs: i64) -> Self {
        TimeFs(fs)
    }

    /// Converts from picoseconds, rounding to the nearest femtosecond.
    pub fn from_ps(ps: f64) -> Self {
        TimeFs((ps * FS_PER_PS as f64).round() as i64)
    }

    pub const fn as_fs(self) -> i64 {
        self.0
    }

    pub fn as_ps(self) -> f64 {
        self.0 as f64 / FS_PER_PS as f64
    }

    pub fn abs_diff(self, other: Self) -> Self {
        TimeFs((self.0 - other.0).abs())
    }

    pub const fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for TimeFs {
    type Output = TimeFs;
    fn add(self, rhs: Self) -> Self {
        TimeFs(self.0 + rhs.0)
    }
}

impl Sub for TimeFs {
    type Output = TimeFs;
    fn sub(self, rhs: Self) -> Self {
        TimeFs(self.0 - rhs.0)
    }
}

impl fmt::Display for TimeFs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ps", self.as_ps())
    }
}

/// Shortest separation between two offsets on a cyclic time axis.
pub fn cyclic_distance(a: TimeFs, b: TimeFs, period: TimeFs) -> TimeFs {
    debug_assert!(period.is_positive());
    let p = period.as_fs();
    let d = (a.as_fs() - b.as_fs()).rem_euclid(p);
    TimeFs::from_fs(d.min(p - d))
}

/// The electronic delay grid scanned during line-length measurement.
///
/// `n_steps` candidate activation timings spaced `step` apart cover one
/// full gating cycle, so `cycle_period == n_steps * step` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingGrid {
    step: TimeFs,
    n_steps: u32,
}

impl TimingGrid {
    pub fn new(step: TimeFs, n_steps: u32) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::invalid(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if n_steps < 2 {
            return Err(Error::invalid(format!(
                "grid needs at least 2 steps, got {n_steps}"
            )));
        }
        Ok(TimingGrid { step, n_steps })
    }

    pub fn step(&self) -> TimeFs {
        self.step
    }

    pub fn n_steps(&self) -> u32 {
        self.n_steps
    }

    pub fn cycle_period(&self) -> TimeFs {
        TimeFs::from_fs(self.step.as_fs() * self.n_steps as i64)
    }

    /// Candidate activation timings, in scan order.
    pub fn candidates(&self) -> impl Iterator<Item = TimeFs> + '_ {
        let step = self.step.as_fs();
        (0..self.n_steps).map(move |k| TimeFs::from_fs(step * k as i64))
    }

    /// Reduces an offset into `[0, cycle_period)`.
    pub fn wrap(&self, t: TimeFs) -> TimeFs {
        TimeFs::from_fs(t.as_fs().rem_euclid(self.cycle_period().as_fs()))
    }

    /// Nearest grid point to `t` on the cyclic axis. Exact midpoints snap
    /// to the higher candidate.
    pub fn snap(&self, t: TimeFs) -> TimeFs {
        let step = self.step.as_fs();
        let t = self.wrap(t).as_fs();
        let k = (2 * t + step) / (2 * step);
        TimeFs::from_fs(step * (k % self.n_steps as i64))
    }

    pub fn contains(&self, t: TimeFs) -> bool {
        let t = t.as_fs();
        t >= 0 && t < self.cycle_period().as_fs() && t % self.step.as_fs() == 0
    }
}

impl Default for TimingGrid {
    /// 12.5 ps step, 64 steps: one 800 ps cycle of a 1.25 GHz gate.
    fn default() -> Self {
        TimingGrid {
            step: TimeFs::from_fs(12_500),
            n_steps: 64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_covers_one_gate_cycle() {
        let grid = TimingGrid::default();
        assert_eq!(grid.step(), TimeFs::from_ps(12.5));
        assert_eq!(grid.n_steps(), 64);
        assert_eq!(grid.cycle_period(), TimeFs::from_ps(800.0));
        assert_eq!(
            grid.cycle_period().as_fs(),
            grid.step().as_fs() * grid.n_steps() as i64
        );
    }

    #[test]
    fn candidates_lie_on_grid() {
        let grid = TimingGrid::default();
        let candidates: Vec<_> = grid.candidates().collect();
        assert_eq!(candidates.len(), 64);
        assert!(candidates.iter().all(|&t| grid.contains(t)));
        assert_eq!(candidates[0], TimeFs::ZERO);
        assert_eq!(candidates[63], TimeFs::from_ps(787.5));
    }

    #[test]
    fn snap_picks_nearest_candidate() {
        let grid = TimingGrid::default();
        assert_eq!(grid.snap(TimeFs::from_ps(240.0)), TimeFs::from_ps(237.5));
        assert_eq!(grid.snap(TimeFs::from_ps(560.0)), TimeFs::from_ps(562.5));
        assert_eq!(grid.snap(TimeFs::from_ps(400.0)), TimeFs::from_ps(400.0));
        // wrap-around: 795 ps is closer to 0 than to 787.5
        assert_eq!(grid.snap(TimeFs::from_ps(795.0)), TimeFs::ZERO);
    }

    #[test]
    fn cyclic_distance_wraps() {
        let period = TimeFs::from_ps(800.0);
        let d = cyclic_distance(TimeFs::from_ps(790.0), TimeFs::from_ps(10.0), period);
        assert_eq!(d, TimeFs::from_ps(20.0));
        let d = cyclic_distance(TimeFs::from_ps(10.0), TimeFs::from_ps(790.0), period);
        assert_eq!(d, TimeFs::from_ps(20.0));
        let d = cyclic_distance(TimeFs::from_ps(100.0), TimeFs::from_ps(500.0), period);
        assert_eq!(d, TimeFs::from_ps(400.0));
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(TimingGrid::new(TimeFs::ZERO, 64).is_err());
        assert!(TimingGrid::new(TimeFs::from_ps(12.5), 1).is_err());
    }
}
