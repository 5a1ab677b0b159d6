//! Cadlag piecewise-constant trajectories over a finite state alphabet.

use serde::{Deserialize, Serialize};

/// A cadlag piecewise-constant path on `[0, horizon]`: an initial state plus
/// a sorted list of jumps `(time, new state)`.
///
/// Jump times are strictly increasing and lie in `(0, horizon]`; consecutive
/// states are distinct. The value at `t` is the state set by the last jump
/// at or before `t` (right-continuity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPath {
    pub initial: u8,
    pub jumps: Vec<(f64, u8)>,
    pub horizon: f64,
}

impl TrajectoryPath {
    /// Constant path with no jumps.
    pub fn constant(state: u8, horizon: f64) -> Self {
        TrajectoryPath { initial: state, jumps: Vec::new(), horizon }
    }

    /// Build from parts, checking the path invariants.
    pub fn new(initial: u8, jumps: Vec<(f64, u8)>, horizon: f64) -> Result<Self, PathError> {
        let p = TrajectoryPath { initial, jumps, horizon };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), PathError> {
        if !(self.horizon >= 0.0) {
            return Err(PathError::BadHorizon(self.horizon));
        }
        let mut prev_t = 0.0;
        let mut prev_s = self.initial;
        for &(t, s) in &self.jumps {
            if !(t > prev_t) || t > self.horizon {
                return Err(PathError::BadJumpTime(t));
            }
            if s == prev_s {
                return Err(PathError::RepeatedState(t));
            }
            prev_t = t;
            prev_s = s;
        }
        Ok(())
    }

    /// State at time `t` (cadlag evaluation).
    pub fn value(&self, t: f64) -> u8 {
        // paths are short; linear scan beats binary search for the common case
        let mut s = self.initial;
        for &(tau, state) in &self.jumps {
            if tau > t {
                break;
            }
            s = state;
        }
        s
    }

    /// Append a jump at the end of the path. Panics if it violates ordering.
    pub fn push_jump(&mut self, t: f64, state: u8) {
        let last_t = self.jumps.last().map_or(0.0, |j| j.0);
        assert!(t > last_t && t <= self.horizon, "jump time out of order: {t}");
        let last_s = self.jumps.last().map_or(self.initial, |j| j.1);
        assert_ne!(last_s, state, "jump to the same state");
        self.jumps.push((t, state));
    }

    /// Final state at the horizon.
    pub fn final_state(&self) -> u8 {
        self.jumps.last().map_or(self.initial, |j| j.1)
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// Restrict to `[0, t]`, dropping later jumps. `t` becomes the horizon.
    pub fn truncated(&self, t: f64) -> Self {
        TrajectoryPath {
            initial: self.initial,
            jumps: self.jumps.iter().copied().take_while(|&(tau, _)| tau <= t).collect(),
            horizon: t,
        }
    }

    /// Extend the horizon, freezing the final state on the new segment.
    pub fn extended(&self, horizon: f64) -> Self {
        assert!(horizon >= self.horizon);
        TrajectoryPath { initial: self.initial, jumps: self.jumps.clone(), horizon }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PathError {
    #[error("horizon must be nonnegative, got {0}")]
    BadHorizon(f64),
    #[error("jump time {0} not strictly increasing within (0, horizon]")]
    BadJumpTime(f64),
    #[error("jump at t={0} repeats the current state")]
    RepeatedState(f64),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cadlag_evaluation() {
        let p = TrajectoryPath::new(0, vec![(0.3, 1), (0.7, 0)], 1.0).unwrap();
        assert_eq!(p.value(0.0), 0);
        assert_eq!(p.value(0.29999), 0);
        assert_eq!(p.value(0.3), 1); // right-continuous at the jump
        assert_eq!(p.value(0.5), 1);
        assert_eq!(p.value(0.7), 0);
        assert_eq!(p.value(1.0), 0);
        assert_eq!(p.final_state(), 0);
    }

    #[test]
    fn invariants_rejected() {
        assert_eq!(
            TrajectoryPath::new(0, vec![(0.5, 1), (0.5, 0)], 1.0).unwrap_err(),
            PathError::BadJumpTime(0.5)
        );
        assert_eq!(
            TrajectoryPath::new(0, vec![(0.5, 0)], 1.0).unwrap_err(),
            PathError::RepeatedState(0.5)
        );
        assert_eq!(
            TrajectoryPath::new(0, vec![(1.5, 1)], 1.0).unwrap_err(),
            PathError::BadJumpTime(1.5)
        );
    }

    #[test]
    fn truncate_and_extend() {
        let p = TrajectoryPath::new(1, vec![(0.2, 0), (0.9, 1)], 1.0).unwrap();
        let q = p.truncated(0.5);
        assert_eq!(q.jumps, vec![(0.2, 0)]);
        assert_eq!(q.horizon, 0.5);
        let r = q.extended(2.0);
        assert_eq!(r.value(1.7), 0);
        assert_eq!(r.horizon, 2.0);
    }
}
