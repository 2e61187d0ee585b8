//! Time-optimal speed profile along a discretized path.
//!
//! The single unknown per configuration is `z`, the quadratic mean of the two
//! wheel speeds. Point-wise constraints bound each `z_i` from above;
//! pairwise constraints relate `z_i` and `z_{i+1}`. The solver runs in three
//! linear passes:
//!
//! 1. caps from the point-wise constraints, lowered where a neighbour could
//!    not be reached or left;
//! 2. a forward pass taking the largest velocity reachable from the previous
//!    one;
//! 3. a backward pass lowering every velocity that cannot slow down in time
//!    for the next one.
//!
//! If the backward pass has to lower the initial velocity, the requested
//! initial speed is infeasible.

mod constraints;
mod kinematics;

use thiserror::Error;

use crate::discretize::DiscretizedPath;

pub use constraints::{
    pairwise_holds, pointwise_cap, solve_max_first, solve_max_second, ConstraintSet, Override, OverrideConstraint,
    PairwiseConstraint, PairwiseHook, PointwiseConstraint, RobotGeometry, StepContext,
};
pub use kinematics::{center_speed, omega, wheel_speeds};

use constraints::Resolved;

/// Tolerance when comparing the achieved and requested initial speed.
const INITIAL_SPEED_TOL: f64 = 1e-9;
/// Absolute search tolerance when a cap has to be lowered by bisection.
const CAP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("no point-wise constraint bounds the velocity at index {index}")]
    UnboundedCap { index: usize },
    #[error("no velocity satisfies the constraints around index {index}")]
    InfeasibleCap { index: usize },
    #[error(
        "initial speed {requested} is infeasible: the path cannot be followed from it (limit reached at index {index}, \
         best initial speed {achievable})"
    )]
    InfeasibleInitialSpeed { index: usize, requested: f64, achievable: f64 },
    #[error("step {index} has zero velocity at both ends")]
    StalledStep { index: usize },
    #[error("expected {expected} velocities, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Velocities and timestamps at every configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    /// Caps after narrowing.
    pub caps: Vec<f64>,
}

impl SpeedProfile {
    /// `(v_right, v_left)` at every configuration.
    pub fn wheel_speeds(&self, path: &DiscretizedPath, track_width: f64) -> Vec<(f64, f64)> {
        self.z
            .iter()
            .enumerate()
            .map(|(i, &z)| wheel_speeds(z, path.index_curvature(i), track_width))
            .collect()
    }

    /// Tangential acceleration of the center over each step.
    pub fn tangential_accel(&self, path: &DiscretizedPath, track_width: f64) -> Vec<f64> {
        path.steps()
            .iter()
            .enumerate()
            .map(|(i, st)| {
                let va = center_speed(self.z[i], path.index_curvature(i), track_width);
                let vb = center_speed(self.z[i + 1], path.index_curvature(i + 1), track_width);
                (vb * vb - va * va) / (2.0 * st.s.abs())
            })
            .collect()
    }

    pub fn duration(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }
}

/// Stage 1: upper bound on `z` at every index.
///
/// `z_final_max` also bounds the last index, so that the narrowing accounts
/// for the final stop.
pub fn stage1_caps(path: &DiscretizedPath, cs: &ConstraintSet, z_final_max: f64) -> Result<Vec<f64>, ProfileError> {
    let r = Resolved::new(path, cs)?;
    caps(&r, z_final_max)
}

fn caps(r: &Resolved, z_final_max: f64) -> Result<Vec<f64>, ProfileError> {
    let mut caps = r.raw_caps.clone();
    let m = caps.len() - 1;
    caps[m] = caps[m].min(z_final_max.max(0.0));

    for _ in 0..=m {
        let mut changed = false;
        for i in (0..m).rev() {
            // some z_{i+1} <= caps[i+1] must be reachable from caps[i]
            let (cur, next) = (caps[i], caps[i + 1]);
            if r.max_second(i, cur, next).is_none() {
                caps[i] = lower_cap(cur, |z| r.max_second(i, z, next).is_some(), || r.max_first(i, next, cur))
                .ok_or(ProfileError::InfeasibleCap { index: i })?;
                changed = true;
            }
        }
        for i in 1..=m {
            // some z_{i-1} <= caps[i-1] must lead to caps[i]
            let (prev, cur) = (caps[i - 1], caps[i]);
            if r.max_first(i - 1, cur, prev).is_none() {
                caps[i] = lower_cap(cur, |z| r.max_first(i - 1, z, prev).is_some(), || r.max_second(i - 1, prev, cur))
                .ok_or(ProfileError::InfeasibleCap { index: i })?;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(caps)
}

/// Largest `z <= cap` accepted by `ok`: the `guess` if it works, otherwise
/// bisection (acceptance is assumed monotone decreasing in `z`).
fn lower_cap(cap: f64, ok: impl Fn(f64) -> bool, guess: impl FnOnce() -> Option<f64>) -> Option<f64> {
    if let Some(z) = guess() {
        if ok(z) {
            return Some(z);
        }
    }
    if !ok(0.0) {
        return None;
    }
    let (mut good, mut bad) = (0.0, cap);
    while bad - good > CAP_TOL {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}

/// Stage 2: largest velocities reachable forward from `z0`.
pub fn stage2_forward(
    path: &DiscretizedPath,
    cs: &ConstraintSet,
    caps: &[f64],
    z0: f64,
) -> Result<Vec<f64>, ProfileError> {
    let r = Resolved::new(path, cs)?;
    check_len(caps, path)?;
    forward(&r, caps, z0)
}

fn forward(r: &Resolved, caps: &[f64], z0: f64) -> Result<Vec<f64>, ProfileError> {
    if z0 > caps[0] + INITIAL_SPEED_TOL || z0 < 0.0 {
        return Err(ProfileError::InfeasibleInitialSpeed {
            index: 0,
            requested: z0,
            achievable: caps[0],
        });
    }
    let mut z = Vec::with_capacity(caps.len());
    z.push(z0.min(caps[0]));
    for i in 1..caps.len() {
        let next = r.max_second(i - 1, z[i - 1], caps[i]).ok_or(ProfileError::InfeasibleInitialSpeed {
            index: i,
            requested: z0,
            achievable: 0.0,
        })?;
        z.push(next);
    }
    Ok(z)
}

/// Stage 3: lowers the forward velocities so that each can be reached from
/// the previous one and slowed down in time for the next.
pub fn stage3_backward(
    path: &DiscretizedPath,
    cs: &ConstraintSet,
    caps: &[f64],
    z_fwd: &[f64],
    z_final_max: f64,
) -> Result<Vec<f64>, ProfileError> {
    let r = Resolved::new(path, cs)?;
    check_len(caps, path)?;
    check_len(z_fwd, path)?;
    Ok(backward(&r, z_fwd, z_final_max))
}

fn backward(r: &Resolved, z_fwd: &[f64], z_final_max: f64) -> Vec<f64> {
    let mut z = z_fwd.to_vec();
    let m = z.len() - 1;
    z[m] = z[m].min(z_final_max.max(0.0));
    for i in (0..m).rev() {
        if !r.holds(i, z[i], z[i + 1]) {
            z[i] = r.max_first(i, z[i + 1], z[i]).unwrap_or(0.0);
        }
    }
    z
}

fn check_len(v: &[f64], path: &DiscretizedPath) -> Result<(), ProfileError> {
    let expected = path.step_count() + 1;
    if v.len() != expected {
        return Err(ProfileError::LengthMismatch { expected, got: v.len() });
    }
    Ok(())
}

/// Time at which each configuration is reached, assuming constant
/// tangential acceleration over every step.
pub fn timestamps(path: &DiscretizedPath, z: &[f64]) -> Result<Vec<f64>, ProfileError> {
    check_len(z, path)?;
    let mut t = Vec::with_capacity(z.len());
    t.push(0.0);
    for (i, st) in path.steps().iter().enumerate() {
        let sum = z[i] + z[i + 1];
        if !(sum > 0.0) {
            return Err(ProfileError::StalledStep { index: i });
        }
        t.push(t[i] + 2.0 * st.s.abs() / sum);
    }
    Ok(t)
}

/// Fastest profile starting at `z0` and ending at most at `z_final_max`.
pub fn solve(
    path: &DiscretizedPath,
    cs: &ConstraintSet,
    z0: f64,
    z_final_max: f64,
) -> Result<SpeedProfile, ProfileError> {
    let r = Resolved::new(path, cs)?;
    let caps = caps(&r, z_final_max)?;
    let fwd = forward(&r, &caps, z0)?;
    let z = backward(&r, &fwd, z_final_max);
    if z[0] < z0 - INITIAL_SPEED_TOL {
        let lowered = z.iter().zip(&fwd).take_while(|(a, b)| a < b).count();
        return Err(ProfileError::InfeasibleInitialSpeed {
            index: lowered,
            requested: z0,
            achievable: z[0],
        });
    }
    let t = timestamps(path, &z)?;
    Ok(SpeedProfile { z, t, caps })
}
