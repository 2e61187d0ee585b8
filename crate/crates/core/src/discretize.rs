//! Sampling of smooth paths into configuration sequences.
//!
//! Between two consecutive configurations the robot is assumed to follow a
//! circle arc (or a straight line), which is fully determined by the turn
//! `delta` and the chord length `lambda`.

use thiserror::Error;

use crate::geometry::{eval_piece, normalize_angle, PieceKind, Pose};
use crate::interpolate::SmoothPath;

/// Curvature tolerated on the first and last step of an ingested path.
pub const ENDPOINT_CURVATURE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretizeError {
    #[error("step must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("step {step} exceeds the length {length} of a path that is not straight")]
    StepTooLarge { step: f64, length: f64 },
    #[error("a path needs at least two configurations")]
    TooShort,
    #[error("configurations {index} and {} coincide", index + 1)]
    CoincidentConfigs { index: usize },
    #[error("step {index} turns by {delta} rad; half a turn or more needs a finer step")]
    TurnTooLarge { index: usize, delta: f64 },
    #[error("step {index} has curvature {kappa}, the path must start and end straight")]
    EndpointCurvature { index: usize, kappa: f64 },
}

/// Circle-arc model of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGeom {
    /// Heading change, in `(-pi, pi)`.
    pub delta: f64,
    /// Chord length.
    pub lambda: f64,
    pub kappa: f64,
    /// Arc length.
    pub s: f64,
}

/// Step geometry between two configurations.
pub fn step_geometry(a: &Pose, b: &Pose) -> Result<StepGeom, DiscretizeError> {
    let lambda = a.position.distance(b.position);
    if !(lambda > 0.0) {
        return Err(DiscretizeError::CoincidentConfigs { index: 0 });
    }
    let delta = normalize_angle(b.heading - a.heading);
    if delta.abs() >= std::f64::consts::PI {
        return Err(DiscretizeError::TurnTooLarge { index: 0, delta });
    }
    let kappa = 2.0 * (0.5 * delta).sin() / lambda;
    let s = if kappa == 0.0 { lambda } else { delta / kappa };
    Ok(StepGeom { delta, lambda, kappa, s })
}

/// Configurations `0..=m` and the `m` steps between them.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedPath {
    configs: Vec<Pose>,
    steps: Vec<StepGeom>,
}

impl DiscretizedPath {
    fn build(configs: Vec<Pose>) -> Result<Self, DiscretizeError> {
        if configs.len() < 2 {
            return Err(DiscretizeError::TooShort);
        }
        let steps = configs
            .windows(2)
            .enumerate()
            .map(|(index, w)| {
                step_geometry(&w[0], &w[1]).map_err(|e| match e {
                    DiscretizeError::CoincidentConfigs { .. } => DiscretizeError::CoincidentConfigs { index },
                    DiscretizeError::TurnTooLarge { delta, .. } => DiscretizeError::TurnTooLarge { index, delta },
                    other => other,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { configs, steps })
    }

    pub fn configs(&self) -> &[Pose] {
        &self.configs
    }

    pub fn steps(&self) -> &[StepGeom] {
        &self.steps
    }

    /// Number of steps `m`.
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Curvature attached to configuration `i`: that of the step leaving
    /// it, or of the last step for the final configuration.
    pub fn index_curvature(&self, i: usize) -> f64 {
        self.steps[i.min(self.steps.len() - 1)].kappa
    }

    /// Sum of the step arc lengths.
    pub fn total_length(&self) -> f64 {
        self.steps.iter().map(|s| s.s).sum()
    }

    /// Cumulative arc length at every configuration.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.steps.iter().map(|st| {
                acc += st.s;
                acc
            }))
            .collect()
    }
}

/// Samples `path` uniformly in arc length within each piece, with spacing
/// at most `target_step`. Piece boundaries are always sampled.
pub fn discretize(path: &SmoothPath, target_step: f64) -> Result<DiscretizedPath, DiscretizeError> {
    if !(target_step > 0.0 && target_step.is_finite()) {
        return Err(DiscretizeError::NonPositiveStep(target_step));
    }
    let pieces = path.pieces();
    let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
        return Err(DiscretizeError::TooShort);
    };
    let length = path.total_length();
    if target_step > length {
        if pieces.iter().any(|p| p.kind != PieceKind::Line) {
            return Err(DiscretizeError::StepTooLarge {
                step: target_step,
                length,
            });
        }
        return DiscretizedPath::build(vec![first.start, last.end()]);
    }

    let mut configs = Vec::new();
    for piece in pieces {
        let k = (piece.length / target_step).ceil().max(1.0) as usize;
        for j in 0..k {
            let s = piece.length * j as f64 / k as f64;
            let (pose, _) = eval_piece(piece, s).expect("sample within piece");
            configs.push(pose);
        }
    }
    configs.push(last.end());
    DiscretizedPath::build(configs)
}

/// Wraps an externally produced configuration sequence.
///
/// The first and last steps must be straight within
/// [`ENDPOINT_CURVATURE_TOL`] unless `force` is set.
pub fn ingest(configs: Vec<Pose>, force: bool) -> Result<DiscretizedPath, DiscretizeError> {
    let path = DiscretizedPath::build(configs)?;
    if !force {
        let m = path.step_count();
        for index in [0, m - 1] {
            let kappa = path.steps[index].kappa;
            if kappa.abs() > ENDPOINT_CURVATURE_TOL {
                return Err(DiscretizeError::EndpointCurvature { index, kappa });
            }
        }
    }
    Ok(path)
}
