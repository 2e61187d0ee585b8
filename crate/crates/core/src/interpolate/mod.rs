//! Broken line to smooth path.
//!
//! Each corner of the broken line is first rounded by a circle arc whose
//! tangent length respects the corner clearance and leaves room for the
//! neighbouring corners. Each arc is then replaced by a pair of clothoids
//! with the same end points and tangents, so that curvature varies
//! continuously along the whole path.

mod broken_line;
mod clothoid_pair;
mod corners;
mod safe_zone;
mod smooth_path;

use thiserror::Error;

use crate::geometry::{CurvePiece, Pose};

pub use broken_line::{split_acute, validate, BrokenLine, Clearance, Violation};
pub use clothoid_pair::{fit_clothoid_pair, initial_ratio, ClothoidPairFit, FitError, FitOptions};
pub use corners::{junction_curvature, tangent_lengths, Corner, DEFAULT_JUNCTION_FACTOR};
pub use safe_zone::{safe_zone_contains, SafeZones};
pub use smooth_path::{ContinuityReport, SmoothPath};

/// Lines shorter than this are dropped from the assembled path.
const MIN_LINE_LENGTH: f64 = 1e-12;
/// Relative gap under which two corners are treated as sharing a junction.
const TOUCH_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolateError {
    #[error("a broken line needs at least two points")]
    EmptyPath,
    #[error("expected {expected} interior clearances, got {got}")]
    ClearanceCount { expected: usize, got: usize },
    #[error("invalid broken line: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("corner {index} cannot be split: chamfer length {chamfer} is below the minimum")]
    Unsplittable { index: usize, chamfer: f64 },
    #[error("clothoid fit failed at corner {index}: {source}")]
    NonConvergence { index: usize, source: FitError },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmoothingMode {
    /// Clothoid pairs: continuous curvature.
    #[default]
    Clothoid,
    /// Circle arcs only: bounded but discontinuous curvature.
    ArcOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolateOptions {
    pub mode: SmoothingMode,
    /// Fraction of the smaller arc curvature imposed where two
    /// same-direction arcs meet.
    pub junction_factor: f64,
    pub fit: FitOptions,
    /// Keep the circle arc when a clothoid fit fails, instead of erroring.
    pub arc_fallback: bool,
    /// Share of the first and last segments kept straight. Without it a
    /// corner may consume a whole end segment, and no discretization of the
    /// result starts or ends with a straight step.
    pub end_straight: f64,
}

pub const DEFAULT_END_STRAIGHT: f64 = 0.05;

impl Default for InterpolateOptions {
    fn default() -> Self {
        Self {
            mode: SmoothingMode::Clothoid,
            junction_factor: DEFAULT_JUNCTION_FACTOR,
            fit: FitOptions::default(),
            arc_fallback: true,
            end_straight: DEFAULT_END_STRAIGHT,
        }
    }
}

/// Smooths a valid broken line (see [`validate`] and [`split_acute`]).
pub fn interpolate(line: &BrokenLine, opts: &InterpolateOptions) -> Result<SmoothPath, InterpolateError> {
    let violations = validate(line);
    if !violations.is_empty() {
        return Err(InterpolateError::Invalid(violations));
    }
    let n = line.segment_count();
    let mut corners = tangent_lengths(line);
    if !corners.is_empty() && opts.end_straight > 0.0 {
        let keep = 1.0 - opts.end_straight.min(1.0);
        let last = corners.len() - 1;
        for (k, seg) in [(0, 0), (last, n - 1)] {
            let c = &mut corners[k];
            let cap = keep * line.segment_length(seg);
            if c.ell > cap {
                c.ell = cap;
                c.kappa_c = c.beta.signum() * c.tau / cap;
            }
        }
    }
    // corners[k] sits at point k + 1; segment j runs from point j to j + 1
    let left = |j: usize| (j >= 1).then(|| &corners[j - 1]);
    let right = |j: usize| (j + 1 < n).then(|| &corners[j]);

    let gaps: Vec<f64> = (0..n)
        .map(|j| {
            let used = left(j).map_or(0.0, |c| c.ell) + right(j).map_or(0.0, |c| c.ell);
            (line.segment_length(j) - used).max(0.0)
        })
        .collect();
    let junction: Vec<f64> = (0..n)
        .map(|j| match (left(j), right(j)) {
            (Some(a), Some(b)) if gaps[j] <= TOUCH_EPS * line.segment_length(j) => {
                junction_curvature(a.kappa_c, b.kappa_c, opts.junction_factor)
            }
            _ => 0.0,
        })
        .collect();

    // Every line and corner starts at its exact tangency point, so closure
    // residuals of the clothoid fits do not accumulate along the path.
    let tangency_out = |j: usize| {
        let ell = left(j).map_or(0.0, |c| c.ell);
        Pose::from_parts(line.points()[j] + line.direction(j) * ell, line.direction(j).angle())
    };
    let mut pieces = Vec::with_capacity(3 * n);
    let mut ranges = Vec::with_capacity(corners.len());
    let mut unsmoothed = Vec::new();

    for j in 0..n {
        if gaps[j] > MIN_LINE_LENGTH && junction[j] == 0.0 {
            pieces.push(CurvePiece::line(tangency_out(j), gaps[j]));
        }
        let Some(corner) = right(j) else { continue };
        let p = line.points()[j + 1];
        let u = line.direction(j);
        let start = Pose::from_parts(p - u * corner.ell, u.angle());
        let first = pieces.len();
        let sign = corner.beta.signum();
        let kappa_c = corner.kappa_c.abs();
        let beta = corner.beta.abs();
        let arc = CurvePiece::arc(start, beta / kappa_c, corner.kappa_c);
        match opts.mode {
            SmoothingMode::ArcOnly => pieces.push(arc),
            SmoothingMode::Clothoid => {
                let k1 = junction[j].abs();
                let k2 = junction[j + 1].abs();
                match fit_clothoid_pair(k1, k2, kappa_c, beta, &opts.fit) {
                    Ok(fit) => pieces.extend(fit.pieces(start, sign)),
                    Err(FitError::NonConvergence { .. }) if opts.arc_fallback => {
                        unsmoothed.push(corner.index);
                        pieces.push(arc);
                    }
                    Err(source) => {
                        return Err(InterpolateError::NonConvergence {
                            index: corner.index,
                            source,
                        })
                    }
                }
            }
        }
        ranges.push((corner.index, first..pieces.len()));
    }

    if pieces.is_empty() {
        // only possible when every segment is fully consumed, which needs a corner
        return Err(InterpolateError::EmptyPath);
    }
    Ok(SmoothPath::new(pieces, ranges, unsmoothed))
}
