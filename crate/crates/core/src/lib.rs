//! Trajectory synthesis for nonholonomic mobile robots.
//!
//! The crate is split into four stages that can be used independently:
//!
//! * [`geometry`] and [`fresnel`]: planar primitives and the curve pieces
//!   (lines, circle arcs, clothoids) that make up a smoothed path.
//! * [`interpolate`]: turns a broken line with per-corner clearances into a
//!   [`SmoothPath`] with continuous, bounded curvature.
//! * [`discretize`]: samples a smooth path into a sequence of configurations,
//!   each step being modelled as a circle arc.
//! * [`profile`]: computes the fastest speed profile along a discretized path
//!   under pointwise and pairwise physical constraints, in linear time.
//!
//! ```
//! use trajkit::*;
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let line = BrokenLine::new(
//!     vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)],
//!     vec![Clearance::Bounded(0.3)],
//! )?;
//! let path = interpolate(&line, &InterpolateOptions::default())?;
//! let steps = discretize(&path, 0.005)?;
//! let limits = ConstraintSet::new(0.25)
//!     .with_pointwise(PointwiseConstraint::WheelSpeedMax(0.8))
//!     .with_pairwise(PairwiseConstraint::TangentialAccel { min: -1.2, max: 1.0 });
//! let profile = solve(&steps, &limits, 0.0, 0.0)?;
//! assert!(profile.duration() > 0.0);
//! # Ok(())
//! # }
//! ```

pub mod discretize;
pub mod fresnel;
pub mod geometry;
pub mod interpolate;
pub mod profile;

#[cfg(test)]
pub(crate) mod testutil;

pub use discretize::{discretize, ENDPOINT_CURVATURE_TOL, ingest, step_geometry, DiscretizeError, DiscretizedPath, StepGeom};
pub use fresnel::{fresnel, FresnelPair};
pub use geometry::{eval_piece, integrate_heading, normalize_angle, CurvePiece, GeometryError, PieceKind, Point2, Pose};
pub use interpolate::{
    fit_clothoid_pair, initial_ratio, interpolate, junction_curvature, safe_zone_contains, split_acute,
    tangent_lengths, validate, BrokenLine, Clearance, ClothoidPairFit, ContinuityReport, Corner, FitError, FitOptions,
    InterpolateError, InterpolateOptions, SafeZones, SmoothPath, SmoothingMode, Violation, DEFAULT_END_STRAIGHT, DEFAULT_JUNCTION_FACTOR,
};
pub use profile::{
    center_speed, omega, pairwise_holds, pointwise_cap, solve, solve_max_first, solve_max_second, stage1_caps, stage2_forward,
    stage3_backward, timestamps, wheel_speeds, ConstraintSet, Override, OverrideConstraint, PairwiseConstraint, PairwiseHook,
    PointwiseConstraint, ProfileError, RobotGeometry, SpeedProfile, StepContext,
};
