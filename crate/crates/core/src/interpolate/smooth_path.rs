use std::ops::Range;

use crate::geometry::{integrate_heading, normalize_angle, CurvePiece};

/// Largest pose and curvature jumps between consecutive pieces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContinuityReport {
    pub position: f64,
    pub heading: f64,
    pub curvature: f64,
    /// Curvature at the very start and very end of the path.
    pub start_curvature: f64,
    pub end_curvature: f64,
}

impl ContinuityReport {
    /// Pose continuity within `tol`, ignoring curvature.
    pub fn is_tangent_continuous(&self, tol: f64) -> bool {
        self.position <= tol && self.heading <= tol
    }

    /// Pose and curvature continuity with straight extremities.
    pub fn is_curvature_continuous(&self, tol: f64) -> bool {
        self.is_tangent_continuous(tol)
            && self.curvature <= tol
            && self.start_curvature.abs() <= tol
            && self.end_curvature.abs() <= tol
    }
}

/// Output of the interpolator: a chain of curve pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPath {
    pieces: Vec<CurvePiece>,
    corners: Vec<(usize, Range<usize>)>,
    unsmoothed: Vec<usize>,
}

impl SmoothPath {
    pub(crate) fn new(pieces: Vec<CurvePiece>, corners: Vec<(usize, Range<usize>)>, unsmoothed: Vec<usize>) -> Self {
        Self {
            pieces,
            corners,
            unsmoothed,
        }
    }

    /// Wraps pieces produced elsewhere. No corner bookkeeping is attached.
    pub fn from_pieces(pieces: Vec<CurvePiece>) -> Self {
        Self::new(pieces, Vec::new(), Vec::new())
    }

    pub fn pieces(&self) -> &[CurvePiece] {
        &self.pieces
    }

    /// For each corner of the broken line, its index and the range of
    /// pieces that replace it.
    pub fn corner_pieces(&self) -> &[(usize, Range<usize>)] {
        &self.corners
    }

    /// Corners whose clothoid fit failed and were kept as circle arcs.
    pub fn unsmoothed(&self) -> &[usize] {
        &self.unsmoothed
    }

    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length).sum()
    }

    pub fn total_heading_change(&self) -> f64 {
        self.pieces.iter().map(integrate_heading).sum()
    }

    pub fn continuity(&self) -> ContinuityReport {
        let mut report = ContinuityReport {
            start_curvature: self.pieces.first().map_or(0.0, |p| p.kappa_start),
            end_curvature: self.pieces.last().map_or(0.0, |p| p.kappa_end()),
            ..ContinuityReport::default()
        };
        for w in self.pieces.windows(2) {
            let end = w[0].end();
            let next = w[1].start;
            report.position = report.position.max(end.position.distance(next.position));
            report.heading = report.heading.max(normalize_angle(end.heading - next.heading).abs());
            report.curvature = report.curvature.max((w[0].kappa_end() - w[1].kappa_start).abs());
        }
        report
    }
}
