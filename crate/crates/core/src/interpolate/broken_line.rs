use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::geometry::Point2;

use super::InterpolateError;

/// Tolerance on the turn angle below which an interior point is considered
/// collinear with its neighbours and merged away.
const COLLINEAR_EPS: f64 = 1e-12;

/// Distance from a corner to the tangency points of its obstacle-free disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Clearance {
    Bounded(f64),
    Unbounded,
}

impl Clearance {
    pub fn value(self) -> Option<f64> {
        match self {
            Clearance::Bounded(c) => Some(c),
            Clearance::Unbounded => None,
        }
    }

    /// The clearance with `Unbounded` replaced by `fallback`.
    pub fn or(self, fallback: f64) -> f64 {
        self.value().unwrap_or(fallback)
    }
}

/// A polyline `p_0 .. p_n` with a clearance attached to every interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenLine {
    points: Vec<Point2>,
    // one entry per point; the entries of the two endpoints are unused
    clearances: Vec<Clearance>,
}

/// A reason why a broken line cannot be interpolated as-is.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite { index: usize },
    CoincidentPoints { index: usize },
    ZeroTurn { index: usize },
    AcuteTurn { index: usize, beta: f64 },
    NonPositiveClearance { index: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { index } => write!(f, "point {index} has non-finite coordinates"),
            Violation::CoincidentPoints { index } => write!(f, "points {index} and {} coincide", index + 1),
            Violation::ZeroTurn { index } => write!(f, "point {index} does not change direction"),
            Violation::AcuteTurn { index, beta } => {
                write!(f, "AcuteTurn at point {index}: |beta| = {:.6} rad exceeds pi/2", beta.abs())
            }
            Violation::NonPositiveClearance { index, value } => {
                write!(f, "clearance {value} at point {index} is not positive")
            }
        }
    }
}

impl BrokenLine {
    /// Builds a broken line from its points and the clearances of its
    /// interior points (`points.len() - 2` entries). Interior points that do
    /// not change the direction of travel are merged away.
    pub fn new(points: Vec<Point2>, interior: Vec<Clearance>) -> Result<Self, InterpolateError> {
        if points.len() < 2 {
            return Err(InterpolateError::EmptyPath);
        }
        if interior.len() != points.len() - 2 {
            return Err(InterpolateError::ClearanceCount {
                expected: points.len() - 2,
                got: interior.len(),
            });
        }
        let mut clearances = Vec::with_capacity(points.len());
        clearances.push(Clearance::Unbounded);
        clearances.extend(interior);
        clearances.push(Clearance::Unbounded);
        Ok(Self::merged(points, clearances))
    }

    /// Broken line whose interior clearances are all unbounded.
    pub fn unbounded(points: Vec<Point2>) -> Result<Self, InterpolateError> {
        let interior = vec![Clearance::Unbounded; points.len().saturating_sub(2)];
        Self::new(points, interior)
    }

    /// Builds from per-point clearances; the endpoint entries are ignored.
    pub fn from_annotated(points: Vec<(Point2, Clearance)>) -> Result<Self, InterpolateError> {
        let n = points.len();
        if n < 2 {
            return Err(InterpolateError::EmptyPath);
        }
        let interior = points[1..n - 1].iter().map(|p| p.1).collect();
        Self::new(points.into_iter().map(|p| p.0).collect(), interior)
    }

    fn merged(points: Vec<Point2>, clearances: Vec<Clearance>) -> Self {
        let mut out_p: Vec<Point2> = Vec::with_capacity(points.len());
        let mut out_c: Vec<Clearance> = Vec::with_capacity(points.len());
        for (p, c) in points.into_iter().zip(clearances) {
            if out_p.len() >= 2 {
                let a = out_p[out_p.len() - 2];
                let b = out_p[out_p.len() - 1];
                let u = b - a;
                let v = p - b;
                let straight = u.norm() > 0.0
                    && v.norm() > 0.0
                    && u.dot(v) > 0.0
                    && u.cross(v).abs() <= COLLINEAR_EPS * u.norm() * v.norm();
                if straight {
                    out_p.pop();
                    out_c.pop();
                }
            }
            out_p.push(p);
            out_c.push(c);
        }
        let last = out_c.len() - 1;
        out_c[0] = Clearance::Unbounded;
        out_c[last] = Clearance::Unbounded;
        Self {
            points: out_p,
            clearances: out_c,
        }
    }

    pub(crate) fn from_parts_unchecked(points: Vec<Point2>, clearances: Vec<Clearance>) -> Self {
        Self { points, clearances }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Number of segments, `n`.
    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn clearance(&self, i: usize) -> Clearance {
        self.clearances[i]
    }

    pub fn segment_length(&self, j: usize) -> f64 {
        self.points[j].distance(self.points[j + 1])
    }

    /// Unit direction of segment `j`.
    pub fn direction(&self, j: usize) -> Point2 {
        (self.points[j + 1] - self.points[j]).normalized()
    }

    /// Signed turn angle at interior point `i`, in `(-pi, pi]`.
    pub fn turn_angle(&self, i: usize) -> f64 {
        let u = self.points[i] - self.points[i - 1];
        let v = self.points[i + 1] - self.points[i];
        u.cross(v).atan2(u.dot(v))
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segment_count()).map(|j| self.segment_length(j)).sum()
    }

    /// Clearance used for the safe zone at corner `i`: unbounded values are
    /// replaced by the shorter adjacent segment, and no value exceeds it.
    pub fn effective_clearance(&self, i: usize) -> f64 {
        let shortest = self.segment_length(i - 1).min(self.segment_length(i));
        self.clearances[i].or(shortest).min(shortest)
    }
}

/// Lists every reason the broken line cannot be interpolated directly.
pub fn validate(line: &BrokenLine) -> Vec<Violation> {
    let mut out = Vec::new();
    let pts = line.points();
    for (index, p) in pts.iter().enumerate() {
        if !p.is_finite() {
            out.push(Violation::NonFinite { index });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for index in 0..line.segment_count() {
        if pts[index] == pts[index + 1] {
            out.push(Violation::CoincidentPoints { index });
        }
    }
    for index in 1..line.segment_count() {
        if let Clearance::Bounded(value) = line.clearance(index) {
            if !(value > 0.0) {
                out.push(Violation::NonPositiveClearance { index, value });
            }
        }
        if pts[index] == pts[index - 1] || pts[index] == pts[index + 1] {
            continue;
        }
        let beta = line.turn_angle(index);
        if beta == 0.0 {
            out.push(Violation::ZeroTurn { index });
        } else if beta.abs() > FRAC_PI_2 {
            out.push(Violation::AcuteTurn { index, beta });
        }
    }
    out
}

/// Replaces every corner sharper than a right angle by two corners of half
/// the turn, joined by a chamfer orthogonal to the inner bisector.
///
/// The chamfer endpoints sit at the same distance `t` from the corner on both
/// segments. `t` never exceeds half of an adjacent segment and keeps the
/// chamfer clear of the corner's clearance disk, so the new corners stay in
/// the original safe zone.
pub fn split_acute(line: &BrokenLine, min_chamfer: f64) -> Result<BrokenLine, InterpolateError> {
    let blocking: Vec<Violation> = validate(line)
        .into_iter()
        .filter(|v| !matches!(v, Violation::AcuteTurn { .. }))
        .collect();
    if !blocking.is_empty() {
        return Err(InterpolateError::Invalid(blocking));
    }
    let n = line.segment_count();
    let acute: Vec<bool> = (0..=n)
        .map(|i| i > 0 && i < n && line.turn_angle(i).abs() > FRAC_PI_2)
        .collect();
    if !acute.iter().any(|&a| a) {
        return Ok(line.clone());
    }

    let mut points = Vec::with_capacity(line.points().len() + 4);
    let mut clearances = Vec::with_capacity(points.capacity());
    points.push(line.points()[0]);
    clearances.push(Clearance::Unbounded);
    for i in 1..n {
        let p = line.points()[i];
        if !acute[i] {
            points.push(p);
            clearances.push(line.clearance(i));
            continue;
        }
        let beta = line.turn_angle(i);
        // half of the interior angle of the wedge at p
        let phi = 0.5 * (std::f64::consts::PI - beta.abs());
        let len_prev = line.segment_length(i - 1);
        let len_next = line.segment_length(i);
        let share_prev = if acute[i - 1] { 0.45 } else { 0.5 };
        let share_next = if acute[i + 1] { 0.45 } else { 0.5 };
        let clearance = line.effective_clearance(i);
        let t = (clearance / (1.0 + phi.sin()))
            .min(share_prev * len_prev)
            .min(share_next * len_next);
        let chamfer = 2.0 * t * phi.sin();
        if !(chamfer >= min_chamfer) || chamfer <= 0.0 {
            return Err(InterpolateError::Unsplittable { index: i, chamfer });
        }
        let a = p - line.direction(i - 1) * t;
        let b = p + line.direction(i) * t;
        let half = Clearance::Bounded(0.5 * chamfer);
        points.extend([a, b]);
        clearances.extend([half, half]);
    }
    points.push(line.points()[n]);
    clearances.push(Clearance::Unbounded);
    Ok(BrokenLine::from_parts_unchecked(points, clearances))
}
