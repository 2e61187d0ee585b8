use crate::geometry::Point2;

use super::{BrokenLine, Corner};

/// Default absolute slack of the membership test, in meters.
const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
struct Zone {
    apex: Point2,
    a: Point2,
    b: Point2,
    center: Point2,
    radius: f64,
}

/// Precomputed safe zones of a broken line: its segments, plus for every
/// corner the part of the wedge between the corner and its clearance disk.
#[derive(Debug, Clone)]
pub struct SafeZones {
    points: Vec<Point2>,
    zones: Vec<Zone>,
    tol: f64,
}

impl SafeZones {
    pub fn new(line: &BrokenLine) -> Self {
        Self::for_corners(line, 1..line.segment_count())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn for_corners(line: &BrokenLine, corners: impl IntoIterator<Item = usize>) -> Self {
        let zones = corners
            .into_iter()
            .map(|i| {
                let apex = line.points()[i];
                let u_prev = line.direction(i - 1);
                let u_next = line.direction(i);
                let c = line.effective_clearance(i);
                let phi = 0.5 * (std::f64::consts::PI - line.turn_angle(i).abs());
                let bisector = (u_next - u_prev).normalized();
                Zone {
                    apex,
                    a: apex - u_prev * c,
                    b: apex + u_next * c,
                    center: apex + bisector * (c / phi.cos()),
                    radius: c * phi.tan(),
                }
            })
            .collect();
        Self {
            points: line.points().to_vec(),
            zones,
            tol: DEFAULT_TOL,
        }
    }

    pub fn contains(&self, q: Point2) -> bool {
        self.points.windows(2).any(|w| segment_distance(q, w[0], w[1]) <= self.tol)
            || self.zones.iter().any(|z| z.contains(q, self.tol))
    }
}

impl Zone {
    fn contains(&self, q: Point2, tol: f64) -> bool {
        // triangle (a, apex, b) with either orientation
        let orient = (self.apex - self.a).cross(self.b - self.a).signum();
        let inside = [(self.a, self.apex), (self.apex, self.b), (self.b, self.a)]
            .iter()
            .all(|&(p, r)| {
                let edge = r - p;
                orient * edge.cross(q - p) / edge.norm() >= -tol
            });
        inside && q.distance(self.center) >= self.radius - tol
    }
}

fn segment_distance(q: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let t = ((q - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    q.distance(a + ab * t)
}

/// Whether `q` lies in the safe zone of `line`, i.e. on one of its segments
/// or between one of `corners` and that corner's clearance disk.
pub fn safe_zone_contains(line: &BrokenLine, corners: &[Corner], q: Point2) -> bool {
    SafeZones::for_corners(line, corners.iter().map(|c| c.index)).contains(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolate::{tangent_lengths, Clearance};

    fn right_angle() -> BrokenLine {
        BrokenLine::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)],
            vec![Clearance::Bounded(0.5)],
        )
        .unwrap()
    }

    #[test]
    fn segment_midpoints() {
        let line = right_angle();
        let corners = tangent_lengths(&line);
        assert!(safe_zone_contains(&line, &corners, Point2::new(0.5, 0.0)));
        assert!(safe_zone_contains(&line, &corners, Point2::new(1.0, 0.5)));
    }

    #[test]
    fn between_chord_and_corner() {
        let line = right_angle();
        let corners = tangent_lengths(&line);
        // clearance disk centred at (0.5, 0.5), radius 0.5
        let q = Point2::new(0.9, 0.02);
        assert!(q.distance(Point2::new(0.5, 0.5)) > 0.5);
        assert!(safe_zone_contains(&line, &corners, q));
    }

    #[test]
    fn reflected_corner_is_outside() {
        let line = right_angle();
        let corners = tangent_lengths(&line);
        // reflection of (1, 0) across the chord (0.5, 0)-(1, 0.5)
        assert!(!safe_zone_contains(&line, &corners, Point2::new(0.5, 0.5)));
        assert!(!safe_zone_contains(&line, &corners, Point2::new(0.7, 0.35)));
        assert!(!safe_zone_contains(&line, &corners, Point2::new(1.1, 0.1)));
    }
}
