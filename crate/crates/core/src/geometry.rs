//! Planar primitives and the three curve-piece kinds used by smoothed paths.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::fresnel::fresnel;

/// Below this curvature slope a clothoid is evaluated as an arc (or a line).
pub const CLOTHOID_RATE_EPS: f64 = 1e-12;

/// Largest canonical Fresnel argument for which the Fresnel reduction is used.
/// Beyond it the phase `pi u^2 / 2` loses too many digits and the piece is
/// integrated by Gauss-Legendre quadrature instead.
const FRESNEL_ARG_LIMIT: f64 = 1.0e3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("arc-length {s} outside piece range [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
    #[error("invalid curve piece: {0}")]
    InvalidPiece(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `heading`.
    pub fn from_angle(heading: f64) -> Self {
        let (s, c) = heading.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// Position plus heading. The heading is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Point2,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            position: Point2::new(x, y),
            heading: normalize_angle(heading),
        }
    }

    pub fn from_parts(position: Point2, heading: f64) -> Self {
        Self {
            position,
            heading: normalize_angle(heading),
        }
    }

    pub fn x(&self) -> f64 {
        self.position.x
    }

    pub fn y(&self) -> f64 {
        self.position.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    Line,
    Arc,
    Clothoid,
}

impl PieceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PieceKind::Line => "line",
            PieceKind::Arc => "arc",
            PieceKind::Clothoid => "clothoid",
        }
    }
}

/// A curve whose curvature is an affine function of arc length:
/// `kappa(s) = kappa_start + kappa_rate * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePiece {
    pub kind: PieceKind,
    pub start: Pose,
    pub length: f64,
    pub kappa_start: f64,
    pub kappa_rate: f64,
}

impl CurvePiece {
    pub fn line(start: Pose, length: f64) -> Self {
        Self {
            kind: PieceKind::Line,
            start,
            length,
            kappa_start: 0.0,
            kappa_rate: 0.0,
        }
    }

    pub fn arc(start: Pose, length: f64, kappa: f64) -> Self {
        Self {
            kind: PieceKind::Arc,
            start,
            length,
            kappa_start: kappa,
            kappa_rate: 0.0,
        }
    }

    pub fn clothoid(start: Pose, length: f64, kappa_start: f64, kappa_rate: f64) -> Self {
        Self {
            kind: PieceKind::Clothoid,
            start,
            length,
            kappa_start,
            kappa_rate,
        }
    }

    /// Builds a piece of whichever kind matches the curvature parameters.
    pub fn with_curvature(start: Pose, length: f64, kappa_start: f64, kappa_rate: f64) -> Self {
        if kappa_rate != 0.0 {
            Self::clothoid(start, length, kappa_start, kappa_rate)
        } else if kappa_start != 0.0 {
            Self::arc(start, length, kappa_start)
        } else {
            Self::line(start, length)
        }
    }

    /// Checks the per-kind invariants.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(GeometryError::InvalidPiece("length must be positive and finite"));
        }
        if !self.start.position.is_finite() || !self.start.heading.is_finite() {
            return Err(GeometryError::InvalidPiece("start pose must be finite"));
        }
        match self.kind {
            PieceKind::Line if self.kappa_start != 0.0 || self.kappa_rate != 0.0 => {
                Err(GeometryError::InvalidPiece("line must have zero curvature"))
            }
            PieceKind::Arc if self.kappa_rate != 0.0 || self.kappa_start == 0.0 => {
                Err(GeometryError::InvalidPiece("arc must have constant nonzero curvature"))
            }
            PieceKind::Clothoid if self.kappa_rate == 0.0 => {
                Err(GeometryError::InvalidPiece("clothoid must have nonzero curvature rate"))
            }
            _ => Ok(()),
        }
    }

    pub fn kappa_end(&self) -> f64 {
        self.kappa_start + self.kappa_rate * self.length
    }

    pub fn end(&self) -> Pose {
        pose_at(self, self.length)
    }

    /// Curvature at arc-length `s`, unchecked.
    pub fn curvature_at(&self, s: f64) -> f64 {
        self.kappa_start + self.kappa_rate * s
    }
}

/// Pose and curvature at arc-length `s` from the start of `piece`.
pub fn eval_piece(piece: &CurvePiece, s: f64) -> Result<(Pose, f64), GeometryError> {
    let slack = 1e-12 * piece.length.max(1.0);
    if !(s >= -slack && s <= piece.length + slack) {
        return Err(GeometryError::OutOfRange {
            s,
            length: piece.length,
        });
    }
    let s = s.clamp(0.0, piece.length);
    Ok((pose_at(piece, s), piece.curvature_at(s)))
}

/// Total heading change over the piece, i.e. the integral of its curvature.
pub fn integrate_heading(piece: &CurvePiece) -> f64 {
    let l = piece.length;
    piece.kappa_start * l + 0.5 * piece.kappa_rate * l * l
}

fn pose_at(piece: &CurvePiece, s: f64) -> Pose {
    let theta0 = piece.start.heading;
    let k0 = piece.kappa_start;
    let rate = piece.kappa_rate;
    let heading = theta0 + k0 * s + 0.5 * rate * s * s;
    let offset = if rate.abs() < CLOTHOID_RATE_EPS {
        arc_offset(theta0, k0, s)
    } else {
        clothoid_offset(theta0, k0, rate, s)
    };
    Pose::from_parts(piece.start.position + offset, heading)
}

/// Displacement along a circle arc (or a line when `kappa == 0`).
fn arc_offset(theta0: f64, kappa: f64, s: f64) -> Point2 {
    let half = 0.5 * kappa * s;
    // chord length 2 sin(k s / 2) / k, written to stay exact as k -> 0
    let chord = if half == 0.0 { s } else { s * half.sin() / half };
    Point2::from_angle(theta0 + half) * chord
}

fn clothoid_offset(theta0: f64, k0: f64, rate: f64, s: f64) -> Point2 {
    let sigma = rate.signum();
    let alpha = rate.abs();
    let scale = (PI / alpha).sqrt();
    let shift = k0 / rate;
    let u0 = shift / scale;
    let u1 = (s + shift) / scale;
    if u0.abs().max(u1.abs()) > FRESNEL_ARG_LIMIT {
        return quadrature_offset(theta0, k0, rate, s);
    }
    // theta(t) = phi0 + sigma * (pi/2) u(t)^2 with u(t) = (t + k0/rate) / scale
    let phi0 = theta0 - 0.5 * k0 * k0 / rate;
    let f0 = fresnel(u0);
    let f1 = fresnel(u1);
    let dc = f1.c - f0.c;
    let ds = f1.s - f0.s;
    let (sin_p, cos_p) = phi0.sin_cos();
    Point2::new(
        scale * (cos_p * dc - sigma * sin_p * ds),
        scale * (sin_p * dc + sigma * cos_p * ds),
    )
}

// 10-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

fn quadrature_offset(theta0: f64, k0: f64, rate: f64, s: f64) -> Point2 {
    let turn = k0.abs() * s + 0.5 * rate.abs() * s * s;
    let panels = (turn / 0.25).ceil().max(1.0) as usize;
    let h = s / panels as f64;
    let mut acc = Point2::default();
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            for t in [mid - 0.5 * h * node, mid + 0.5 * h * node] {
                let theta = theta0 + k0 * t + 0.5 * rate * t * t;
                acc = acc + Point2::from_angle(theta) * (0.5 * h * weight);
            }
        }
    }
    acc
}
