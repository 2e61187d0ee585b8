use std::f64::consts::SQRT_2;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use crate::discretize::{DiscretizedPath, StepGeom};

use super::kinematics::{center_weight, omega};
use super::ProfileError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotGeometry {
    /// Distance between the wheels.
    pub track_width: f64,
}

/// Upper bound on `z` depending only on the local curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointwiseConstraint {
    /// Both wheels within `[-v, v]`.
    WheelSpeedMax(f64),
    CenterSpeedMax(f64),
    /// Absolute rotation rate, rad/s.
    AngularSpeedMax(f64),
    /// Absolute centripetal acceleration at the center.
    RadialAccelMax(f64),
}

impl PointwiseConstraint {
    fn same_kind(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    fn parameter(&self) -> f64 {
        match *self {
            Self::WheelSpeedMax(v) | Self::CenterSpeedMax(v) | Self::AngularSpeedMax(v) | Self::RadialAccelMax(v) => v,
        }
    }
}

/// Largest `z >= 0` allowed by `c` at curvature `kappa`. May be infinite.
pub fn pointwise_cap(c: &PointwiseConstraint, kappa: f64, e: f64) -> f64 {
    let (s, co) = omega(kappa, e).sin_cos();
    match *c {
        PointwiseConstraint::WheelSpeedMax(v) => v / (SQRT_2 * s.abs().max(co.abs())),
        PointwiseConstraint::CenterSpeedMax(v) => v * SQRT_2 / (s + co).abs(),
        PointwiseConstraint::AngularSpeedMax(w) => {
            if kappa == 0.0 {
                f64::INFINITY
            } else {
                w * e / (SQRT_2 * (s - co).abs())
            }
        }
        PointwiseConstraint::RadialAccelMax(a) => {
            if kappa == 0.0 {
                f64::INFINITY
            } else {
                (a / kappa.abs()).sqrt() * SQRT_2 / (s + co).abs()
            }
        }
    }
}

/// Everything a pairwise constraint may look at for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepContext {
    /// Index of the first configuration of the step.
    pub index: usize,
    pub step: StepGeom,
    /// Curvature attached to the two configurations of the step.
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub track_width: f64,
}

impl StepContext {
    pub fn new(path: &DiscretizedPath, index: usize, track_width: f64) -> Self {
        Self {
            index,
            step: path.steps()[index],
            kappa_a: path.index_curvature(index),
            kappa_b: path.index_curvature(index + 1),
            track_width,
        }
    }
}

/// A user-supplied relation `phi(z_a, z_b)` between consecutive velocities.
///
/// For fixed `z_a` the set of admissible `z_b` must be a closed interval
/// (possibly empty), and symmetrically for fixed `z_b`. The solver relies on
/// this to search for the largest admissible value.
pub trait PairwiseHook: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;
    fn holds(&self, ctx: &StepContext, z_a: f64, z_b: f64) -> bool;
}

/// Relation between the velocities at both ends of a step.
#[derive(Debug, Clone)]
pub enum PairwiseConstraint {
    /// Bounds on the tangential acceleration of the center.
    TangentialAccel { min: f64, max: f64 },
    /// Bounds on the acceleration of each wheel along its own path.
    WheelAccel { min: f64, max: f64 },
    Custom(Arc<dyn PairwiseHook>),
}

impl PairwiseConstraint {
    fn same_kind(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Custom(a), Self::Custom(b)) => a.name() == b.name(),
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

impl PartialEq for PairwiseConstraint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::TangentialAccel { min: a, max: b }, Self::TangentialAccel { min: c, max: d })
            | (Self::WheelAccel { min: a, max: b }, Self::WheelAccel { min: c, max: d }) => a == c && b == d,
            (Self::Custom(a), Self::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// `lo <= b * z_b^2 - a * z_a^2 <= hi`, with `a, b >= 0` and `lo <= 0 <= hi`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Channel {
    pub a: f64,
    pub b: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Channel {
    fn holds(&self, za: f64, zb: f64) -> bool {
        let (ta, tb) = (self.a * za * za, self.b * zb * zb);
        let v = tb - ta;
        let slack = 1e-12 * (ta + tb + self.hi - self.lo);
        v >= self.lo - slack && v <= self.hi + slack
    }

    /// Admissible `z_b^2` for a given `z_a`.
    fn second_interval(&self, za: f64) -> (f64, f64) {
        let ta = self.a * za * za;
        if self.b > 0.0 {
            ((self.lo + ta) / self.b, (self.hi + ta) / self.b)
        } else if self.holds(za, 0.0) {
            (0.0, f64::INFINITY)
        } else {
            (f64::INFINITY, f64::NEG_INFINITY)
        }
    }

    /// Admissible `z_a^2` for a given `z_b`.
    fn first_interval(&self, zb: f64) -> (f64, f64) {
        let tb = self.b * zb * zb;
        if self.a > 0.0 {
            ((tb - self.hi) / self.a, (tb - self.lo) / self.a)
        } else if self.holds(0.0, zb) {
            (0.0, f64::INFINITY)
        } else {
            (f64::INFINITY, f64::NEG_INFINITY)
        }
    }
}

fn channels(c: &PairwiseConstraint, ctx: &StepContext, out: &mut Vec<Channel>) {
    let e = ctx.track_width;
    let s = ctx.step.s.abs();
    match *c {
        PairwiseConstraint::TangentialAccel { min, max } => out.push(Channel {
            a: center_weight(ctx.kappa_a, e),
            b: center_weight(ctx.kappa_b, e),
            lo: 4.0 * s * min,
            hi: 4.0 * s * max,
        }),
        PairwiseConstraint::WheelAccel { min, max } => {
            let (sa, ca) = omega(ctx.kappa_a, e).sin_cos();
            let (sb, cb) = omega(ctx.kappa_b, e).sin_cos();
            let h = 0.5 * e * ctx.step.kappa;
            // v^2 = 2 z^2 f^2 and v_b^2 - v_a^2 = 2 a s_wheel
            for (fa, fb, sw) in [(sa, sb, s * (1.0 + h)), (ca, cb, s * (1.0 - h))] {
                let sw = sw.abs();
                out.push(Channel {
                    a: fa * fa,
                    b: fb * fb,
                    lo: sw * min,
                    hi: sw * max,
                });
            }
        }
        PairwiseConstraint::Custom(_) => {}
    }
}

/// Whether `c` accepts velocities `z_a`, `z_b` at both ends of the step.
pub fn pairwise_holds(c: &PairwiseConstraint, ctx: &StepContext, z_a: f64, z_b: f64) -> bool {
    match c {
        PairwiseConstraint::Custom(hook) => hook.holds(ctx, z_a, z_b),
        builtin => {
            let mut ch = Vec::with_capacity(2);
            channels(builtin, ctx, &mut ch);
            ch.iter().all(|c| c.holds(z_a, z_b))
        }
    }
}

/// Bisection tolerance on `z` for constraints without a closed form.
const SEARCH_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 64;

#[derive(Clone, Copy)]
enum Side {
    First,
    Second,
}

fn holds_all(cs: &[PairwiseConstraint], ctx: &StepContext, za: f64, zb: f64) -> bool {
    cs.iter().all(|c| pairwise_holds(c, ctx, za, zb))
}

fn solve_max(cs: &[PairwiseConstraint], ctx: &StepContext, fixed: f64, cap: f64, side: Side) -> Option<f64> {
    let mut ch = Vec::with_capacity(4);
    for c in cs {
        channels(c, ctx, &mut ch);
    }
    let (mut lo2, mut hi2) = (0.0_f64, cap * cap);
    for c in &ch {
        let (l, h) = match side {
            Side::Second => c.second_interval(fixed),
            Side::First => c.first_interval(fixed),
        };
        lo2 = lo2.max(l);
        hi2 = hi2.min(h);
    }
    let slack = 1e-12 * hi2.abs().max(1.0);
    if lo2 > hi2 + slack {
        return None;
    }
    // sqrt rounding and the slack above may both land just past `cap`
    let lower = lo2.max(0.0).sqrt().min(cap);
    let mut upper = hi2.max(lower * lower).sqrt().min(cap);

    let hooks: Vec<_> = cs
        .iter()
        .filter_map(|c| match c {
            PairwiseConstraint::Custom(h) => Some(h.as_ref()),
            _ => None,
        })
        .collect();
    let check = |z: f64| match side {
        Side::Second => holds_all(cs, ctx, fixed, z),
        Side::First => holds_all(cs, ctx, z, fixed),
    };
    if hooks.is_empty() {
        return Some(upper);
    }
    for _ in 0..8 {
        if check(upper) {
            return Some(upper);
        }
        upper = search_down(&check, lower, upper)?;
    }
    check(upper).then_some(upper)
}

/// Largest `z` in `[lower, upper]` accepted by `ok`, assuming the accepted
/// set is an interval and `upper` is rejected.
fn search_down(ok: &dyn Fn(f64) -> bool, lower: f64, upper: f64) -> Option<f64> {
    let mut bad = upper;
    let mut good = None;
    for k in 1..=SCAN_POINTS {
        let z = upper - (upper - lower) * k as f64 / SCAN_POINTS as f64;
        if ok(z) {
            good = Some(z);
            break;
        }
        bad = z;
    }
    let mut good = good?;
    while bad - good > SEARCH_TOL {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}

/// Largest `z_b` in `[0, cap]` such that every constraint holds with `z_a`.
pub fn solve_max_second(cs: &[PairwiseConstraint], ctx: &StepContext, z_a: f64, cap: f64) -> Option<f64> {
    solve_max(cs, ctx, z_a, cap, Side::Second)
}

/// Largest `z_a` in `[0, cap]` such that every constraint holds with `z_b`.
pub fn solve_max_first(cs: &[PairwiseConstraint], ctx: &StepContext, z_b: f64, cap: f64) -> Option<f64> {
    solve_max(cs, ctx, z_b, cap, Side::First)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OverrideConstraint {
    Pointwise(PointwiseConstraint),
    Pairwise(PairwiseConstraint),
}

/// Constraint replaced or added over an inclusive index range.
///
/// A constraint of the same kind as an existing one replaces it, otherwise it
/// is added. Later overrides win. Pairwise overrides apply to the steps whose
/// first index lies in the range.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub range: RangeInclusive<usize>,
    pub constraint: OverrideConstraint,
}

impl Override {
    pub fn pointwise(range: RangeInclusive<usize>, c: PointwiseConstraint) -> Self {
        Self {
            range,
            constraint: OverrideConstraint::Pointwise(c),
        }
    }

    pub fn pairwise(range: RangeInclusive<usize>, c: PairwiseConstraint) -> Self {
        Self {
            range,
            constraint: OverrideConstraint::Pairwise(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub geometry: RobotGeometry,
    pub pointwise: Vec<PointwiseConstraint>,
    pub pairwise: Vec<PairwiseConstraint>,
    pub overrides: Vec<Override>,
}

impl ConstraintSet {
    pub fn new(track_width: f64) -> Self {
        Self {
            geometry: RobotGeometry { track_width },
            pointwise: Vec::new(),
            pairwise: Vec::new(),
            overrides: Vec::new(),
        }
    }

    pub fn with_pointwise(mut self, c: PointwiseConstraint) -> Self {
        self.pointwise.push(c);
        self
    }

    pub fn with_pairwise(mut self, c: PairwiseConstraint) -> Self {
        self.pairwise.push(c);
        self
    }

    pub fn with_override(mut self, o: Override) -> Self {
        self.overrides.push(o);
        self
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |msg: String| Err(ProfileError::InvalidConstraint(msg));
        if !(self.geometry.track_width > 0.0 && self.geometry.track_width.is_finite()) {
            return bad(format!("track width {} must be positive", self.geometry.track_width));
        }
        let pointwise = self.pointwise.iter().chain(self.overrides.iter().filter_map(|o| match &o.constraint {
            OverrideConstraint::Pointwise(c) => Some(c),
            _ => None,
        }));
        for c in pointwise {
            if !(c.parameter() > 0.0) {
                return bad(format!("{c:?} must have a positive bound"));
            }
        }
        let pairwise = self.pairwise.iter().chain(self.overrides.iter().filter_map(|o| match &o.constraint {
            OverrideConstraint::Pairwise(c) => Some(c),
            _ => None,
        }));
        for c in pairwise {
            if let PairwiseConstraint::TangentialAccel { min, max } | PairwiseConstraint::WheelAccel { min, max } = *c
            {
                if !(min < 0.0 && max > 0.0 && min.is_finite() && max.is_finite()) {
                    return bad(format!("{c:?} needs min < 0 < max"));
                }
            }
        }
        for o in &self.overrides {
            if o.range.start() > o.range.end() {
                return bad(format!("empty override range {:?}", o.range));
            }
        }
        Ok(())
    }

    /// Point-wise constraints in force at index `i`.
    pub fn pointwise_at(&self, i: usize) -> Vec<PointwiseConstraint> {
        let mut out = self.pointwise.clone();
        for o in self.overrides.iter().filter(|o| o.range.contains(&i)) {
            if let OverrideConstraint::Pointwise(c) = o.constraint {
                apply(&mut out, c, PointwiseConstraint::same_kind);
            }
        }
        out
    }

    /// Pairwise constraints in force on the step starting at index `i`.
    pub fn pairwise_at(&self, i: usize) -> Vec<PairwiseConstraint> {
        let mut out = self.pairwise.clone();
        for o in self.overrides.iter().filter(|o| o.range.contains(&i)) {
            if let OverrideConstraint::Pairwise(c) = &o.constraint {
                apply(&mut out, c.clone(), PairwiseConstraint::same_kind);
            }
        }
        out
    }
}

fn apply<T>(list: &mut Vec<T>, c: T, same: fn(&T, &T) -> bool) {
    match list.iter_mut().find(|x| same(x, &c)) {
        Some(slot) => *slot = c,
        None => list.push(c),
    }
}

/// Constraints resolved against one path: raw caps per index and the
/// pairwise constraints of each step.
pub(crate) struct Resolved {
    pub raw_caps: Vec<f64>,
    pub contexts: Vec<StepContext>,
    lists: Vec<Vec<PairwiseConstraint>>,
    list_of_step: Vec<usize>,
}

impl Resolved {
    pub fn new(path: &DiscretizedPath, cs: &ConstraintSet) -> Result<Self, ProfileError> {
        cs.validate()?;
        let m = path.step_count();
        let e = cs.geometry.track_width;
        for o in &cs.overrides {
            if *o.range.end() > m {
                return Err(ProfileError::InvalidConstraint(format!(
                    "override range {:?} exceeds the last index {m}",
                    o.range
                )));
            }
        }

        let mut raw_caps = Vec::with_capacity(m + 1);
        let mut active: Vec<usize> = Vec::new();
        let mut current: Vec<PointwiseConstraint> = Vec::new();
        for i in 0..=m {
            let now: Vec<usize> = (0..cs.overrides.len()).filter(|&k| cs.overrides[k].range.contains(&i)).collect();
            if i == 0 || now != active {
                current = cs.pointwise_at(i);
                active = now;
            }
            let kappa = path.index_curvature(i);
            let cap = current
                .iter()
                .map(|c| pointwise_cap(c, kappa, e))
                .fold(f64::INFINITY, f64::min);
            if !cap.is_finite() {
                return Err(ProfileError::UnboundedCap { index: i });
            }
            raw_caps.push(cap);
        }

        let contexts = (0..m).map(|i| StepContext::new(path, i, e)).collect();
        let mut lists = Vec::new();
        let mut list_of_step = Vec::with_capacity(m);
        let mut active: Option<Vec<usize>> = None;
        for i in 0..m {
            let now: Vec<usize> = (0..cs.overrides.len())
                .filter(|&k| {
                    matches!(cs.overrides[k].constraint, OverrideConstraint::Pairwise(_))
                        && cs.overrides[k].range.contains(&i)
                })
                .collect();
            if active.as_ref() != Some(&now) {
                lists.push(cs.pairwise_at(i));
                active = Some(now);
            }
            list_of_step.push(lists.len() - 1);
        }
        Ok(Self {
            raw_caps,
            contexts,
            lists,
            list_of_step,
        })
    }

    pub fn pairwise(&self, step: usize) -> &[PairwiseConstraint] {
        &self.lists[self.list_of_step[step]]
    }

    pub fn holds(&self, step: usize, za: f64, zb: f64) -> bool {
        holds_all(self.pairwise(step), &self.contexts[step], za, zb)
    }

    pub fn max_second(&self, step: usize, za: f64, cap: f64) -> Option<f64> {
        solve_max_second(self.pairwise(step), &self.contexts[step], za, cap)
    }

    pub fn max_first(&self, step: usize, zb: f64, cap: f64) -> Option<f64> {
        solve_max_first(self.pairwise(step), &self.contexts[step], zb, cap)
    }
}
