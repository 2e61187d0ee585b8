//! Independent oracles and instance generators shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use trajkit::{
    discretize, interpolate, pairwise_holds, pointwise_cap, BrokenLine, Clearance, ConstraintSet, CurvePiece,
    DiscretizedPath, InterpolateOptions, PairwiseConstraint, Point2, PointwiseConstraint, Pose, StepContext,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid broken line with `points` points: segment lengths in
/// `[0.3, 2]`, turns in `[0.05, pi/2 - 0.01]` of either sign, and clearances
/// unbounded half of the time.
pub fn random_broken_line(rng: &mut ChaCha8Rng, points: usize) -> BrokenLine {
    let mut pts = vec![Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))];
    let mut heading: f64 = rng.gen_range(-PI..PI);
    let mut clearances = Vec::new();
    for k in 0..points - 1 {
        if k > 0 {
            let turn = rng.gen_range(0.05..FRAC_PI_2 - 0.01);
            heading += if rng.gen_bool(0.5) { turn } else { -turn };
            clearances.push(if rng.gen_bool(0.5) {
                Clearance::Unbounded
            } else {
                Clearance::Bounded(rng.gen_range(0.02..1.0))
            });
        }
        let len = rng.gen_range(0.3..2.0);
        let last = *pts.last().unwrap();
        pts.push(last + Point2::from_angle(heading) * len);
    }
    BrokenLine::new(pts, clearances).expect("generated line")
}

/// Integrates the Frenet equations of a piece with classical RK4.
pub fn rk4_end(piece: &CurvePiece, steps: usize) -> Pose {
    let h = piece.length / steps as f64;
    let k0 = piece.kappa_start;
    let rate = piece.kappa_rate;
    let f = |s: f64, th: f64| (th.cos(), th.sin(), k0 + rate * s);
    let (mut x, mut y, mut th) = (piece.start.x(), piece.start.y(), piece.start.heading);
    for i in 0..steps {
        let s = i as f64 * h;
        let a = f(s, th);
        let b = f(s + 0.5 * h, th + 0.5 * h * a.2);
        let c = f(s + 0.5 * h, th + 0.5 * h * b.2);
        let d = f(s + h, th + h * c.2);
        x += h / 6.0 * (a.0 + 2.0 * b.0 + 2.0 * c.0 + d.0);
        y += h / 6.0 * (a.1 + 2.0 * b.1 + 2.0 * c.1 + d.1);
        th += h / 6.0 * (a.2 + 2.0 * b.2 + 2.0 * c.2 + d.2);
    }
    Pose::new(x, y, th)
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// `(u, C(u), S(u))` at `points` uniformly spaced arguments of `[-max, max]`
/// (`points` odd), by cumulative adaptive quadrature.
pub fn fresnel_oracle(max: f64, points: usize) -> Vec<(f64, f64, f64)> {
    let half = (points - 1) / 2;
    let h = max / half as f64;
    let cos = |t: f64| (0.5 * PI * t * t).cos();
    let sin = |t: f64| (0.5 * PI * t * t).sin();
    let mut pos = Vec::with_capacity(half + 1);
    pos.push((0.0, 0.0, 0.0));
    let (mut c, mut s) = (0.0, 0.0);
    for k in 1..=half {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        c += adaptive_simpson(&cos, a, b, 1e-15);
        s += adaptive_simpson(&sin, a, b, 1e-15);
        pos.push((b, c, s));
    }
    let mut out: Vec<_> = pos[1..].iter().rev().map(|&(u, c, s)| (-u, -c, -s)).collect();
    out.extend(pos);
    out
}

/// Wheel-speed and tangential-acceleration constraints with random bounds.
pub fn random_constraints(rng: &mut ChaCha8Rng) -> ConstraintSet {
    let a = rng.gen_range(0.3..2.0);
    ConstraintSet::new(rng.gen_range(0.15..0.4))
        .with_pointwise(PointwiseConstraint::WheelSpeedMax(rng.gen_range(0.2..0.8)))
        .with_pairwise(PairwiseConstraint::TangentialAccel {
            min: -a * rng.gen_range(0.5..1.5),
            max: a,
        })
}

/// A random smoothed path sampled into at most 50 steps.
pub fn random_short_path(rng: &mut ChaCha8Rng) -> DiscretizedPath {
    loop {
        let n = rng.gen_range(3..6);
        let line = random_broken_line(rng, n);
        let Ok(smooth) = interpolate(&line, &InterpolateOptions::default()) else {
            continue;
        };
        let target = rng.gen_range(10..40) as f64;
        let Ok(path) = discretize(&smooth, smooth.total_length() / target) else {
            continue;
        };
        if path.step_count() <= 50 {
            return path;
        }
    }
}

/// Velocity bounds per index from the point-wise constraints alone.
pub fn raw_caps(path: &DiscretizedPath, cs: &ConstraintSet) -> Vec<f64> {
    (0..=path.step_count())
        .map(|i| {
            cs.pointwise_at(i)
                .iter()
                .map(|c| pointwise_cap(c, path.index_curvature(i), cs.geometry.track_width))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

type StepTable = Vec<(StepContext, Vec<PairwiseConstraint>)>;

fn step_table(path: &DiscretizedPath, cs: &ConstraintSet) -> StepTable {
    (0..path.step_count())
        .map(|i| (StepContext::new(path, i, cs.geometry.track_width), cs.pairwise_at(i)))
        .collect()
}

fn step_ok(table: &StepTable, i: usize, za: f64, zb: f64) -> bool {
    let (ctx, cs) = &table[i];
    cs.iter().all(|c| pairwise_holds(c, ctx, za, zb))
}

/// Grid resolution of the dynamic-programming oracle.
pub const DP_CELL: f64 = 1e-3;

/// Largest `z` with `ok(z)` in `[good, bad)`, given `ok(good)` and not `ok(bad)`.
fn bisect(ok: &dyn Fn(f64) -> bool, mut good: f64, mut bad: f64) -> f64 {
    for _ in 0..200 {
        if (bad - good).abs() <= 1e-12 {
            break;
        }
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Extreme admissible value from `good` towards `limit`, by doubling steps
/// followed by bisection.
fn gallop(accept: &dyn Fn(f64) -> bool, mut good: f64, limit: f64) -> f64 {
    let dir = if limit >= good { 1.0 } else { -1.0 };
    let mut step = DP_CELL;
    loop {
        let next = good + dir * step;
        let next = if dir > 0.0 { next.min(limit) } else { next.max(limit) };
        if next == good {
            return good;
        }
        if !accept(next) {
            return bisect(accept, good, next);
        }
        good = next;
        step *= 2.0;
    }
}

/// Propagates a reachable interval `[lo, hi]` through one step.
///
/// Every grid point of the interval (resolution [`DP_CELL`]) plus both ends
/// is tried as the known velocity. For each, the admissible other velocities
/// are located with the predicate alone: a feasible value is found by
/// scanning the grid, then the extreme admissible values are refined by
/// bisection. The hull of all admissible values, clipped to `[0, cap]`, is
/// returned.
fn propagate(ok: &dyn Fn(f64, f64) -> bool, lo: f64, hi: f64, cap: f64) -> Option<(f64, f64)> {
    let mut sources: Vec<f64> = Vec::new();
    let mut z = lo;
    while z < hi {
        sources.push(z);
        z = ((z / DP_CELL).floor() + 1.0) * DP_CELL;
    }
    sources.push(hi);

    let cells = (cap / DP_CELL).ceil() as i64;
    let grid = |k: i64| (k as f64 * DP_CELL).min(cap);
    let mut best: Option<(f64, f64)> = None;
    for &za in &sources {
        let accept = |zb: f64| ok(za, zb);
        // any admissible value, scanning outward from the grid point closest to za
        let start = ((za / DP_CELL).round() as i64).clamp(0, cells);
        let mut found = None;
        for r in 0..=cells {
            for k in [start + r, start - r] {
                if (0..=cells).contains(&k) && accept(grid(k)) {
                    found = Some(grid(k));
                    break;
                }
            }
            if found.is_some() {
                break;
            }
        }
        let Some(f) = found else { continue };
        let (blo, bhi) = best.unwrap_or((f, f));
        let up = if bhi >= f && accept(bhi) {
            if bhi >= cap || !accept((bhi + 1e-10).min(cap)) {
                bhi
            } else {
                gallop(&accept, bhi, cap)
            }
        } else {
            gallop(&accept, f, cap)
        };
        let down = if blo <= f && accept(blo) {
            if blo <= 0.0 || !accept((blo - 1e-10).max(0.0)) {
                blo
            } else {
                gallop(&accept, blo, 0.0)
            }
        } else {
            gallop(&accept, f, 0.0)
        };
        best = Some(match best {
            None => (down, up),
            Some((a, b)) => (a.min(down), b.max(up)),
        });
    }
    best
}

/// Largest velocity at every index over all feasible velocity sequences,
/// computed by forward reachability and backward co-reachability on a
/// velocity grid. Returns `None` if no feasible sequence exists.
pub fn dp_oracle(path: &DiscretizedPath, cs: &ConstraintSet, z0: f64, z_final_max: f64) -> Option<Vec<f64>> {
    let m = path.step_count();
    let caps = raw_caps(path, cs);
    let table = step_table(path, cs);
    if z0 > caps[0] {
        return None;
    }
    let mut fwd = vec![(z0, z0)];
    for i in 0..m {
        let (lo, hi) = fwd[i];
        let ok = |za: f64, zb: f64| step_ok(&table, i, za, zb);
        fwd.push(propagate(&ok, lo, hi, caps[i + 1])?);
    }
    let mut bwd = vec![(0.0, 0.0); m + 1];
    bwd[m] = (0.0, caps[m].min(z_final_max));
    for i in (0..m).rev() {
        let (lo, hi) = bwd[i + 1];
        let ok = |zb: f64, za: f64| step_ok(&table, i, za, zb);
        bwd[i] = propagate(&ok, lo, hi, caps[i])?;
    }
    (0..=m)
        .map(|i| {
            let lo = fwd[i].0.max(bwd[i].0);
            let hi = fwd[i].1.min(bwd[i].1);
            (lo <= hi + DP_CELL).then_some(hi)
        })
        .collect()
}

/// Whether raising `z[i]` by `eps` breaks a point-wise cap, the final bound,
/// or a pairwise constraint of an adjacent step.
pub fn perturbation_violates(
    path: &DiscretizedPath,
    cs: &ConstraintSet,
    z: &[f64],
    z_final_max: f64,
    i: usize,
    eps: f64,
) -> bool {
    let m = path.step_count();
    let zi = z[i] + eps;
    let caps = raw_caps(path, cs);
    let table = step_table(path, cs);
    zi > caps[i]
        || (i == m && zi > z_final_max)
        || (i > 0 && !step_ok(&table, i - 1, z[i - 1], zi))
        || (i < m && !step_ok(&table, i, zi, z[i + 1]))
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy * sxy / (sxx * syy)
}
