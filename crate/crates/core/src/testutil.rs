//! Independent numerical oracles used only by unit tests.

use std::f64::consts::PI;

use crate::geometry::{CurvePiece, Point2, Pose};

pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

/// `(u, C(u), S(u))` on a uniform grid over `[-max, max]`, by cumulative
/// adaptive quadrature of the defining integrals.
pub(crate) fn fresnel_quadrature_grid(max: f64, points: usize) -> Vec<(f64, f64, f64)> {
    let half = (points - 1) / 2;
    let h = max / half as f64;
    let cos = |t: f64| (0.5 * PI * t * t).cos();
    let sin = |t: f64| (0.5 * PI * t * t).sin();
    let mut positive = vec![(0.0, 0.0, 0.0)];
    let (mut c, mut s) = (0.0, 0.0);
    for k in 1..=half {
        let a = (k - 1) as f64 * h;
        let b = k as f64 * h;
        c += adaptive_simpson(&cos, a, b, 1e-16);
        s += adaptive_simpson(&sin, a, b, 1e-16);
        positive.push((b, c, s));
    }
    let mut out: Vec<_> = positive.iter().skip(1).rev().map(|&(u, c, s)| (-u, -c, -s)).collect();
    out.extend(positive);
    out
}

/// Integrates the Frenet equations of a piece with classical RK4.
pub(crate) fn rk4_frenet(piece: &CurvePiece, s_end: f64, steps: usize) -> Pose {
    let h = s_end / steps as f64;
    let k0 = piece.kappa_start;
    let rate = piece.kappa_rate;
    let deriv = |s: f64, theta: f64| -> (f64, f64, f64) { (theta.cos(), theta.sin(), k0 + rate * s) };
    let (mut x, mut y, mut th) = (piece.start.x(), piece.start.y(), piece.start.heading);
    for i in 0..steps {
        let s = i as f64 * h;
        let a = deriv(s, th);
        let b = deriv(s + 0.5 * h, th + 0.5 * h * a.2);
        let c = deriv(s + 0.5 * h, th + 0.5 * h * b.2);
        let d = deriv(s + h, th + h * c.2);
        x += h / 6.0 * (a.0 + 2.0 * b.0 + 2.0 * c.0 + d.0);
        y += h / 6.0 * (a.1 + 2.0 * b.1 + 2.0 * c.1 + d.1);
        th += h / 6.0 * (a.2 + 2.0 * b.2 + 2.0 * c.2 + d.2);
    }
    Pose::from_parts(Point2::new(x, y), th)
}
