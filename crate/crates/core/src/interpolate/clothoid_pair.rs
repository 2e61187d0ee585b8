//! Two clothoid arcs replacing a circle arc between its tangency points.
//!
//! The pair starts at the first tangency point with the heading of the
//! incoming segment and curvature `kappa1`, rises linearly to a peak
//! `kappa_m`, then falls linearly to `kappa2` and ends at the second tangency
//! point with the heading of the outgoing segment. The unknowns are the total
//! length `s_f`, the asymmetry `a = (d1 - d2) / (d1 + d2)` and the mean slope
//! `d = (d1 + d2) / 2`; they are found by damped Newton iterations on the
//! closure residual (heading error, endpoint position error).
//!
//! Everything is solved for a left turn with unit arc curvature and scaled
//! back afterwards; callers mirror right turns.

use thiserror::Error;

use crate::geometry::{eval_piece, CurvePiece, Pose};

/// Extra Newton steps taken once the tolerances are met.
const POLISH_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Endpoint position tolerance, relative to the tangent length.
    pub position_tol: f64,
    /// Heading tolerance in radians.
    pub heading_tol: f64,
    /// Relative step of the central-difference Jacobian.
    pub jacobian_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 50,
            position_tol: 1e-9,
            heading_tol: 1e-10,
            jacobian_step: 1e-6,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("invalid clothoid pair input: {0}")]
    InvalidInput(&'static str),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

/// Parameters of a converged clothoid pair, in unsigned (left-turn) form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClothoidPairFit {
    pub s_f: f64,
    pub s_m: f64,
    pub d1: f64,
    pub d2: f64,
    pub kappa_m: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa_c: f64,
    pub beta: f64,
    pub a: f64,
    pub d: f64,
    /// Tangent length `tan(beta/2) / kappa_c` of the replaced arc.
    pub ell: f64,
    pub iterations: usize,
    pub residual_position: f64,
    pub residual_heading: f64,
}

impl ClothoidPairFit {
    /// Open interval that must contain `s_f`.
    pub fn bracket(kappa1: f64, kappa2: f64, kappa_c: f64, beta: f64) -> (f64, f64) {
        s_f_bracket(kappa1, kappa2, kappa_c, beta)
    }

    /// The two pieces, starting at `start` and turning in direction `sign`.
    pub fn pieces(&self, start: Pose, sign: f64) -> [CurvePiece; 2] {
        let first = CurvePiece::clothoid(start, self.s_m, sign * self.kappa1, sign * self.d1);
        let second = CurvePiece::clothoid(first.end(), self.s_f - self.s_m, sign * self.kappa_m, -sign * self.d2);
        [first, second]
    }
}

/// Initial estimate of `s_f / s_m`.
pub fn initial_ratio(kappa1: f64, kappa2: f64, kappa_c: f64) -> f64 {
    1.0 + (kappa_c - kappa1) / (kappa_c - kappa2)
}

fn s_f_bracket(kappa1: f64, kappa2: f64, kappa_c: f64, beta: f64) -> (f64, f64) {
    let lower = beta / kappa_c;
    let mut upper = 2.0 / kappa_c * (0.5 * beta).tan();
    let kmin = kappa1.min(kappa2);
    if kmin > 0.0 {
        upper = upper.min(beta / kmin);
    }
    (lower, upper)
}

/// Shape of the pair for given unknowns, normalised to `kappa_c = 1`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    s_f: f64,
    s_m: f64,
    d1: f64,
    d2: f64,
    kappa_m: f64,
}

impl Shape {
    fn from_unknowns(x: [f64; 3], k1: f64, k2: f64) -> Option<Self> {
        let [s_f, a, d] = x;
        if !(d > 0.0 && a > -1.0 && a < 1.0 && s_f > 0.0) {
            return None;
        }
        let d1 = d * (1.0 + a);
        let d2 = d * (1.0 - a);
        let s_m = (k2 - k1 + d2 * s_f) / (d1 + d2);
        if !(s_m > 0.0 && s_m < s_f) {
            return None;
        }
        Some(Self {
            s_f,
            s_m,
            d1,
            d2,
            kappa_m: k1 + d1 * s_m,
        })
    }

    fn end(&self, k1: f64) -> Pose {
        let first = CurvePiece::clothoid(Pose::default(), self.s_m, k1, self.d1);
        let (mid, _) = eval_piece(&first, self.s_m).expect("in range");
        let second = CurvePiece::clothoid(mid, self.s_f - self.s_m, self.kappa_m, -self.d2);
        let (end, _) = eval_piece(&second, second.length).expect("in range");
        end
    }

    fn heading_change(&self, k1: f64) -> f64 {
        let w = self.s_f - self.s_m;
        k1 * self.s_m + 0.5 * self.d1 * self.s_m * self.s_m + self.kappa_m * w - 0.5 * self.d2 * w * w
    }
}

struct Problem {
    k1: f64,
    k2: f64,
    beta: f64,
    tau: f64,
    target_x: f64,
    target_y: f64,
}

impl Problem {
    /// `[heading error, x error / tau, y error / tau]`.
    fn residual(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        let shape = Shape::from_unknowns(x, self.k1, self.k2)?;
        let end = shape.end(self.k1);
        Some([
            shape.heading_change(self.k1) - self.beta,
            (end.x() - self.target_x) / self.tau,
            (end.y() - self.target_y) / self.tau,
        ])
    }
}

fn norm3(r: &[f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Fits the clothoid pair that replaces an arc of curvature `kappa_c`
/// turning by `beta`, with end curvatures `kappa1` and `kappa2`.
///
/// Inputs are unsigned: `0 <= kappa1, kappa2 < kappa_c` and
/// `0 < beta <= pi/2`.
pub fn fit_clothoid_pair(
    kappa1: f64,
    kappa2: f64,
    kappa_c: f64,
    beta: f64,
    opts: &FitOptions,
) -> Result<ClothoidPairFit, FitError> {
    if !(kappa_c > 0.0 && kappa_c.is_finite()) {
        return Err(FitError::InvalidInput("arc curvature must be positive"));
    }
    if !(kappa1 >= 0.0 && kappa1 < kappa_c && kappa2 >= 0.0 && kappa2 < kappa_c) {
        return Err(FitError::InvalidInput("end curvatures must lie in [0, kappa_c)"));
    }
    if !(beta > 0.0 && beta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
        return Err(FitError::InvalidInput("turn angle must lie in (0, pi/2]"));
    }

    let k1 = kappa1 / kappa_c;
    let k2 = kappa2 / kappa_c;
    let tau = (0.5 * beta).tan();
    let problem = Problem {
        k1,
        k2,
        beta,
        tau,
        target_x: tau * (1.0 + beta.cos()),
        target_y: tau * beta.sin(),
    };
    let (lower, upper) = s_f_bracket(k1, k2, 1.0, beta);
    let margin = 1e-12 * (upper - lower);
    let clip_s_f = |s: f64| s.clamp(lower + margin, upper - margin);

    // The peak curvature of the initial estimate follows from the turn
    // angle, which is the area under the curvature.
    let s_f0 = lower + 0.3 * (upper - lower);
    let s_m0 = s_f0 / initial_ratio(k1, k2, 1.0);
    let w0 = s_f0 - s_m0;
    let kappa_m0 = (2.0 * beta - k1 * s_m0 - k2 * w0) / s_f0;
    let d1 = (kappa_m0 - k1) / s_m0;
    let d2 = (kappa_m0 - k2) / w0;
    let mut x = [s_f0, (d1 - d2) / (d1 + d2), 0.5 * (d1 + d2)];
    let mut r = problem
        .residual(x)
        .ok_or(FitError::InvalidInput("degenerate initial estimate"))?;

    let converged = |r: &[f64; 3]| r[0].abs() <= opts.heading_tol && r[1].hypot(r[2]) <= opts.position_tol;
    let damped_step = |x: [f64; 3], r: [f64; 3]| -> Option<([f64; 3], [f64; 3])> {
        let scales = [x[0], 1.0, x[2]];
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let h = opts.jacobian_step * scales[j];
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (rp, rm) = (problem.residual(xp)?, problem.residual(xm)?);
            for i in 0..3 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = solve3(jac, r)?;
        let current = norm3(&r);
        let mut lambda = 1.0;
        for _ in 0..40 {
            let trial = [
                clip_s_f(x[0] - lambda * step[0]),
                (x[1] - lambda * step[1]).clamp(-1.0 + 1e-12, 1.0 - 1e-12),
                (x[2] - lambda * step[2]).max(1e-3 * x[2]),
            ];
            if let Some(rt) = problem.residual(trial) {
                if norm3(&rt) < current {
                    return Some((trial, rt));
                }
            }
            lambda *= 0.5;
        }
        None
    };

    let mut iterations = 0;
    while !converged(&r) {
        if iterations == opts.max_iter {
            return Err(FitError::NonConvergence {
                iterations,
                residual: norm3(&r),
            });
        }
        iterations += 1;
        (x, r) = damped_step(x, r).ok_or(FitError::NonConvergence {
            iterations,
            residual: norm3(&r),
        })?;
    }
    // A few more steps push the residual down to rounding level, so that
    // consecutive corners of a path line up far below the tolerance.
    for _ in 0..POLISH_STEPS {
        if iterations == opts.max_iter {
            break;
        }
        match damped_step(x, r) {
            Some((xn, rn)) => {
                iterations += 1;
                (x, r) = (xn, rn);
            }
            None => break,
        }
    }

    let shape = Shape::from_unknowns(x, k1, k2).expect("converged iterate is valid");
    let kc2 = kappa_c * kappa_c;
    Ok(ClothoidPairFit {
        s_f: shape.s_f / kappa_c,
        s_m: shape.s_m / kappa_c,
        d1: shape.d1 * kc2,
        d2: shape.d2 * kc2,
        kappa_m: shape.kappa_m * kappa_c,
        kappa1,
        kappa2,
        kappa_c,
        beta,
        a: x[1],
        d: x[2] * kc2,
        ell: tau / kappa_c,
        iterations,
        residual_position: r[1].hypot(r[2]),
        residual_heading: r[0].abs(),
    })
}
