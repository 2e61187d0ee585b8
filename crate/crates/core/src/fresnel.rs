//! Fresnel integrals `C(u) = ∫₀ᵘ cos(πt²/2) dt` and `S(u) = ∫₀ᵘ sin(πt²/2) dt`.
//!
//! Small arguments use the power series. Larger arguments evaluate the
//! auxiliary function through the continued fraction of the complementary
//! error function (modified Lentz), which converges quickly once `|u|` is
//! past the crossover.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Below this magnitude the power series is used.
const SERIES_LIMIT: f64 = 1.8;
const MAX_ITER: usize = 400;
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

/// Evaluates both Fresnel integrals at `u`.
pub fn fresnel(u: f64) -> FresnelPair {
    let ax = u.abs();
    let (c, s) = if ax == 0.0 {
        (0.0, 0.0)
    } else if ax < SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if u < 0.0 {
        FresnelPair { c: -c, s: -s }
    } else {
        FresnelPair { c, s }
    }
}

fn series(x: f64) -> (f64, f64) {
    // Sum over k of (-1)^{floor(k/2)} (pi/2)^k x^{2k+1} / (k! (2k+1)),
    // even k feed C, odd k feed S.
    let t = 0.5 * PI * x * x;
    let mut term = x;
    let mut c = x;
    let mut s = 0.0;
    let mut sign = 1.0;
    for k in 1..MAX_ITER {
        term *= t / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        if k % 2 == 1 {
            s += sign * contrib;
            sign = -sign;
        } else {
            c += sign * contrib;
        }
        if contrib < f64::EPSILON * 1e-2 * c.abs().max(s.abs()).max(1e-300) {
            break;
        }
    }
    (c, s)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = one / (d * a + b);
        cc = b + Complex64::new(a, 0.0) / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < f64::EPSILON {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (one - phase * h);
    (cs.re, cs.im)
}
