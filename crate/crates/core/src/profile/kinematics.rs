use std::f64::consts::SQRT_2;

/// Wheel-split angle of a differential-drive robot of track width `e`
/// following curvature `kappa`: `tan(omega) = (1 + e kappa / 2) / (1 - e kappa / 2)`,
/// with `omega` in `(-pi/4, 3pi/4)`.
pub fn omega(kappa: f64, e: f64) -> f64 {
    let h = 0.5 * e * kappa;
    (1.0 + h).atan2(1.0 - h)
}

/// Right and left wheel speeds for velocity parameter `z`.
///
/// `z` is the quadratic mean of the two wheel speeds.
pub fn wheel_speeds(z: f64, kappa: f64, e: f64) -> (f64, f64) {
    let (s, c) = omega(kappa, e).sin_cos();
    (z * SQRT_2 * s, z * SQRT_2 * c)
}

/// Speed of the midpoint between the wheels.
pub fn center_speed(z: f64, kappa: f64, e: f64) -> f64 {
    let (s, c) = omega(kappa, e).sin_cos();
    z * (s + c) / SQRT_2
}

/// `(sin omega + cos omega)^2`, the factor linking `z^2` to twice the
/// squared center speed.
pub(crate) fn center_weight(kappa: f64, e: f64) -> f64 {
    let (s, c) = omega(kappa, e).sin_cos();
    (s + c) * (s + c)
}
