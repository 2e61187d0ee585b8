use super::BrokenLine;

/// Circle-arc fit at one interior point of a broken line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub index: usize,
    /// Signed turn angle.
    pub beta: f64,
    /// `|tan(beta / 2)|`.
    pub tau: f64,
    /// Distance from the corner to both tangency points of the arc.
    pub ell: f64,
    /// Arc curvature `tau / ell`, signed like `beta`.
    pub kappa_c: f64,
}

/// Tangent lengths of the curvature-bounded interpolation.
///
/// Each corner takes the smallest of its clearance and the two common-circle
/// values obtained from its adjacent segments. A segment with no corner at
/// its far end contributes its full length instead.
pub fn tangent_lengths(line: &BrokenLine) -> Vec<Corner> {
    let n = line.segment_count();
    if n < 2 {
        return Vec::new();
    }
    let tau: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                0.0
            } else {
                (0.5 * line.turn_angle(i)).tan().abs()
            }
        })
        .collect();
    let mut ell: Vec<f64> = (1..n)
        .map(|i| {
            let len_prev = line.segment_length(i - 1);
            let len_next = line.segment_length(i);
            let from_next = if i + 1 < n {
                tau[i] * len_next / (tau[i] + tau[i + 1])
            } else {
                len_next
            };
            let from_prev = if i > 1 {
                tau[i] * len_prev / (tau[i - 1] + tau[i])
            } else {
                len_prev
            };
            let mut l = from_next.min(from_prev);
            if let Some(c) = line.clearance(i).value() {
                l = l.min(c);
            }
            l
        })
        .collect();

    // Neighbouring corners must not claim more than their shared segment.
    for j in 1..n.saturating_sub(1) {
        let (a, b) = (j - 1, j);
        let len = line.segment_length(j);
        let used = ell[a] + ell[b];
        if used > len {
            let f = len / used;
            ell[a] *= f;
            ell[b] *= f;
        }
    }

    (1..n)
        .map(|i| {
            let beta = line.turn_angle(i);
            let l = ell[i - 1];
            Corner {
                index: i,
                beta,
                tau: tau[i],
                ell: l,
                kappa_c: beta.signum() * tau[i] / l,
            }
        })
        .collect()
}

/// Default reduction factor between two same-direction arcs.
pub const DEFAULT_JUNCTION_FACTOR: f64 = 0.70;

/// Curvature imposed where two curve regions meet.
///
/// Zero next to a straight region or between opposite turns; otherwise a
/// fraction `factor` of the smaller arc curvature, with the common sign.
pub fn junction_curvature(kappa_a: f64, kappa_b: f64, factor: f64) -> f64 {
    if kappa_a == 0.0 || kappa_b == 0.0 || kappa_a.signum() != kappa_b.signum() {
        return 0.0;
    }
    kappa_a.signum() * factor * kappa_a.abs().min(kappa_b.abs())
}
