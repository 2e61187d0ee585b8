mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use trajkit::{
    discretize, eval_piece, fit_clothoid_pair, ingest, interpolate, normalize_angle, solve, split_acute,
    step_geometry, tangent_lengths, validate, wheel_speeds, BrokenLine, Clearance, CurvePiece, FitOptions,
    InterpolateOptions, Point2, Pose, SmoothPath,
};

use common::{random_broken_line, random_constraints, random_short_path, rk4_end, rng};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        ..ProptestConfig::default()
    }
}

/// Broken line whose segments are all tangent to the circle of radius `r`
/// around the origin, touching it at the angles in `touch`.
fn circumscribed(r: f64, touch: &[f64]) -> BrokenLine {
    let tangent_point = |a: f64| Point2::new(a.cos(), a.sin()) * r;
    let dir = |a: f64| Point2::new(-a.sin(), a.cos());
    let mut pts = vec![tangent_point(touch[0]) - dir(touch[0]) * r];
    for w in touch.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let half = 0.5 * (w[1] - w[0]);
        pts.push(Point2::new(mid.cos(), mid.sin()) * (r / half.cos()));
    }
    let last = *touch.last().unwrap();
    pts.push(tangent_point(last) + dir(last) * r);
    BrokenLine::unbounded(pts).unwrap()
}

fn piece_strategy() -> impl Strategy<Value = CurvePiece> {
    (
        -2.0..2.0f64,
        -2.0..2.0f64,
        -PI..PI,
        0.05..3.0f64,
        -4.0..4.0f64,
        -8.0..8.0f64,
        0..3u8,
    )
        .prop_map(|(x, y, th, len, k, rate, kind)| {
            let start = Pose::new(x, y, th);
            match kind {
                0 => CurvePiece::line(start, len),
                1 => CurvePiece::arc(start, len, k),
                _ => CurvePiece::clothoid(start, len, k, rate),
            }
        })
}

fn smooth(seed: u64, points: usize) -> (BrokenLine, SmoothPath) {
    let line = random_broken_line(&mut rng(seed), points);
    let path = interpolate(&line, &InterpolateOptions::default()).unwrap();
    (line, path)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn shared_circle_gives_r_tau(
        r in 0.2..3.0f64,
        start in -PI..PI,
        gaps in prop::collection::vec(0.1..FRAC_PI_2 - 0.05, 3..9),
    ) {
        let mut touch = vec![start];
        for g in &gaps {
            touch.push(touch.last().unwrap() + g);
        }
        let line = circumscribed(r, &touch);
        let corners = tangent_lengths(&line);
        // Corners whose both neighbours are corners as well.
        for c in &corners[1..corners.len() - 1] {
            prop_assert!((c.ell - r * c.tau).abs() <= 1e-9 * r.max(1.0), "corner {}: {} vs {}", c.index, c.ell, r * c.tau);
            prop_assert!((c.kappa_c - 1.0 / r).abs() <= 1e-9 / r.min(1.0));
        }
    }

    #[test]
    fn lower_clearance_never_lengthens(seed in any::<u64>(), points in 3..12usize, pick in any::<prop::sample::Index>(), scale in 0.0..1.0f64) {
        let line = random_broken_line(&mut rng(seed), points);
        let i = 1 + pick.index(points - 2);
        let before = tangent_lengths(&line)[i - 1].ell;
        let mut clearances: Vec<Clearance> = (1..points - 1).map(|k| line.clearance(k)).collect();
        let tighter = scale.max(1e-3) * line.clearance(i).or(before * 2.0);
        clearances[i - 1] = Clearance::Bounded(tighter);
        let clipped = BrokenLine::new(line.points().to_vec(), clearances).unwrap();
        let after = tangent_lengths(&clipped)[i - 1].ell;
        prop_assert!(after <= before + 1e-15, "{after} > {before}");
    }

    #[test]
    fn corners_conserve_turn(seed in any::<u64>(), points in 3..20usize) {
        let (line, path) = smooth(seed, points);
        for (index, range) in path.corner_pieces() {
            let turn: f64 = path.pieces()[range.clone()].iter().map(trajkit::integrate_heading).sum();
            prop_assert!((turn - line.turn_angle(*index)).abs() <= 1e-9);
        }
    }

    #[test]
    fn pair_peak_exceeds_arc(
        f1 in 0.0..0.9f64,
        f2 in 0.0..0.9f64,
        kc in 0.1..20.0f64,
        beta in 0.02..FRAC_PI_2,
    ) {
        let fit = fit_clothoid_pair(f1 * kc, f2 * kc, kc, beta, &FitOptions::default()).unwrap();
        prop_assert!(fit.kappa_m > kc, "{} <= {kc}", fit.kappa_m);
        let (lo, hi) = trajkit::ClothoidPairFit::bracket(f1 * kc, f2 * kc, kc, beta);
        prop_assert!(fit.s_f > lo && fit.s_f < hi);
    }

    #[test]
    fn pieces_follow_their_frenet_equations(piece in piece_strategy()) {
        let (end, kappa) = eval_piece(&piece, piece.length).unwrap();
        let oracle = rk4_end(&piece, 4000);
        prop_assert!(end.position.distance(oracle.position) <= 1e-9);
        prop_assert!(normalize_angle(end.heading - oracle.heading).abs() <= 1e-9);
        prop_assert!((kappa - piece.kappa_end()).abs() <= 1e-12 * (1.0 + kappa.abs()));
    }

    #[test]
    fn heading_derivative_is_curvature(piece in piece_strategy(), at in 0.05..0.95f64) {
        let s = at * piece.length;
        let h = 1e-5;
        let (a, _) = eval_piece(&piece, s - h).unwrap();
        let (b, _) = eval_piece(&piece, s + h).unwrap();
        let (mid, k) = eval_piece(&piece, s).unwrap();
        let slope = normalize_angle(b.heading - a.heading) / (2.0 * h);
        prop_assert!((slope - k).abs() <= 1e-9 * (1.0 + k.abs()), "{slope} vs {k}");
        // And the position moves along the heading at unit speed.
        let v = (b.position - a.position) * (0.5 / h);
        prop_assert!((v - Point2::from_angle(mid.heading)).norm() <= 1e-6 * (1.0 + k * k));
    }

    #[test]
    fn small_turn_limit(lambda in 1e-3..10.0f64, th in -PI..PI) {
        let delta = 1e-8;
        let a = Pose::new(0.0, 0.0, th);
        let chord = Point2::from_angle(th + 0.5 * delta) * lambda;
        let b = Pose::from_parts(chord, th + delta);
        let g = step_geometry(&a, &b).unwrap();
        prop_assert!((g.kappa - delta / lambda).abs() <= 1e-6 * delta / lambda);
        prop_assert!((g.s - lambda).abs() <= 1e-6 * lambda);
    }

    #[test]
    fn arcs_are_recovered_exactly(k in prop_oneof![-20.0..-0.05f64, 0.05..20.0f64], turn in 0.1..3.0f64, steps in 2..40usize) {
        let len = turn / k.abs();
        let path = SmoothPath::from_pieces(vec![CurvePiece::arc(Pose::new(0.3, -0.2, 0.7), len, k)]);
        let d = discretize(&path, len / steps as f64).unwrap();
        for st in d.steps() {
            prop_assert!((st.kappa - k).abs() <= 1e-12 * k.abs().max(1.0), "{} vs {k}", st.kappa);
        }
    }

    #[test]
    fn discretized_length(seed in any::<u64>(), points in 3..10usize, per_meter in 20..400usize) {
        let (_, path) = smooth(seed, points);
        let step = 1.0 / per_meter as f64;
        let d = discretize(&path, step).unwrap();
        let bound: f64 = path
            .pieces()
            .iter()
            .map(|p| {
                let kmax = p.kappa_start.abs().max(p.kappa_end().abs());
                p.length / step * step.powi(3) * (p.kappa_rate.abs() + kmax * kmax)
            })
            .sum();
        let total: f64 = d.steps().iter().map(|s| s.s).sum();
        prop_assert!((total - path.total_length()).abs() <= bound + 1e-12, "{total} vs {}", path.total_length());
    }

    #[test]
    fn ingest_takes_discretizations_unchanged(seed in any::<u64>(), points in 2..10usize, per_meter in 10..200usize) {
        let (_, path) = smooth(seed, points);
        let d = discretize(&path, 1.0 / per_meter as f64).unwrap();
        let again = ingest(d.configs().to_vec(), false).unwrap();
        prop_assert_eq!(again, d);
    }

    #[test]
    fn z_is_the_quadratic_mean(z in 0.0..5.0f64, kappa in -50.0..50.0f64, e in 0.05..1.0f64) {
        let (vr, vl) = wheel_speeds(z, kappa, e);
        prop_assert!(((vr * vr + vl * vl) / 2.0).sqrt() - z <= 1e-12 * (1.0 + z));
        // Wheel speeds sit at the track offsets from the center path.
        if vr + vl != 0.0 {
            let ratio = (vr - vl) / (vr + vl);
            prop_assert!((ratio - kappa * e / 2.0).abs() <= 1e-9 * (1.0 + kappa.abs()));
        }
    }

    #[test]
    fn profile_is_feasible_and_capped(seed in any::<u64>()) {
        let mut r = rng(seed);
        let path = random_short_path(&mut r);
        let cs = random_constraints(&mut r);
        let p = solve(&path, &cs, 0.0, 0.0).unwrap();
        prop_assert_eq!(p.z[0], 0.0);
        prop_assert_eq!(*p.z.last().unwrap(), 0.0);
        for (i, (&z, &cap)) in p.z.iter().zip(&p.caps).enumerate() {
            prop_assert!(z >= 0.0 && z <= cap * (1.0 + 1e-12), "index {i}");
        }
        for i in 0..path.step_count() {
            let ctx = trajkit::StepContext::new(&path, i, cs.geometry.track_width);
            for c in cs.pairwise_at(i) {
                prop_assert!(trajkit::pairwise_holds(&c, &ctx, p.z[i], p.z[i + 1]), "step {i}");
            }
        }
        prop_assert!(p.t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn passes_only_lower_velocities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let path = random_short_path(&mut r);
        let cs = random_constraints(&mut r);
        let caps = trajkit::stage1_caps(&path, &cs, 0.0).unwrap();
        let fwd = trajkit::stage2_forward(&path, &cs, &caps, 0.0).unwrap();
        let bwd = trajkit::stage3_backward(&path, &cs, &caps, &fwd, 0.0).unwrap();
        for i in 0..caps.len() {
            prop_assert!(fwd[i] <= caps[i] && bwd[i] <= fwd[i], "index {i}");
        }
    }

    #[test]
    fn acute_corners_split_in_half(
        len_a in 0.5..3.0f64,
        len_b in 0.5..3.0f64,
        beta in (FRAC_PI_2 + 0.05)..(PI - 0.05),
        left in any::<bool>(),
        clearance in prop_oneof![Just(None), (0.05..1.0f64).prop_map(Some)],
    ) {
        let turn = if left { beta } else { -beta };
        let p1 = Point2::new(len_a, 0.0);
        let line = BrokenLine::new(
            vec![Point2::new(0.0, 0.0), p1, p1 + Point2::from_angle(turn) * len_b],
            vec![clearance.map_or(Clearance::Unbounded, Clearance::Bounded)],
        )
        .unwrap();
        let split = split_acute(&line, 1e-6).unwrap();
        prop_assert!(validate(&split).is_empty());
        prop_assert_eq!(split.points().len(), 4);
        for i in 1..3 {
            prop_assert!((split.turn_angle(i) - turn / 2.0).abs() <= 1e-12);
        }
        prop_assert!(interpolate(&split, &InterpolateOptions::default()).is_ok());
    }
}
