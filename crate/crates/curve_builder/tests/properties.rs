use curve_builder::*;
use entropy_core::{
    chsh_score, BellDiagonalParams, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy, OMEGA_MAX,
};
use proptest::prelude::*;

/// Strictly increasing scores in (3/4, ω_max] with nondecreasing values.
fn monotone_curve() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (8usize..40).prop_flat_map(|n| {
        (prop::collection::vec(1e-4f64..1.0, n), prop::collection::vec(0.0f64..1.0, n)).prop_map(|(dx, dy)| {
            let total: f64 = dx.iter().sum();
            let mut x = 0.75;
            let mut y = 0.0;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (a, b) in dx.iter().zip(&dy) {
                x += a / total * (OMEGA_MAX - 0.75);
                y += b;
                xs.push(x.min(OMEGA_MAX));
                ys.push(y);
            }
            (xs, ys)
        })
    })
}

fn curve_from(xs: &[f64], ys: &[f64]) -> RateCurve {
    RateCurve {
        quantity: EntropyQuantity::AE,
        pxy: InputDistribution::uniform(),
        kind: CurveKind::G,
        points: xs.iter().zip(ys).map(|(&omega, &entropy)| CurvePoint { omega, entropy, argmin: None }).collect(),
        tangent: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn interpolant_is_exact_at_knots_and_monotone((xs, ys) in monotone_curve()) {
        prop_assume!(xs.windows(2).all(|w| w[1] > w[0]));
        let p = Interpolant::new(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((p.eval(*x) - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let w = xs[0] + (xs[xs.len() - 1] - xs[0]) * k as f64 / 400.0;
            let v = p.eval(w);
            prop_assert!(v >= prev - 1e-12);
            prop_assert!(v >= ys[0] - 1e-12 && v <= ys[ys.len() - 1] + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn envelope_is_convex_and_below((xs, ys) in monotone_curve()) {
        prop_assume!(xs.windows(2).all(|w| w[1] > w[0]));
        let g = curve_from(&xs, &ys);
        let f = convex_envelope(&g).unwrap();
        prop_assert_eq!(f.kind, CurveKind::F);
        prop_assert!(f.min_second_difference() >= -1e-7 * (1.0 + ys[ys.len() - 1]));
        let gi = g.interpolant().unwrap();
        for p in &f.points {
            prop_assert!(p.entropy <= gi.eval(p.omega) + 1e-9);
        }
        if let Some(t) = f.tangent {
            prop_assert!(t.omega_star > 0.75 && t.omega_star <= OMEGA_MAX);
        }
    }

    #[test]
    fn csv_round_trip_is_lossless(
        (xs, ys) in monotone_curve(),
        r in 0.0f64..1.0, ut in 0.0f64..1.0, ud in 0.0f64..1.0,
        a in prop::array::uniform4(0.0f64..std::f64::consts::PI),
    ) {
        prop_assume!(xs.windows(2).all(|w| w[1] > w[0]));
        let mut c = curve_from(&xs, &ys);
        let theta = ut * BellDiagonalParams::theta_max(r);
        let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
        let state = BellDiagonalParams::new(r, theta, lo + ud * (hi - lo)).unwrap();
        let s = QubitStrategy::new(state, MeasurementAngles::new(a[0], a[1], a[2], a[3])).unwrap();
        c.points[0].argmin = Some(s);
        c.tangent = Some(Tangent { omega_star: xs[1], slope: ys[1] / (xs[1] - 0.75) });
        for fmt in [Format::Csv, Format::Json] {
            let back = import_curve(&export_curve(&c, fmt).unwrap(), fmt).unwrap();
            prop_assert_eq!(&back, &c);
        }
    }

    #[test]
    fn solved_radius_reproduces_score(
        theta in 0.0f64..std::f64::consts::FRAC_PI_4,
        a in prop::array::uniform4(0.0f64..std::f64::consts::PI),
        u in 0.0f64..1.0,
    ) {
        let angles = MeasurementAngles::new(a[0], a[1], a[2], a[3]);
        let c = entropy_core::formulas::score_coefficient_g(theta, &angles.as_array());
        prop_assume!(c > 1e-3);
        let rmax = 1.0 / (theta.cos() + theta.sin());
        let omega = 0.5 + u * rmax * c;
        let r = solve_r_for_score(theta, &angles, omega).unwrap();
        let state = BellDiagonalParams::with_delta_star(r, theta).unwrap();
        prop_assert!((chsh_score(&state, &angles) - omega).abs() < 1e-12);
    }
}
