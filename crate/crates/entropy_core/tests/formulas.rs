use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8, PI};

use entropy_core::*;

fn strategy(r: f64, theta: f64, delta: f64, a: [f64; 4]) -> QubitStrategy {
    QubitStrategy::new(BellDiagonalParams::new(r, theta, delta).unwrap(), MeasurementAngles::new(a[0], a[1], a[2], a[3])).unwrap()
}

/// Independent binary entropy in natural-log form.
fn hbin_ln(p: f64) -> f64 {
    let t = |x: f64| if x == 0.0 { 0.0 } else { -x * x.ln() };
    (t(p) + t(1.0 - p)) / std::f64::consts::LN_2
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum::<f64>() / std::f64::consts::LN_2
}

#[test]
fn hbin_examples() {
    assert_eq!(hbin(0.5).unwrap(), 1.0);
    assert_eq!(hbin(0.0).unwrap(), 0.0);
    assert_eq!(hbin(1.0).unwrap(), 0.0);
    let h = hbin(0.11).unwrap();
    assert!((h - hbin_ln(0.11)).abs() < 1e-14);
    assert!((h - 0.499916).abs() < 1e-6);
    // clamped inside the slack, rejected outside it
    assert_eq!(hbin(-5e-10).unwrap(), 0.0);
    assert_eq!(hbin(1.0 + 5e-10).unwrap(), 0.0);
    assert!(hbin(-1e-6).is_err());
    assert!(hbin(1.01).is_err());
    assert!(hbin(f64::NAN).is_err());
}

#[test]
fn spectrum_examples() {
    let s = bell_spectrum(&BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(s.lambda, [0.25; 4]);
    let s = bell_spectrum(&BellDiagonalParams::new(1.0, 0.0, 0.25).unwrap()).unwrap();
    assert_eq!(s.lambda, [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(s.entropy(), 0.0);

    let p = BellDiagonalParams::with_delta_star(0.9, 0.1).unwrap();
    let s = bell_spectrum(&p).unwrap();
    assert!((s.lambda.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(s.lambda.iter().all(|&l| l >= 0.0));
    assert!(s.is_ordered(1e-12));
}

#[test]
fn parameter_region_is_enforced() {
    assert!(BellDiagonalParams::new(1.1, 0.0, 0.0).is_err());
    assert!(BellDiagonalParams::new(0.9, 0.3, 0.0).is_err());
    assert!(BellDiagonalParams::new(0.5, 0.1, 0.3).is_err());
    // θ = π/4 is reachable exactly at R = 1/√2
    assert!(BellDiagonalParams::new(FRAC_1_SQRT_2, FRAC_PI_4, 0.0).is_ok());
    assert_eq!(BellDiagonalParams::theta_max(1.0), 0.0);
}

#[test]
fn delta_star_examples() {
    assert_eq!(delta_star(0.0, 0.7), 0.0);
    assert!(delta_star(1.0, FRAC_PI_4).abs() < 1e-16);

    // Oracle: maximize H(λ) over δ on a fine grid.
    let (r, theta) = (0.9, 0.1);
    let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
    let mut best = (f64::NEG_INFINITY, 0.0);
    let steps = 200_000;
    for k in 0..=steps {
        let d = lo + (hi - lo) * k as f64 / steps as f64;
        let h = shannon(&bell_spectrum(&BellDiagonalParams::new(r, theta, d).unwrap()).unwrap().lambda);
        if h > best.0 {
            best = (h, d);
        }
    }
    let ds = delta_star(r, theta);
    assert!((ds - best.1).abs() < 2.0 * (hi - lo) / steps as f64, "{ds} vs grid {}", best.1);
    assert!((ds - 0.198_463_48).abs() < 1e-8);
}

#[test]
fn epsilon_table_and_score() {
    let mixed = BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap();
    let ang = MeasurementAngles::new(0.3, 1.1, -0.2, 2.0);
    for e in epsilon_table(&mixed, &ang) {
        assert!((e - 0.25).abs() < 1e-15);
    }
    assert_eq!(chsh_score(&mixed, &ang), 0.5);

    let tsirelson = 0.5 * (1.0 + FRAC_1_SQRT_2);
    let pure = BellDiagonalParams::new(1.0, 0.0, 0.25).unwrap();
    let opt = MeasurementAngles::new(0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8);
    let eps = epsilon_table(&pure, &opt);
    for e in eps {
        assert!((2.0 * e - tsirelson).abs() < 1e-15);
    }
    assert!((eps.iter().sum::<f64>() / 2.0 - tsirelson).abs() < 1e-15);
    assert!((chsh_score(&pure, &opt) - tsirelson).abs() < 1e-15);
    assert!((chsh_score(&pure, &opt) - 0.853553).abs() < 1e-6);

    // The equality case holds for every admissible θ.
    for &(r, theta) in &[(0.9, 0.1), (0.75, 0.3), (0.5, 0.7)] {
        let p = BellDiagonalParams::with_delta_star(r, theta).unwrap();
        let s = chsh_score(&p, &MeasurementAngles::chsh_optimal(theta));
        assert!((s - score_bound(r)).abs() < 1e-14);
    }
}

#[test]
fn eve_states_are_normalized() {
    let s = strategy(0.8, 0.2, delta_star(0.8, 0.2) + 0.01, [0.3, 1.0, 2.5, 0.1]);
    let lambda = bell_spectrum(&s.state).unwrap().lambda;
    for x in 0..2 {
        for y in 0..2 {
            let mut total = 0.0;
            let mut m = [[0.0; 4]; 4];
            for a in 0..2 {
                for b in 0..2 {
                    let (p, z) = eve_post_measurement_state(&s, x, y, a, b).unwrap();
                    assert!((p - z.iter().map(|c| c * c).sum::<f64>()).abs() < 1e-10);
                    total += p;
                    for i in 0..4 {
                        for j in 0..4 {
                            m[i][j] += z[i] * z[j];
                        }
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-12);
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { lambda[i] } else { 0.0 };
                    assert!((m[i][j] - want).abs() < 1e-12);
                }
            }
        }
    }

    let pure = strategy(1.0, 0.0, 0.25, [0.4, 1.3, 0.2, 2.2]);
    for k in 0..16 {
        let (_, z) = eve_post_measurement_state(&pure, k & 1, (k >> 1) & 1, (k >> 2) & 1, k >> 3).unwrap();
        assert_eq!(&z[1..], &[0.0, 0.0, 0.0]);
    }
    assert!(eve_post_measurement_state(&pure, 2, 0, 0, 0).is_err());
}

#[test]
fn pure_state_aligned_measurement() {
    let s = strategy(1.0, 0.0, 0.25, [0.0, FRAC_PI_4, 0.0, 0.0]);
    let h = entropy(EntropyQuantity::AB00E, &s, &InputDistribution::uniform()).unwrap();
    assert!((h - 1.0).abs() < 1e-12);
}

/// The tangent witness: θ = 0, R = √2(2ω−1), δ = δ*, α1 = π/4.
fn g1_witness(omega: f64) -> QubitStrategy {
    let r = 2f64.sqrt() * (2.0 * omega - 1.0);
    strategy(r, 0.0, delta_star(r, 0.0), [0.0, FRAC_PI_4, FRAC_PI_8, -FRAC_PI_8])
}

#[test]
fn lemma_witness_reproduces_g1_and_g2() {
    let u = InputDistribution::uniform();
    for &omega in &[0.80, 0.84403, 0.85] {
        let s = g1_witness(omega);
        assert!((chsh_score(&s.state, &s.angles) - omega).abs() < 1e-14);
        let h = entropy(EntropyQuantity::ABXYE, &s, &u).unwrap();
        assert!((h - analytic_g1(omega).unwrap()).abs() < 1e-12, "{omega}: {h}");
        let h = entropy(EntropyQuantity::AXYE, &s, &u).unwrap();
        assert!((h - analytic_g2(omega).unwrap()).abs() < 1e-12, "{omega}: {h}");
    }
}

#[test]
fn literal_lemma_angles_do_not_reach_the_score() {
    // α1 = π/2 repeats the x = 0 basis; the score then stays at ½ + R√2/8.
    let omega = 0.85;
    let r = 2f64.sqrt() * (2.0 * omega - 1.0);
    // δ = 0 is not even admissible here: at θ = 0 the interval is [−¼ + R/2, ¼].
    assert!(BellDiagonalParams::new(r, 0.0, 0.0).is_err());
    let s = strategy(r, 0.0, delta_star(r, 0.0), [0.0, PI / 2.0, FRAC_PI_8, -FRAC_PI_8]);
    let score = chsh_score(&s.state, &s.angles);
    assert!((score - (0.5 + r * 2f64.sqrt() / 8.0)).abs() < 1e-14);
    assert!((score - omega).abs() > 0.1);
}

#[test]
fn analytic_curves() {
    assert!(analytic_a_00e(0.75).unwrap().abs() < 1e-12);
    assert!((analytic_a_00e(OMEGA_MAX).unwrap() - 1.0).abs() < 1e-12);
    let want = 1.0 - hbin_ln(0.5 * (1.0 + 0.44f64.sqrt()));
    assert!((analytic_a_00e(0.80).unwrap() - want).abs() < 1e-12);

    let top = analytic_g1(OMEGA_MAX).unwrap();
    assert!((top - (1.0 + hbin_ln(0.5 + 1.0 / (2.0 * 2f64.sqrt())))).abs() < 1e-12);
    assert!((top - 1.601).abs() < 1e-3);

    for (f, w, v) in [(analytic_g1 as fn(f64) -> Result<f64>, 0.84403, 1.4186), (analytic_g2, 0.84698, 0.92394)] {
        // (ω − ¾)·g′(ω) = g(ω), located by bisection on a central difference.
        let h = |o: f64| {
            let d = (f(o + 1e-7).unwrap() - f(o - 1e-7).unwrap()) / 2e-7;
            d * (o - 0.75) - f(o).unwrap()
        };
        let (mut lo, mut hi) = (0.80, 0.853);
        assert!(h(lo) < 0.0 && h(hi) > 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - w).abs() < 1e-5, "root {lo}");
        assert!((f(lo).unwrap() - v).abs() < 1e-4, "value {}", f(lo).unwrap());
    }

    assert!(analytic_a_00e(0.7).is_err());
    assert!(analytic_g1(0.9).is_err());
    assert!(analytic_g2(0.74).is_err());
}

#[test]
fn quantity_tags_round_trip() {
    for q in EntropyQuantity::ALL {
        assert_eq!(q.tag().parse::<EntropyQuantity>().unwrap(), q);
        let js = serde_json_like(q);
        assert_eq!(js, q.tag());
    }
    assert!("AB_XY".parse::<EntropyQuantity>().is_err());
}

fn serde_json_like(q: EntropyQuantity) -> String {
    format!("{q}")
}

#[test]
fn input_distributions() {
    let p = InputDistribution::product(0.1, 0.3).unwrap();
    assert!((p.p[1][1] - 0.03).abs() < 1e-15);
    assert!((p.px(1) - 0.1).abs() < 1e-15);
    assert!((p.py(1) - 0.3).abs() < 1e-15);
    assert!(InputDistribution::new([[0.5, 0.5], [0.1, 0.0]]).is_err());
    assert!(InputDistribution::new([[1.0, 0.0], [0.0, 0.0]]).is_ok());
    assert!(InputDistribution::product(1.2, 0.3).is_err());
}
