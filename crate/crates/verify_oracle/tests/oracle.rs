use std::f64::consts::FRAC_1_SQRT_2;

use entropy_core::{
    analytic_a_00e, chsh_score, entropy, BellDiagonalParams, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy,
};
use verify_oracle::*;

fn pure_aligned() -> QubitStrategy {
    QubitStrategy::new(BellDiagonalParams::new(1.0, 0.0, 0.25).unwrap(), MeasurementAngles::new(0.0, 0.0, 0.0, 0.0)).unwrap()
}

#[test]
fn agrees_with_entropy_core_on_random_strategies() {
    let u = InputDistribution::uniform();
    let biased = InputDistribution::product(0.2, 0.7).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..10_000u64 {
        let s = random_strategy(seed);
        let pxy = if seed % 4 == 3 { &biased } else { &u };
        for q in EntropyQuantity::ALL {
            let a = entropy(q, &s, pxy).unwrap();
            let b = brute_force_entropy(q, &s, pxy).unwrap();
            worst = worst.max((a - b).abs());
            assert!((a - b).abs() <= 1e-8, "seed {seed} {q}: {a} vs {b}");
        }
        assert!((brute_force_score(&s).unwrap() - chsh_score(&s.state, &s.angles)).abs() < 1e-12);
    }
    eprintln!("largest disagreement {worst:e}");
}

#[test]
fn trivial_states() {
    let u = InputDistribution::uniform();
    let mixed =
        QubitStrategy::new(BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap(), MeasurementAngles::new(0.3, 1.1, 0.2, 2.0)).unwrap();
    for q in EntropyQuantity::ALL {
        let a = entropy(q, &mixed, &u).unwrap();
        let b = brute_force_entropy(q, &mixed, &u).unwrap();
        assert!((a - b).abs() < 1e-12, "{q}");
    }
    let s = pure_aligned();
    assert!((brute_force_entropy(EntropyQuantity::AB00E, &s, &u).unwrap() - 1.0).abs() < 1e-12);
    assert!((entropy(EntropyQuantity::AB00E, &s, &u).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn explicit_state_invariants() {
    for seed in 0..200 {
        let s = random_strategy(seed);
        let e = ExplicitState::from_strategy(&s).unwrap();
        assert!((e.rho.trace() - 1.0).abs() < 1e-12);
        assert!((e.rho - e.rho.transpose()).abs().max() < 1e-15);
        assert!(e.rho.symmetric_eigenvalues().min() > -1e-12);
        // The purification reproduces ρ.
        let mut rebuilt = nalgebra::Matrix4::zeros();
        for v in e.purification {
            let v = nalgebra::Vector4::from(v);
            rebuilt += v * v.transpose();
        }
        assert!((rebuilt - e.rho).abs().max() < 1e-14);
        assert!((e.rho_bell.trace() - 1.0).abs() < 1e-12);
    }
    assert!(ExplicitState::new(0.9, 0.0, 0.0).is_err());
}

#[test]
fn random_strategies() {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for seed in 0..100_000u64 {
        let s = random_strategy(seed);
        s.state.validate().unwrap();
        assert!(s.angles.as_array().iter().all(|a| (0.0..std::f64::consts::PI).contains(a)));
        let w = chsh_score(&s.state, &s.angles);
        lo = lo.min(w);
        hi = hi.max(w);
    }
    assert!(lo <= 0.5 * (1.0 - FRAC_1_SQRT_2) + 0.05, "{lo}");
    assert!(hi >= 0.5 * (1.0 + FRAC_1_SQRT_2) - 0.05, "{hi}");
    assert_eq!(random_strategy(42), random_strategy(42));
    assert_ne!(random_strategy(42), random_strategy(43));
}

#[test]
fn gradients_match_finite_differences() {
    let u = InputDistribution::uniform();
    let mut checked = 0;
    for seed in 0..300u64 {
        let s = random_strategy(seed);
        if chsh_score(&s.state, &s.angles) <= 0.5 {
            continue;
        }
        for q in EntropyQuantity::ALL {
            if let GradientCheck::MaxError(e) = gradient_check(q, &s, &u) {
                assert!(e <= 1e-4, "seed {seed} {q}: {e}");
                checked += 1;
            }
        }
    }
    assert!(checked > 500, "only {checked} interior points");

    let r0 =
        QubitStrategy::new(BellDiagonalParams::new(0.0, 0.3, 0.0).unwrap(), MeasurementAngles::new(0.3, 1.1, 0.2, 2.0)).unwrap();
    assert_eq!(gradient_check(EntropyQuantity::AE, &r0, &u), GradientCheck::ExcludedBoundary);
    // Aligned measurements on a near-pure state: ε00 ≈ ½.
    let near = QubitStrategy::new(
        BellDiagonalParams::with_delta_star(0.99, 0.005).unwrap(),
        MeasurementAngles::new(0.0, 0.7, 1e-6, 1.9),
    )
    .unwrap();
    assert_eq!(gradient_check(EntropyQuantity::AB00E, &near, &u), GradientCheck::ExcludedNonSmooth);
}

#[test]
fn brute_force_minimum_matches_analytic_a00e() {
    let u = InputDistribution::uniform();
    for (k, w) in [0.78, 0.80, 0.82, 0.84].into_iter().enumerate() {
        let (f, s) = brute_force_minimum(EntropyQuantity::A00E, w, &u, 200, k as u64).unwrap();
        let want = analytic_a_00e(w).unwrap();
        assert!((f - want).abs() <= 2e-4, "ω={w}: {f} vs {want}");
        assert!((brute_force_score(&s).unwrap() - w).abs() < 1e-9);
    }
}
