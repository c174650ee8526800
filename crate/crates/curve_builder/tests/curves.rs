use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use curve_builder::*;
use entropy_core::{chsh_score, entropy, EntropyQuantity, InputDistribution, MeasurementAngles};

const WMAX: f64 = 0.5 * (1.0 + FRAC_1_SQRT_2);

fn hbin(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2
}

fn oracle_a00e(w: f64) -> f64 {
    1.0 - hbin(0.5 * (1.0 + (16.0 * w * (w - 1.0) + 3.0).max(0.0).sqrt()))
}

fn oracle_g1(w: f64) -> f64 {
    1.0 + hbin(w) - 2.0 * hbin(0.5 + (2.0 * w - 1.0) / SQRT_2)
}

fn oracle_g2(w: f64) -> f64 {
    1.0 - hbin(0.5 + (2.0 * w - 1.0) / SQRT_2)
}

/// ω* by a dense scan of the chord slope from (3/4, 0).
fn oracle_tangent(g: impl Fn(f64) -> f64) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for k in 1..=200_000 {
        let w = 0.75 + (WMAX - 0.75) * k as f64 / 200_000.0;
        let r = g(w) / (w - 0.75);
        if r < best.0 {
            best = (r, w);
        }
    }
    best.1
}

fn cfg(restarts: usize) -> OptimizerConfig {
    OptimizerConfig::with_restarts(restarts)
}

fn sampled(q: EntropyQuantity, grid: &[f64], f: impl Fn(f64) -> f64) -> RateCurve {
    RateCurve {
        quantity: q,
        pxy: InputDistribution::uniform(),
        kind: CurveKind::G,
        points: grid.iter().map(|&w| CurvePoint { omega: w, entropy: f(w), argmin: None }).collect(),
        tangent: None,
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

#[test]
fn solve_r_examples() {
    let opt = MeasurementAngles::chsh_optimal(0.0);
    assert!((solve_r_for_score(0.0, &opt, WMAX).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(solve_r_for_score(0.3, &MeasurementAngles::new(0.1, 0.7, 0.2, 1.3), 0.5).unwrap(), 0.0);
    let r = solve_r_for_score(0.0, &opt, 0.8).unwrap();
    assert!((r - 0.6 * SQRT_2).abs() < 1e-12);
    let state = entropy_core::BellDiagonalParams::with_delta_star(r, 0.0).unwrap();
    assert!((chsh_score(&state, &opt) - 0.8).abs() < 1e-12);

    let flat = MeasurementAngles::new(0.0, 0.0, PI / 4.0, PI / 4.0);
    assert!(solve_r_for_score(0.0, &flat, 0.8).is_err());
    // c = √2/8 here, so ω = 0.85 would need R > 1.
    let weak = MeasurementAngles::new(0.0, PI / 2.0, PI / 8.0, -PI / 8.0);
    assert!(solve_r_for_score(0.0, &weak, 0.85).is_err());
    assert!(solve_r_for_score(0.0, &opt, 0.9).is_err());
}

#[test]
fn a00e_matches_analytic() {
    for w in [0.76, 0.8, 0.83, 0.85] {
        let p = minimize_entropy_at_score(EntropyQuantity::A00E, w, &InputDistribution::uniform(), &cfg(200)).unwrap();
        assert!((p.entropy - oracle_a00e(w)).abs() < 1e-4, "ω={w}: {} vs {}", p.entropy, oracle_a00e(w));
    }
}

#[test]
fn xye_curves_match_lemma_curves_above_tangent() {
    let u = InputDistribution::uniform();
    let p = minimize_entropy_at_score(EntropyQuantity::ABXYE, 0.85, &u, &cfg(200)).unwrap();
    assert!((p.entropy - oracle_g1(0.85)).abs() < 1e-4);
    let p = minimize_entropy_at_score(EntropyQuantity::AXYE, 0.85, &u, &cfg(200)).unwrap();
    assert!((p.entropy - oracle_g2(0.85)).abs() < 1e-4);
}

#[test]
fn vanishes_near_classical_bound() {
    let u = InputDistribution::uniform();
    // The two-sided curves grow like √(ω − 3/4), so the limit is probed close in.
    for q in EntropyQuantity::ALL {
        let p = minimize_entropy_at_score(q, 0.75 + 1e-8, &u, &cfg(100)).unwrap();
        assert!(p.entropy <= 1e-3, "{q}: {}", p.entropy);
    }
}

#[test]
fn maximal_violation_values() {
    let u = InputDistribution::uniform();
    let p = minimize_entropy_at_score(EntropyQuantity::AB00E, WMAX, &u, &cfg(100)).unwrap();
    assert!((p.entropy - (1.0 + hbin(0.5 + 0.5 * FRAC_1_SQRT_2))).abs() < 1e-4, "{}", p.entropy);
    let p = minimize_entropy_at_score(EntropyQuantity::ABE, WMAX, &u, &cfg(100)).unwrap();
    assert!((p.entropy - (1.0 + hbin(0.5 + 1.0 / 32f64.sqrt()))).abs() < 1e-3, "{}", p.entropy);
}

#[test]
fn curve_points_reproduce_through_entropy_core() {
    let u = InputDistribution::uniform();
    for q in EntropyQuantity::ALL {
        let (p, stats) = minimize_with_starts(q, 0.82, &u, &cfg(50), &[]).unwrap();
        let s = p.argmin.unwrap();
        assert!((chsh_score(&s.state, &s.angles) - 0.82).abs() <= SCORE_TOL);
        assert!((entropy(q, &s, &u).unwrap() - p.entropy).abs() <= 1e-9);
        assert!(stats.feasible > 0 && stats.hits >= 1 && stats.attempted == 50);
    }
}

#[test]
fn minimize_errors() {
    let u = InputDistribution::uniform();
    assert!(matches!(minimize_entropy_at_score(EntropyQuantity::AE, 0.75, &u, &cfg(10)), Err(CurveError::Domain(_))));
    assert!(minimize_entropy_at_score(EntropyQuantity::AE, 0.9, &u, &cfg(10)).is_err());
    let bad = OptimizerConfig { restarts: 0, ..cfg(1) };
    assert!(matches!(minimize_entropy_at_score(EntropyQuantity::AE, 0.8, &u, &bad), Err(CurveError::Config(_))));
}

#[test]
fn a00e_curve_over_fifty_points() {
    let grid = linspace(0.7505, WMAX, 50);
    let curve = build_g_curve(EntropyQuantity::A00E, &grid, &InputDistribution::uniform(), &cfg(100)).unwrap();
    assert_eq!(curve.kind, CurveKind::G);
    let err = curve.points.iter().map(|p| (p.entropy - oracle_a00e(p.omega)).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-4, "max error {err}");
    assert!(curve.points.windows(2).all(|w| w[1].entropy >= w[0].entropy - 1e-6));

    let golden = read_curve(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/a00e_golden.csv"))).unwrap();
    assert_eq!(golden.points.len(), 50);
    for (a, b) in golden.points.iter().zip(&curve.points) {
        assert!((a.omega - b.omega).abs() < 1e-15);
        assert!((a.entropy - b.entropy).abs() <= 1e-4);
    }
}

#[test]
fn golden_file_matches_analytic_export() {
    let grid = linspace(0.7505, WMAX, 50);
    let analytic = sampled(EntropyQuantity::A00E, &grid, |w| entropy_core::analytic_a_00e(w).unwrap());
    let bytes = export_curve(&analytic, Format::Csv).unwrap();
    let regenerated = import_curve(&bytes, Format::Csv).unwrap();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/a00e_golden.csv");
    let golden = read_curve(std::path::Path::new(path)).unwrap();
    assert_eq!(golden.quantity, EntropyQuantity::A00E);
    for (a, b) in golden.points.iter().zip(&regenerated.points) {
        assert!((a.omega - b.omega).abs() <= 1e-12 && (a.entropy - b.entropy).abs() <= 1e-6);
    }
}

#[test]
fn grid_validation() {
    let u = InputDistribution::uniform();
    let q = EntropyQuantity::A00E;
    assert!(build_g_curve(q, &linspace(0.76, 0.85, 7), &u, &cfg(5)).is_err());
    let mut g = linspace(0.76, 0.85, 10);
    g.swap(2, 3);
    assert!(build_g_curve(q, &g, &u, &cfg(5)).is_err());
    assert!(build_g_curve(q, &linspace(0.75, 0.85, 10), &u, &cfg(5)).is_err());
    assert!(build_g_curve(q, &linspace(0.76, 0.86, 10), &u, &cfg(5)).is_err());
    let d = default_grid();
    assert_eq!(d.len(), 60);
    assert!(d.windows(2).all(|w| w[1] > w[0]) && d[0] > 0.75 && d[59] == entropy_core::OMEGA_MAX);
}

#[test]
fn envelope_of_lemma_curves() {
    let grid = default_grid();
    let want1 = oracle_tangent(oracle_g1);
    assert!((want1 - 0.84403).abs() < 5e-4, "oracle ω* {want1}");
    let env = convex_envelope_report(&sampled(EntropyQuantity::ABXYE, &grid, oracle_g1)).unwrap();
    let t = env.curve.tangent.unwrap();
    assert!((t.omega_star - want1).abs() < 2e-4, "{} vs {want1}", t.omega_star);
    assert!((t.slope * (t.omega_star - 0.75) - 1.4186).abs() < 1e-3);
    assert!(env.warning.is_none());

    let want2 = oracle_tangent(oracle_g2);
    let env = convex_envelope_report(&sampled(EntropyQuantity::AXYE, &grid, oracle_g2)).unwrap();
    let t = env.curve.tangent.unwrap();
    assert!((t.omega_star - want2).abs() < 2e-4 && (want2 - 0.84698).abs() < 5e-4);
    assert!((t.slope * (t.omega_star - 0.75) - 0.92394).abs() < 1e-3);

    let f = &env.curve;
    assert_eq!(f.kind, CurveKind::F);
    assert!(f.min_second_difference() >= -1e-7);
    for p in &f.points {
        assert!(p.entropy <= oracle_g2(p.omega) + 1e-9);
        if p.omega < t.omega_star {
            assert!(p.argmin.is_none());
        }
    }
}

#[test]
fn convex_curve_has_no_tangent() {
    let env = convex_envelope_report(&sampled(EntropyQuantity::A00E, &default_grid(), oracle_a00e)).unwrap();
    assert!(env.roots.is_empty() && env.curve.tangent.is_none());
    let g = sampled(EntropyQuantity::A00E, &default_grid(), oracle_a00e);
    for (a, b) in env.curve.points.iter().zip(&g.points) {
        assert_eq!(a.entropy, b.entropy);
    }
}

#[test]
fn multiple_roots_pick_largest_and_warn() {
    // Two concave-to-convex transitions.
    let bumpy = |w: f64| {
        let x = (w - 0.75) / (WMAX - 0.75);
        let s = |z: f64| 1.0 / (1.0 + (-z).exp());
        x.sqrt() * 0.2 + 2.0 * s((x - 0.45) * 40.0) + 3.0 * s((x - 0.85) * 40.0)
    };
    let grid = linspace(0.7502, WMAX, 400);
    let env = convex_envelope_report(&sampled(EntropyQuantity::AE, &grid, bumpy)).unwrap();
    assert!(env.roots.len() >= 2, "{:?}", env.roots);
    assert!(env.warning.is_some());
    // The hull through the largest root's tangent point may touch earlier;
    // the touching point is one of the roots and the disagreement is flagged.
    let t = env.curve.tangent.unwrap();
    assert!(env.roots.iter().any(|r| (r - t.omega_star).abs() < 1e-3), "{t:?} {:?}", env.roots);
    assert!(env.warning.as_ref().unwrap().contains("differs"));
    assert!(env.curve.min_second_difference() >= -1e-7);
    for f in &env.curve.points {
        assert!(f.entropy <= bumpy(f.omega) + 1e-6);
    }
}

#[test]
fn envelope_requires_g_curve() {
    let mut c = sampled(EntropyQuantity::AE, &default_grid(), oracle_g2);
    c.kind = CurveKind::F;
    assert!(convex_envelope(&c).is_err());
}

#[test]
fn export_round_trips() {
    let u = InputDistribution::uniform();
    let grid = linspace(0.78, 0.85, 8);
    let g = build_g_curve(EntropyQuantity::ABXYE, &grid, &u, &cfg(20)).unwrap();
    let f = convex_envelope(&g).unwrap();
    for curve in [&g, &f] {
        for fmt in [Format::Csv, Format::Json] {
            let bytes = export_curve(curve, fmt).unwrap();
            assert_eq!(&import_curve(&bytes, fmt).unwrap(), curve, "{fmt:?}");
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    write_curve(&f, &path).unwrap();
    assert_eq!(read_curve(&path).unwrap(), f);
    assert!(write_curve(&f, &dir.path().join("f.txt")).is_err());

    let empty = RateCurve { points: vec![], ..g.clone() };
    assert!(export_curve(&empty, Format::Csv).is_err());
    assert!(import_curve(b"# quantity=A_E\nomega,entropy\n", Format::Csv).is_err());
    assert!(import_curve(b"{}", Format::Json).is_err());
}

#[test]
fn warm_started_curves_are_deterministic() {
    let u = InputDistribution::uniform();
    let grid = linspace(0.79, 0.85, 8);
    let a = build_g_curve(EntropyQuantity::AE, &grid, &u, &cfg(16)).unwrap();
    let b = build_g_curve(EntropyQuantity::AE, &grid, &u, &cfg(16)).unwrap();
    assert_eq!(a, b);
    let other = OptimizerConfig { seed: 7, ..cfg(16) };
    let c = build_g_curve(EntropyQuantity::AE, &grid, &u, &other).unwrap();
    assert!(a.points.iter().zip(&c.points).all(|(x, y)| (x.entropy - y.entropy).abs() < 1e-4));
}

#[test]
fn interpolant_reproduces_points() {
    let curve = sampled(EntropyQuantity::AXYE, &default_grid(), oracle_g2);
    let p = curve.interpolant().unwrap();
    assert_eq!(p.eval(0.75), 0.0);
    for pt in &curve.points {
        assert!((p.eval(pt.omega) - pt.entropy).abs() < 1e-15);
    }
    // Between knots the cubic tracks the smooth curve closely.
    for k in 0..100 {
        let w = 0.76 + 0.0009 * k as f64;
        assert!((p.eval(w) - oracle_g2(w)).abs() < 2e-3, "ω={w}");
    }
}
