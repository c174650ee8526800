use std::f64::consts::{FRAC_PI_4, PI};

use entropy_core::{BellDiagonalParams, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::explicit::{brute_force_entropy, brute_force_score};

/// Coordinates `[θ, α0, α1, β0, β1]`; R is solved from the score.
type Coords = [f64; 5];

fn strategy(r: f64, theta: f64, p: &Coords) -> QubitStrategy {
    // δ maximising H(λ) at fixed (R, θ); recomputed here from the product
    // form λ = p⊗q.
    let delta = r * r * (2.0 * theta).cos() / 4.0;
    QubitStrategy { state: BellDiagonalParams { r, theta, delta }, angles: MeasurementAngles::new(p[1], p[2], p[3], p[4]) }
}

/// Strategy with score `omega` for `(θ, angles)`, if reachable. The score is
/// affine in R, so its slope is read off one explicit evaluation.
fn at_score(omega: f64, p: &Coords) -> Option<QubitStrategy> {
    let theta = p[0].clamp(0.0, FRAC_PI_4);
    let r_max = 1.0 / (theta.cos() + theta.sin());
    let slope = (brute_force_score(&strategy(0.5 * r_max, theta, p)).ok()? - 0.5) / (0.5 * r_max);
    let r = (omega - 0.5) / slope;
    if slope <= 1e-12 || r > r_max {
        return None;
    }
    Some(strategy(r, theta, p))
}

/// `ω − ½ − R_max·c`: positive while the score is out of reach.
fn deficit(omega: f64, p: &Coords) -> f64 {
    let theta = p[0].clamp(0.0, FRAC_PI_4);
    let r_max = 1.0 / (theta.cos() + theta.sin());
    brute_force_score(&strategy(r_max, theta, p)).map_or(f64::INFINITY, |s| omega - s)
}

fn objective(q: EntropyQuantity, omega: f64, pxy: &InputDistribution, p: &Coords) -> f64 {
    at_score(omega, p).and_then(|s| brute_force_entropy(q, &s, pxy).ok()).unwrap_or(f64::INFINITY)
}

/// Compass search from `p`: steps from 0.1 down to 1e−5, with a doubling
/// line search along each successful direction. Stops early once
/// `f ≤ target`.
fn compass(f: impl Fn(&Coords) -> f64, mut p: Coords, target: f64) -> (f64, Coords) {
    let mut fp = f(&p);
    let mut step = 0.1;
    while step > 1e-5 && fp > target {
        let mut improved = false;
        for i in 0..5 {
            for sign in [1.0, -1.0] {
                let mut h = sign * step;
                loop {
                    let mut t = p;
                    t[i] += h;
                    let ft = f(&t);
                    if ft >= fp {
                        break;
                    }
                    (fp, p) = (ft, t);
                    improved = true;
                    h *= 2.0;
                }
            }
        }
        if !improved {
            step *= 0.25;
        }
    }
    (fp, p)
}

/// Multi-start derivative-free minimum of a δ-independent quantity at fixed
/// score, using only the explicit-state oracle. Each random start is first
/// pushed into the reachable set by maximizing the score.
pub fn brute_force_minimum(
    q: EntropyQuantity,
    omega: f64,
    pxy: &InputDistribution,
    restarts: usize,
    seed: u64,
) -> Option<(f64, QubitStrategy)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Coords)> = None;
    for _ in 0..restarts {
        let p: Coords = std::array::from_fn(|i| rng.gen::<f64>() * if i == 0 { FRAC_PI_4 } else { PI });
        // Slightly past the boundary so the entropy search starts inside.
        let (d, p) = compass(|p| deficit(omega, p), p, -1e-6);
        if d > 0.0 {
            continue;
        }
        let (f, p) = compass(|p| objective(q, omega, pxy, p), p, f64::NEG_INFINITY);
        if best.map_or(true, |(b, _)| f < b) {
            best = Some((f, p));
        }
    }
    let (f, p) = best?;
    Some((f, at_score(omega, &p)?))
}
