use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use entropy_core::formulas::score_coefficient_g;
use entropy_core::{chsh_score, entropy, EntropyQuantity, InputDistribution, MeasurementAngles, OMEGA_MAX};

use crate::local::{solve, LocalSettings};
use crate::objective::{box_from_strategy, canonical, strategy_from_box, Point, Problem};
use crate::{CurveError, CurvePoint, Result};

/// Largest admissible |score − ω| for a reported point.
pub const SCORE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 10_000, max_iters: 400, tolerance: 1e-9, seed: 0x5eed_c4a5 }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(restarts: usize) -> Self {
        OptimizerConfig { restarts, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || !(self.tolerance > 0.0) {
            return Err(CurveError::Config(format!("invalid optimizer config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RestartStats {
    pub attempted: usize,
    pub feasible: usize,
    pub converged: usize,
    /// Restarts landing within 1e−6 of the reported minimum.
    pub hits: usize,
    pub best_restart: usize,
    pub evaluations: usize,
}

/// `R = (ω − ½)/c(θ, angles)`.
pub fn solve_r_for_score(theta: f64, angles: &MeasurementAngles, omega: f64) -> Result<f64> {
    if !(0.5 - 1e-12..=OMEGA_MAX + 1e-12).contains(&omega) {
        return Err(CurveError::Domain(format!("score {omega} outside [1/2, {OMEGA_MAX}]")));
    }
    let c = score_coefficient_g(theta, &angles.as_array());
    if c.abs() < 1e-10 {
        return Err(CurveError::Domain("degenerate angles".into()));
    }
    let r = (omega - 0.5) / c;
    if !(-1e-12..=1.0 + 1e-12).contains(&r) {
        return Err(CurveError::Domain(format!("score {omega} unreachable for these angles (R = {r})")));
    }
    Ok(r.clamp(0.0, 1.0))
}

/// Seed for one grid point, mixing the run seed with the problem identity.
fn point_seed(seed: u64, q: EntropyQuantity, omega: f64) -> u64 {
    let mut z = seed ^ (q as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ omega.to_bits().rotate_left(17);
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Start point for restart `index`: uniform (θ, u_δ, angles), with u_R set to
/// meet the score when the angles allow it.
pub fn sample_start(problem: &Problem, seed: u64, index: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, problem.quantity, problem.omega));
    rng.set_stream(index as u64);
    let mut last = [1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0];
    for _ in 0..32 {
        let theta = rng.gen::<f64>() * FRAC_PI_4;
        let ud = if problem.quantity.delta_independent() { 0.5 } else { rng.gen::<f64>() };
        let a: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>() * PI);
        let c = score_coefficient_g(theta, &a);
        let ur = (problem.omega - 0.5) * (theta.cos() + theta.sin()) / c;
        last = [ur.clamp(0.0, 1.0), theta, ud, a[0], a[1], a[2], a[3]];
        if c > 0.0 && ur <= 1.0 {
            break;
        }
    }
    last
}

struct Candidate {
    x: Point,
    f: f64,
    converged: bool,
    evaluations: usize,
}

fn run_start(problem: &Problem, x0: Point, settings: &LocalSettings) -> Option<Candidate> {
    let r = solve(problem, x0, settings)?;
    (r.residual.abs() <= 1e-9).then_some(Candidate {
        x: canonical(&r.x),
        f: r.f,
        converged: r.converged,
        evaluations: r.evaluations,
    })
}

/// Multi-start minimization of one entropy quantity at fixed score.
///
/// `warm` points are tried before the random restarts and share their index
/// space (warm start `k` has index `k`).
pub fn minimize_with_starts(
    quantity: EntropyQuantity,
    omega: f64,
    pxy: &InputDistribution,
    config: &OptimizerConfig,
    warm: &[Point],
) -> Result<(CurvePoint, RestartStats)> {
    config.validate()?;
    search(quantity, omega, pxy, config, warm, config.restarts)
}

/// Local solves from `warm` only; no random restarts.
pub(crate) fn polish(
    quantity: EntropyQuantity,
    omega: f64,
    pxy: &InputDistribution,
    config: &OptimizerConfig,
    warm: &[Point],
) -> Result<CurvePoint> {
    search(quantity, omega, pxy, config, warm, 0).map(|(p, _)| p)
}

fn search(
    quantity: EntropyQuantity,
    omega: f64,
    pxy: &InputDistribution,
    config: &OptimizerConfig,
    warm: &[Point],
    restarts: usize,
) -> Result<(CurvePoint, RestartStats)> {
    if !(omega > 0.75 && omega <= OMEGA_MAX + 1e-12) {
        return Err(CurveError::Domain(format!("score {omega} outside (3/4, {OMEGA_MAX}]")));
    }
    let problem = Problem { quantity, omega: omega.min(OMEGA_MAX), pxy: *pxy };
    let settings = LocalSettings { max_iters: config.max_iters, tolerance: config.tolerance };
    let total = warm.len() + restarts;
    let results: Vec<Option<Candidate>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let x0 = if i < warm.len() { warm[i] } else { sample_start(&problem, config.seed, i - warm.len()) };
            run_start(&problem, x0, &settings)
        })
        .collect();

    let mut stats = RestartStats { attempted: total, ..Default::default() };
    let mut best: Option<(usize, &Candidate)> = None;
    for (i, c) in results.iter().enumerate() {
        let Some(c) = c else { continue };
        stats.feasible += 1;
        stats.converged += c.converged as usize;
        stats.evaluations += c.evaluations;
        if best.map_or(true, |(_, b)| c.f < b.f) {
            best = Some((i, c));
        }
    }
    let Some((bi, b)) = best else {
        return Err(CurveError::Infeasible { omega });
    };
    stats.best_restart = bi;
    stats.hits = results.iter().flatten().filter(|c| c.f - b.f <= 1e-6).count();

    let strategy = strategy_from_box(quantity.delta_independent(), &b.x)?;
    let score = chsh_score(&strategy.state, &strategy.angles);
    if (score - omega).abs() > SCORE_TOL {
        return Err(CurveError::Infeasible { omega });
    }
    let h = entropy(quantity, &strategy, pxy)?;
    Ok((CurvePoint { omega, entropy: h, argmin: Some(strategy) }, stats))
}

pub fn minimize_entropy_at_score(
    quantity: EntropyQuantity,
    omega: f64,
    pxy: &InputDistribution,
    config: &OptimizerConfig,
) -> Result<CurvePoint> {
    minimize_with_starts(quantity, omega, pxy, config, &[]).map(|(p, _)| p)
}

/// Box coordinates of a curve point's argmin, for warm starts.
pub fn warm_point(p: &CurvePoint) -> Option<Point> {
    p.argmin.as_ref().map(box_from_strategy)
}
