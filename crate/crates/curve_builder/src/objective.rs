//! Box parameterization of the strategy family and the objective/constraint
//! pair seen by the local optimizer.
//!
//! Coordinates `x = [u_R, θ, u_δ, α0, α1, β0, β1]` with
//! `R = u_R / (cos θ + sin θ)` and `δ = δ_lo + u_δ (δ_hi − δ_lo)`, so the
//! coupled region constraints become plain bounds `u_R, u_δ ∈ [0,1]`,
//! `θ ∈ [0, π/4]`. For δ-independent quantities `u_δ` is frozen and
//! `δ = δ*(R, θ)`.

use std::f64::consts::{FRAC_PI_4, PI};

use entropy_core::formulas::{delta_star_g, entropy_g, score_g, StrategyVars};
use entropy_core::real::{Dual, Real};
use entropy_core::{delta_star, BellDiagonalParams, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy};

pub const DIM: usize = 7;
pub type Point = [f64; DIM];
pub type Grad = [f64; DIM];

pub const PARAM_NAMES: [&str; DIM] = ["u_R", "theta", "u_delta", "alpha0", "alpha1", "beta0", "beta1"];

/// A fixed-score minimization problem.
#[derive(Clone, Copy, Debug)]
pub struct Problem {
    pub quantity: EntropyQuantity,
    pub omega: f64,
    pub pxy: InputDistribution,
}

/// Objective value, score residual and both gradients at one point.
#[derive(Clone, Copy, Debug)]
pub struct Evaluation {
    pub f: f64,
    pub grad_f: Grad,
    pub h: f64,
    pub grad_h: Grad,
}

impl Problem {
    pub fn lower(&self) -> Point {
        let ud = if self.quantity.delta_independent() { 0.5 } else { 0.0 };
        [0.0, 0.0, ud, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY]
    }

    pub fn upper(&self) -> Point {
        let ud = if self.quantity.delta_independent() { 0.5 } else { 1.0 };
        [1.0, FRAC_PI_4, ud, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY]
    }

    /// Indices that actually move (u_δ is frozen for δ-independent quantities).
    pub fn free_indices(&self) -> Vec<usize> {
        (0..DIM).filter(|&i| !(i == 2 && self.quantity.delta_independent())).collect()
    }

    pub fn vars<T: Real>(&self, x: &[T; DIM]) -> StrategyVars<T> {
        vars_from_box(self.quantity.delta_independent(), x)
    }

    pub fn evaluate(&self, x: &Point) -> Option<Evaluation> {
        let xd: [Dual<DIM>; DIM] = std::array::from_fn(|i| Dual::var(x[i], i));
        let v = self.vars(&xd);
        let f = entropy_g(self.quantity, &v, &self.pxy).ok()?;
        let s = score_g(v.r, v.theta, &v.angles);
        if !f.v.is_finite() || f.d.iter().any(|d| !d.is_finite()) {
            return None;
        }
        Some(Evaluation { f: f.v, grad_f: f.d, h: s.v - self.omega, grad_h: s.d })
    }

    pub fn value(&self, x: &Point) -> Option<f64> {
        entropy_g(self.quantity, &self.vars(x), &self.pxy).ok()
    }

    /// Score residual and its gradient.
    pub fn residual_grad(&self, x: &Point) -> (f64, Grad) {
        let xd: [Dual<DIM>; DIM] = std::array::from_fn(|i| Dual::var(x[i], i));
        let theta = xd[1];
        let r = xd[0] / (theta.cos() + theta.sin());
        let s = score_g(r, theta, &[xd[3], xd[4], xd[5], xd[6]]);
        (s.v - self.omega, s.d)
    }

    pub fn residual(&self, x: &Point) -> f64 {
        let v = self.vars(x);
        score_g(v.r, v.theta, &v.angles) - self.omega
    }
}

pub fn vars_from_box<T: Real>(delta_independent: bool, x: &[T; DIM]) -> StrategyVars<T> {
    let theta = x[1];
    let r = x[0] / (theta.cos() + theta.sin());
    let delta = if delta_independent {
        delta_star_g(r, theta)
    } else {
        let lo = r * theta.cos() * 0.5 - 0.25;
        lo + x[2] * (T::cst(1.0) - x[0]) * 0.5
    };
    StrategyVars { r, theta, delta, angles: [x[3], x[4], x[5], x[6]] }
}

/// Box coordinates of an admissible strategy (inverse of [`vars_from_box`]).
pub fn box_from_strategy(s: &QubitStrategy) -> Point {
    let BellDiagonalParams { r, theta, delta } = s.state;
    let u_r = (r * (theta.cos() + theta.sin())).clamp(0.0, 1.0);
    let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
    let u_d = if hi - lo > 1e-15 { ((delta - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let a = s.angles.as_array();
    [u_r, theta, u_d, a[0], a[1], a[2], a[3]]
}

/// Converts box coordinates into a validated strategy.
pub fn strategy_from_box(delta_independent: bool, x: &Point) -> entropy_core::Result<QubitStrategy> {
    let theta = x[1].clamp(0.0, FRAC_PI_4);
    let u_r = x[0].clamp(0.0, 1.0);
    let r = (u_r / (theta.cos() + theta.sin())).min(1.0);
    let theta = theta.min(BellDiagonalParams::theta_max(r));
    let delta = if delta_independent {
        delta_star(r, theta)
    } else {
        let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
        (lo + x[2].clamp(0.0, 1.0) * (hi - lo).max(0.0)).clamp(lo, hi.max(lo))
    };
    QubitStrategy::new(BellDiagonalParams::new(r, theta, delta)?, MeasurementAngles::new(x[3], x[4], x[5], x[6]))
}

/// Reduces the angle coordinates into `[0, π)`.
pub fn canonical(x: &Point) -> Point {
    let mut y = *x;
    for a in y.iter_mut().skip(3) {
        *a = a.rem_euclid(PI);
    }
    y
}
