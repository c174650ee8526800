use curve_builder::objective::{box_from_strategy, Problem, DIM};
use entropy_core::{bell_spectrum, chsh_score, epsilon_table, EntropyQuantity, InputDistribution, QubitStrategy};

const STEP: f64 = 1e-6;
/// Distance from the box faces and from the non-smooth set below which a
/// point is excluded.
const MARGIN: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GradientCheck {
    /// Largest `|fd − ad| / max(1, |ad|)` over the free coordinates.
    MaxError(f64),
    /// On a face of the parameter box (R = 0, u_R = 1, θ at a bound, ...).
    ExcludedBoundary,
    /// An hbin argument or a Bell eigenvalue is near 0, where the entropy is
    /// not differentiable.
    ExcludedNonSmooth,
}

/// Central differences on the optimizer objective against its forward-mode
/// gradient, in the optimizer's own box coordinates.
pub fn gradient_check(q: EntropyQuantity, s: &QubitStrategy, pxy: &InputDistribution) -> GradientCheck {
    let omega = chsh_score(&s.state, &s.angles);
    let problem = Problem { quantity: q, omega, pxy: *pxy };
    let x = box_from_strategy(s);
    let (lo, hi) = (problem.lower(), problem.upper());
    if s.state.r < MARGIN {
        return GradientCheck::ExcludedBoundary;
    }
    for i in 0..DIM {
        if lo[i] < hi[i] && lo[i].is_finite() && (x[i] - lo[i] < MARGIN || hi[i] - x[i] < MARGIN) {
            return GradientCheck::ExcludedBoundary;
        }
    }
    let mut state = s.state;
    if q.delta_independent() {
        state.delta = entropy_core::delta_star(state.r, state.theta);
    }
    let lambda = match bell_spectrum(&state) {
        Ok(l) => l.lambda,
        Err(_) => return GradientCheck::ExcludedBoundary,
    };
    let eps = epsilon_table(&state, &s.angles);
    if lambda.iter().any(|&l| l < MARGIN) || eps.iter().any(|&e| e < MARGIN || e > 0.5 - MARGIN) {
        return GradientCheck::ExcludedNonSmooth;
    }
    let Some(e) = problem.evaluate(&x) else {
        return GradientCheck::ExcludedNonSmooth;
    };
    let mut worst = 0.0f64;
    for i in problem.free_indices() {
        let (mut xp, mut xm) = (x, x);
        xp[i] += STEP;
        xm[i] -= STEP;
        let (Some(fp), Some(fm)) = (problem.value(&xp), problem.value(&xm)) else {
            return GradientCheck::ExcludedNonSmooth;
        };
        let fd = (fp - fm) / (2.0 * STEP);
        worst = worst.max((fd - e.grad_f[i]).abs() / e.grad_f[i].abs().max(1.0));
    }
    GradientCheck::MaxError(worst)
}
