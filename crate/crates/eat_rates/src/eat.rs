use std::f64::consts::{E, LN_2};

use crate::{param, ErrorBudget, MinTradeoff, ProtocolSpec, RateFunction, Result, Shape, Variant, S_MAX, S_MIN};

/// Uniform points in the achievable score range for the inner infimum.
pub const GRID_POINTS: usize = 2000;

/// `ln2/2·(log(1 + 2d_C²) + √(2 + Var))²`.
pub fn second_order_v(d_c: f64, var: f64) -> f64 {
    LN_2 / 2.0 * ((1.0 + 2.0 * d_c * d_c).log2() + (2.0 + var).sqrt()).powi(2)
}

/// `(α−1)²·K_α(f)` with `spread = Max(f) − Min_Q(f)`, evaluated in logs so
/// that large spreads give `+∞` instead of NaN.
pub fn k_alpha_scaled(d_c: f64, alpha: f64, spread: f64) -> f64 {
    let x = d_c.log2() + spread;
    // ln(2^x + e²)
    let ln_inner = if x * LN_2 > 2.0 { x * LN_2 + (E * E * (-x * LN_2).exp()).ln_1p() } else { (x.exp2() + E * E).ln() };
    let ln_k = -(6.0 * (2.0 - alpha).powi(3) * LN_2).ln() + (alpha - 1.0) * x * LN_2 + 3.0 * ln_inner.ln();
    (2.0 * (alpha - 1.0).ln() + ln_k).exp()
}

/// `log(1/(ε_EAT(1 − √(1 − ε_h²))))`, without cancellation for small ε_h.
pub fn smoothing_log_term(budget: &ErrorBudget) -> f64 {
    let e = budget.eps_h;
    let one_minus = e * e / (1.0 + (1.0 - e * e).sqrt());
    -(budget.eps_eat.log2() + one_minus.log2())
}

/// Δ(f,p) and Var_p(f) tabulated over achievable scores for one tradeoff
/// function, so the α search only scans arrays.
#[derive(Clone, Debug)]
pub struct Profile {
    pub scores: Vec<f64>,
    pub gap: Vec<f64>,
    pub var: Vec<f64>,
    /// V(f,p) at each score.
    v: Vec<f64>,
    /// Smallest Δ before clamping at zero.
    pub min_raw_gap: f64,
    pub d_c: f64,
    pub spread: f64,
}

impl Profile {
    pub fn new(mt: &MinTradeoff, rate: &RateFunction) -> Self {
        let mut scores: Vec<f64> =
            (0..GRID_POINTS).map(|i| S_MIN + (S_MAX - S_MIN) * i as f64 / (GRID_POINTS - 1) as f64).collect();
        // Endpoint refinement, curve knots and the tangent point.
        for k in 1..=12 {
            let h = (S_MAX - S_MIN) * 10f64.powi(-k) / 2.0;
            scores.push(S_MIN + h);
            scores.push(S_MAX - h);
        }
        scores.extend(rate.knots().iter().copied().filter(|s| (S_MIN..=S_MAX).contains(s)));
        scores.push(mt.t);
        scores.sort_by(f64::total_cmp);
        scores.dedup();
        let mut min_raw_gap = f64::INFINITY;
        let gap = scores
            .iter()
            .map(|&s| {
                let d = rate.eval(s) - (mt.rate_at_t + mt.slope * (s - mt.t));
                min_raw_gap = min_raw_gap.min(d);
                d.max(0.0)
            })
            .collect();
        let var: Vec<f64> = scores.iter().map(|&s| mt.variance(s)).collect();
        let v = var.iter().map(|&x| second_order_v(mt.d_c(), x)).collect();
        Profile { scores, gap, var, v, min_raw_gap, d_c: mt.d_c(), spread: mt.spread() }
    }

    /// `inf_p [Δ − (α−1)V − (α−1)²K_α]`.
    pub fn correction(&self, alpha: f64) -> f64 {
        let a1 = alpha - 1.0;
        let worst = self.gap.iter().zip(&self.v).map(|(&g, &v)| g - a1 * v).fold(f64::INFINITY, f64::min);
        worst - k_alpha_scaled(self.d_c, alpha, self.spread)
    }
}

fn check_shape(variant: &Variant, mt: &MinTradeoff) -> Result<()> {
    let ok = match (variant, mt.shape) {
        (Variant::RecycledInput, Shape::Recycled) => true,
        (Variant::SpotCheck { gamma }, Shape::SpotCheck { gamma: g }) => *gamma == g,
        (Variant::BiasedLocal { zeta_a, zeta_b }, Shape::Biased { zeta_a: a, zeta_b: b }) => *zeta_a == a && *zeta_b == b,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(param(format!("tradeoff function {:?} does not belong to {:?}", mt.shape, variant)))
    }
}

/// Lower bound on the smooth min-entropy of the accepted transcript, with
/// the non-abort probability replaced by ε_EAT.
pub fn eat_bound(
    protocol: &ProtocolSpec,
    budget: &ErrorBudget,
    mt: &MinTradeoff,
    rate: &RateFunction,
    alpha: f64,
) -> Result<f64> {
    protocol.validate()?;
    budget.validate()?;
    check_shape(&protocol.variant, mt)?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(param(format!("α = {alpha} not in (1,2)")));
    }
    Ok(bound_with_profile(protocol, budget, mt, &Profile::new(mt, rate), alpha))
}

pub(crate) fn bound_with_profile(
    protocol: &ProtocolSpec,
    budget: &ErrorBudget,
    mt: &MinTradeoff,
    profile: &Profile,
    alpha: f64,
) -> f64 {
    let n = protocol.n as f64;
    let r = mt.at_score(protocol.omega_exp - protocol.delta_conf);
    n * r - alpha / (alpha - 1.0) * smoothing_log_term(budget) + n * profile.correction(alpha)
}
