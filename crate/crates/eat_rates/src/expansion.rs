use serde::{Deserialize, Serialize};

use crate::eat::bound_with_profile;
use crate::{
    completeness_error_with, delta_for_completeness, golden_max, input_randomness, mintradeoff_biased, mintradeoff_recycled,
    mintradeoff_spotcheck, param, CompletenessModel, ErrorBudget, MinTradeoff, Profile, ProtocolSpec, RateFunction, Result,
    Variant,
};

/// Largest round count the crossover search probes.
pub const N_MAX: u64 = 1_000_000_000_000;

const ALPHA_MIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchOptions {
    pub completeness: CompletenessModel,
    /// Optimize γ (spot-check) or ζA = ζB (biased) instead of using the
    /// variant's value.
    pub optimize_mix: bool,
    /// Additive constant of the extractor loss `2·log(1/ε_EXT) + c`.
    pub ext_constant: f64,
    pub t_points: usize,
    pub t_refinements: usize,
    pub alpha_iters: usize,
    pub mix_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            completeness: CompletenessModel::Hoeffding,
            optimize_mix: false,
            ext_constant: 0.0,
            t_points: 33,
            t_refinements: 3,
            alpha_iters: 80,
            mix_iters: 40,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        if self.t_points < 2 || self.alpha_iters == 0 {
            return Err(param("t_points ≥ 2 and alpha_iters ≥ 1 required"));
        }
        if !self.ext_constant.is_finite() {
            return Err(param("ext_constant must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chosen {
    pub alpha: f64,
    pub t: f64,
    /// γ or ζ when the variant has one.
    pub mix: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EatResult {
    /// Protocol with δ fixed by the completeness target.
    pub protocol: ProtocolSpec,
    pub budget: ErrorBudget,
    pub eps_s: f64,
    pub completeness_model: CompletenessModel,
    pub completeness_bound: f64,
    /// The non-abort probability in the EAT statement is replaced by ε_EAT.
    pub p_omega_is_eps_eat: bool,
    /// Per-round rate `f(ω_exp − δ)`.
    pub rate: f64,
    pub hmin_bound: f64,
    pub input_bits: f64,
    pub ext_loss: f64,
    /// `log(4n)` for publishing the output length when inputs are recycled.
    pub length_loss: f64,
    pub output_len: f64,
    pub net_expansion: f64,
    pub chosen: Chosen,
}

impl EatResult {
    /// Output minus input before clamping the output length at zero.
    fn raw_net(&self) -> f64 {
        self.hmin_bound - self.ext_loss - self.length_loss - self.input_bits
    }
}

fn tradeoff(variant: &Variant, t: f64, rate: &RateFunction) -> Result<MinTradeoff> {
    match *variant {
        Variant::RecycledInput => mintradeoff_recycled(t, rate),
        Variant::SpotCheck { gamma } => mintradeoff_spotcheck(t, gamma, rate),
        Variant::BiasedLocal { zeta_a, zeta_b } => mintradeoff_biased(t, zeta_a, zeta_b, rate),
    }
}

/// Best (α, bound) for a fixed tradeoff function.
fn best_alpha(protocol: &ProtocolSpec, budget: &ErrorBudget, mt: &MinTradeoff, profile: &Profile, iters: usize) -> (f64, f64) {
    let f = |u: f64| bound_with_profile(protocol, budget, mt, profile, 1.0 + u.exp());
    let (u, b) = golden_max(f, ALPHA_MIN.ln(), (1.0 - ALPHA_MIN).ln(), iters);
    (1.0 + u.exp(), b)
}

fn fixed_mix(
    variant: Variant,
    omega_exp: f64,
    n: u64,
    budget: &ErrorBudget,
    rate: &RateFunction,
    opts: &SearchOptions,
) -> Result<EatResult> {
    variant.validate()?;
    // An unreachable δ makes the rate negative rather than failing.
    let delta = delta_for_completeness(&variant, omega_exp, n, budget.eps_c, opts.completeness).min(1.0);
    let protocol = ProtocolSpec::new(variant, omega_exp, delta, n)?;

    let eval_t = |t: f64| -> Result<(f64, f64, f64)> {
        let mt = tradeoff(&variant, t, rate)?;
        let profile = Profile::new(&mt, rate);
        let (alpha, b) = best_alpha(&protocol, budget, &mt, &profile, opts.alpha_iters);
        Ok((b, alpha, mt.at_score(omega_exp - delta)))
    };
    let (lo, hi) = rate.t_range();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut step = (hi - lo) / (opts.t_points - 1) as f64;
    let mut candidates: Vec<f64> = (0..opts.t_points).map(|i| lo + step * i as f64).collect();
    for round in 0..=opts.t_refinements {
        for &t in &candidates {
            let (b, alpha, r) = eval_t(t)?;
            if best.map_or(true, |(bb, ..)| b > bb) {
                best = Some((b, t, alpha, r));
            }
        }
        if round == opts.t_refinements {
            break;
        }
        let centre = best.expect("t grid is nonempty").1;
        step /= 5.0;
        candidates = (-5..=5).map(|k| centre + step * k as f64).filter(|t| (lo..=hi).contains(t)).collect();
    }
    let (hmin, t, alpha, r) = best.expect("t grid is nonempty");

    let ext_loss = 2.0 * (1.0 / budget.eps_ext).log2() + opts.ext_constant;
    let length_loss = if variant == Variant::RecycledInput { (4.0 * n as f64).log2() } else { 0.0 };
    let input_bits = input_randomness(&protocol);
    let output_len = (hmin - ext_loss - length_loss).max(0.0);
    Ok(EatResult {
        protocol,
        budget: *budget,
        eps_s: budget.eps_s(),
        completeness_model: opts.completeness,
        completeness_bound: completeness_error_with(&protocol, opts.completeness),
        p_omega_is_eps_eat: true,
        rate: r,
        hmin_bound: hmin,
        input_bits,
        ext_loss,
        length_loss,
        output_len,
        net_expansion: output_len - input_bits,
        chosen: Chosen { alpha, t, mix: variant.mix() },
    })
}

/// Net certified expansion after `n` rounds, maximized over α and the
/// tangent point (and over γ or ζA = ζB when `opts.optimize_mix`).
pub fn net_expansion(
    variant: Variant,
    omega_exp: f64,
    n: u64,
    budget: &ErrorBudget,
    rate: &RateFunction,
    opts: &SearchOptions,
) -> Result<EatResult> {
    opts.validate()?;
    budget.validate()?;
    if n == 0 {
        return Err(param("n must be positive"));
    }
    let given = fixed_mix(variant, omega_exp, n, budget, rate, opts)?;
    let range = match variant {
        Variant::SpotCheck { .. } => (1e-8f64, 1.0f64),
        Variant::BiasedLocal { .. } => (1e-4, 0.5),
        Variant::RecycledInput => return Ok(given),
    };
    if !opts.optimize_mix {
        return Ok(given);
    }
    let score = |u: f64| {
        fixed_mix(variant.with_mix(u.exp()), omega_exp, n, budget, rate, opts).map_or(f64::NEG_INFINITY, |r| r.raw_net())
    };
    let (u, _) = golden_max(score, range.0.ln(), range.1.ln(), opts.mix_iters);
    // Ranked by the reported net first, so the result never reports less
    // than the given mix even where the output length is clamped.
    let key = |r: &EatResult| (r.net_expansion, r.raw_net());
    let mut best = given;
    for v in [u.exp(), range.1] {
        let r = fixed_mix(variant.with_mix(v), omega_exp, n, budget, rate, opts)?;
        if key(&r) > key(&best) {
            best = r;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Crossover {
    /// Smallest n (within a factor 1.01) with positive net expansion.
    Found { n: u64, result: EatResult },
    /// Not positive even at `N_MAX` rounds.
    NoExpansion { at_max: EatResult },
}

pub fn crossover_n(
    variant: Variant,
    omega_exp: f64,
    budget: &ErrorBudget,
    rate: &RateFunction,
    opts: &SearchOptions,
) -> Result<Crossover> {
    let at = |n: u64| net_expansion(variant, omega_exp, n, budget, rate, opts);
    let top = at(N_MAX)?;
    if top.net_expansion <= 0.0 {
        return Ok(Crossover::NoExpansion { at_max: top });
    }
    let first = at(1)?;
    if first.net_expansion > 0.0 {
        return Ok(Crossover::Found { n: 1, result: first });
    }
    let (mut lo, mut hi, mut best) = (1u64, N_MAX, top);
    while hi as f64 > 1.01 * lo as f64 && hi - lo > 1 {
        let mid = ((lo as f64 * hi as f64).sqrt().round() as u64).clamp(lo + 1, hi - 1);
        let r = at(mid)?;
        if r.net_expansion > 0.0 {
            (hi, best) = (mid, r);
        } else {
            lo = mid;
        }
    }
    Ok(Crossover::Found { n: hi, result: best })
}
