//! Entropy and score formulas, written once over [`Real`] so the optimizer
//! can obtain exact gradients from the same code that reports values.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::real::Real;
use crate::types::{BellDiagonalParams, BellSpectrum, EntropyQuantity, InputDistribution, MeasurementAngles, QubitStrategy};
use crate::{EntropyError, Result};

/// Tolerance for probabilities fed to [`hbin`].
pub const HBIN_SLACK: f64 = 1e-9;

/// Free parameters of a strategy, in the scalar type of choice.
#[derive(Clone, Copy, Debug)]
pub struct StrategyVars<T> {
    pub r: T,
    pub theta: T,
    pub delta: T,
    /// `[α0, α1, β0, β1]`
    pub angles: [T; 4],
}

impl StrategyVars<f64> {
    pub fn from_strategy(s: &QubitStrategy) -> Self {
        StrategyVars { r: s.state.r, theta: s.state.theta, delta: s.state.delta, angles: s.angles.as_array() }
    }
}

fn shift_to_zero<T: Real>(p: T) -> T {
    p - p.val()
}

/// Binary entropy with the 1e−9 clamp applied to the value only.
pub fn hbin_g<T: Real>(p: T) -> Result<T> {
    let v = p.val();
    if !v.is_finite() || v < -HBIN_SLACK || v > 1.0 + HBIN_SLACK {
        return Err(EntropyError::Domain(format!("hbin argument {v} outside [0,1]")));
    }
    let p = if v < 0.0 {
        shift_to_zero(p)
    } else if v > 1.0 {
        shift_to_zero(p) + 1.0
    } else {
        p
    };
    let q = T::cst(1.0) - p;
    Ok(-(p.xlog2x() + q.xlog2x()))
}

pub fn hbin(p: f64) -> Result<f64> {
    hbin_g(p)
}

pub fn spectrum_g<T: Real>(r: T, theta: T, delta: T) -> [T; 4] {
    let rc = r * theta.cos() * 0.5;
    let rs = r * theta.sin() * 0.5;
    [rc + delta + 0.25, rs - delta + 0.25, T::cst(0.25) - rs - delta, T::cst(0.25) - rc + delta]
}

/// Shannon entropy of λ; entries within 1e−12 below zero count as zero.
pub fn spectrum_entropy_g<T: Real>(lambda: &[T; 4]) -> T {
    let mut h = T::cst(0.0);
    for &l in lambda {
        let l = if l.val() < 0.0 { shift_to_zero(l) } else { l };
        h = h - l.xlog2x();
    }
    h
}

/// `δ* = R² cos(2θ)/4` in generic form (no clamping).
pub fn delta_star_g<T: Real>(r: T, theta: T) -> T {
    r * r * (theta * 2.0).cos() * 0.25
}

/// `c(θ, angles)` such that the score is `½ + R·c`.
pub fn score_coefficient_g<T: Real>(theta: T, a: &[T; 4]) -> T {
    let c2 = |x: T| (x * 2.0).cos();
    let [a0, a1, b0, b1] = *a;
    let diff = c2(a0 - b0) + c2(a0 - b1) + c2(a1 - b0) - c2(a1 - b1);
    let sum = c2(a0 + b0) + c2(a0 + b1) + c2(a1 + b0) - c2(a1 + b1);
    (theta.cos() * diff + theta.sin() * sum) * 0.125
}

pub fn score_g<T: Real>(r: T, theta: T, a: &[T; 4]) -> T {
    r * score_coefficient_g(theta, a) + 0.5
}

/// `[ε00, ε01, ε10, ε11]`. For (x,y) ≠ (1,1) each of the outcomes a = b has
/// probability ε_xy; in the (1,1) cell it is a ≠ b that has probability ε11.
pub fn epsilons_g<T: Real>(r: T, theta: T, a: &[T; 4]) -> [T; 4] {
    let c = r * theta.cos();
    let s = r * theta.sin();
    let cell = |al: T, be: T| c * ((al - be) * 2.0).cos() + s * ((al + be) * 2.0).cos();
    let [a0, a1, b0, b1] = *a;
    [(cell(a0, b0) + 1.0) * 0.25, (cell(a0, b1) + 1.0) * 0.25, (cell(a1, b0) + 1.0) * 0.25, (T::cst(1.0) - cell(a1, b1)) * 0.25]
}

/// `⟨φ_α ⊗ φ_β | Φ_i⟩` for the four Bell states.
pub fn bell_overlaps_g<T: Real>(alpha: T, beta: T) -> [T; 4] {
    [
        (beta - alpha).cos() * FRAC_1_SQRT_2,
        (beta + alpha).cos() * FRAC_1_SQRT_2,
        (beta + alpha).sin() * FRAC_1_SQRT_2,
        (beta - alpha).sin() * FRAC_1_SQRT_2,
    ]
}

/// Unnormalized Eve state ζ^{abxy}.
pub fn zeta_g<T: Real>(sqrt_lambda: &[T; 4], a: &[T; 4], x: usize, y: usize, oa: usize, ob: usize) -> [T; 4] {
    let alpha = a[x] + FRAC_PI_2 * oa as f64;
    let beta = a[2 + y] + FRAC_PI_2 * ob as f64;
    let ov = bell_overlaps_g(alpha, beta);
    [ov[0] * sqrt_lambda[0], ov[1] * sqrt_lambda[1], ov[2] * sqrt_lambda[2], ov[3] * sqrt_lambda[3]]
}

fn clamped_sqrt<T: Real>(l: T) -> T {
    if l.val() <= 0.0 {
        T::cst(0.0)
    } else {
        l.sqrt()
    }
}

/// Gram matrix `√(w_k w_l)·⟨ζ_k, ζ_l⟩` of the Eve vectors selected by
/// `(x, y, a, b, w)`. It shares its nonzero spectrum with `Σ w_k ζ_k ζ_kᵀ`
/// but is linear in λ, so no square roots of vanishing eigenvalues appear.
fn gram<T: Real>(lambda: &[T; 4], a: &[T; 4], cols: &[(usize, usize, usize, usize, f64); 4]) -> [[T; 4]; 4] {
    let ovs = cols.map(|(x, y, oa, ob, _)| bell_overlaps_g(a[x] + FRAC_PI_2 * oa as f64, a[2 + y] + FRAC_PI_2 * ob as f64));
    let mut m = [[T::cst(0.0); 4]; 4];
    for k in 0..4 {
        for l in k..4 {
            let w = (cols[k].4 * cols[l].4).sqrt();
            if w == 0.0 {
                continue;
            }
            let mut dot = T::cst(0.0);
            for i in 0..4 {
                dot = dot + lambda[i] * ovs[k][i] * ovs[l][i];
            }
            m[k][l] = dot * w;
            m[l][k] = m[k][l];
        }
    }
    m
}

/// `g(α) = ½(1 + R√(1 + sin2θ cos4α))`.
fn g_alpha<T: Real>(r: T, theta: T, alpha: T) -> T {
    let inner = (theta * 2.0).sin() * (alpha * 4.0).cos() + 1.0;
    (r * clamped_sqrt(inner) + 1.0) * 0.5
}

/// Conditional entropy in bits for any scalar type.
pub fn entropy_g<T: Real>(q: EntropyQuantity, v: &StrategyVars<T>, pxy: &InputDistribution) -> Result<T> {
    let lambda = spectrum_g(v.r, v.theta, v.delta);
    let h_e = spectrum_entropy_g(&lambda);
    let a = &v.angles;
    let out = match q {
        EntropyQuantity::AB00E => {
            let eps = epsilons_g(v.r, v.theta, a);
            hbin_g(eps[0] * 2.0)? + 1.0 - h_e
        }
        EntropyQuantity::ABXYE => {
            let eps = epsilons_g(v.r, v.theta, a);
            let mut acc = T::cst(1.0);
            for (k, e) in eps.iter().enumerate() {
                let w = pxy.p[k / 2][k % 2];
                if w > 0.0 {
                    acc = acc + hbin_g(*e * 2.0)? * w;
                }
            }
            acc - h_e
        }
        EntropyQuantity::A00E => hbin_g(g_alpha(v.r, v.theta, a[0]))? + 1.0 - h_e,
        EntropyQuantity::AXYE => {
            let mut acc = T::cst(1.0);
            for x in 0..2 {
                let w = pxy.px(x);
                if w > 0.0 {
                    acc = acc + hbin_g(g_alpha(v.r, v.theta, a[x]))? * w;
                }
            }
            acc - h_e
        }
        EntropyQuantity::ABE => {
            let eps = epsilons_g(v.r, v.theta, a);
            // p_AB(0,0) = p_AB(1,1); the (1,1) cell contributes ½ − ε11.
            let mut same = T::cst(0.0);
            for (k, e) in eps.iter().enumerate() {
                let w = pxy.p[k / 2][k % 2];
                let cell = if k == 3 { T::cst(0.5) - *e } else { *e };
                same = same + cell * w;
            }
            let mut acc = hbin_g(same * 2.0)? + 1.0;
            for oa in 0..2 {
                for ob in 0..2 {
                    let cols: [(usize, usize, usize, usize, f64); 4] =
                        [0, 1, 2, 3].map(|k| (k / 2, k % 2, oa, ob, pxy.p[k / 2][k % 2]));
                    let m = gram(&lambda, a, &cols);
                    let p_ab = m[0][0] + m[1][1] + m[2][2] + m[3][3];
                    if p_ab.val() > 1e-300 {
                        let normed = m.map(|row| row.map(|e| e / p_ab));
                        acc = acc + T::sym4_entropy(&normed) * p_ab;
                    }
                }
            }
            acc - h_e
        }
        EntropyQuantity::AE => {
            // Summing over b removes the dependence on y, so σ^a is spanned
            // by the four vectors (x, b) at y = 0 with weight 2·p_x.
            let mut acc = T::cst(1.0);
            for oa in 0..2 {
                let cols: [(usize, usize, usize, usize, f64); 4] =
                    [0, 1, 2, 3].map(|k| (k / 2, 0, oa, k % 2, 2.0 * pxy.px(k / 2)));
                acc = acc + T::sym4_entropy(&gram(&lambda, a, &cols)) * 0.5;
            }
            acc - h_e
        }
    };
    if !out.val().is_finite() {
        return Err(EntropyError::Numeric { tag: q });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// f64 entry points
// ---------------------------------------------------------------------------

pub fn bell_spectrum(params: &BellDiagonalParams) -> Result<BellSpectrum> {
    params.validate()?;
    let raw = spectrum_g(params.r, params.theta, params.delta);
    let mut lambda = [0.0; 4];
    for (dst, &l) in lambda.iter_mut().zip(raw.iter()) {
        if l < -1e-12 {
            return Err(EntropyError::Domain(format!("negative Bell weight {l} for {params:?}")));
        }
        *dst = l.max(0.0);
    }
    Ok(BellSpectrum { lambda })
}

/// `δ* = R² cos(2θ)/4`, clamped into the admissible δ interval.
pub fn delta_star(r: f64, theta: f64) -> f64 {
    let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
    let d = delta_star_g(r, theta);
    if lo <= hi {
        d.clamp(lo, hi)
    } else {
        d
    }
}

pub fn epsilon_table(params: &BellDiagonalParams, angles: &MeasurementAngles) -> [f64; 4] {
    epsilons_g(params.r, params.theta, &angles.as_array())
}

pub fn chsh_score(params: &BellDiagonalParams, angles: &MeasurementAngles) -> f64 {
    score_g(params.r, params.theta, &angles.as_array())
}

/// Upper bound `½ + R/(2√2)` on the score at a given R.
pub fn score_bound(r: f64) -> f64 {
    0.5 + r / (2.0 * 2f64.sqrt())
}

/// `(p_AB|xy(a,b), ζ^{abxy})`.
pub fn eve_post_measurement_state(strategy: &QubitStrategy, x: usize, y: usize, a: usize, b: usize) -> Result<(f64, [f64; 4])> {
    if x > 1 || y > 1 || a > 1 || b > 1 {
        return Err(EntropyError::Domain(format!("labels ({a},{b},{x},{y}) must be bits")));
    }
    let bell = bell_spectrum(&strategy.state)?;
    let sl = bell.lambda.map(f64::sqrt);
    let z = zeta_g(&sl, &strategy.angles.as_array(), x, y, a, b);
    Ok((z.iter().map(|c| c * c).sum(), z))
}

pub fn entropy(q: EntropyQuantity, strategy: &QubitStrategy, pxy: &InputDistribution) -> Result<f64> {
    strategy.state.validate()?;
    let v = StrategyVars::from_strategy(strategy);
    let h = entropy_g(q, &v, pxy)?;
    if h < -1e-9 {
        return Err(EntropyError::Numeric { tag: q });
    }
    Ok(h)
}
