use serde::{Deserialize, Serialize};

use crate::{param, RateFunction, Result, S_MAX, S_MIN};

/// Score-register outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Lose,
    Win,
    /// Generation round of the spot-checking protocol.
    NoTest,
    Inputs {
        x: u8,
        y: u8,
        win: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Recycled,
    SpotCheck { gamma: f64 },
    Biased { zeta_a: f64, zeta_b: f64 },
}

/// Affine min-tradeoff function built from the tangent of F at `t`.
///
/// On an achievable distribution with CHSH score `s` it evaluates to
/// `offset + F(t) + F′(t)(s − t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinTradeoff {
    pub shape: Shape,
    pub t: f64,
    pub rate_at_t: f64,
    pub slope: f64,
    /// 2 when the inputs are part of the extracted string.
    pub offset: f64,
    pub values: Vec<(Outcome, f64)>,
    pub max_over_all: f64,
    pub min_over_achievable: f64,
    /// Bhatia–Davis bound on Var_p(f) maximized over the mean.
    pub var_bound: f64,
}

impl MinTradeoff {
    /// Value on achievable distributions of score `s`.
    pub fn at_score(&self, s: f64) -> f64 {
        self.offset + self.rate_at_t + self.slope * (s - self.t)
    }

    /// Variance of f on an achievable distribution with score `s`. Exact for
    /// the binary and spot-checking registers, the Bhatia–Davis bound for
    /// the biased one.
    pub fn variance(&self, s: f64) -> f64 {
        let g = self.slope;
        match self.shape {
            Shape::Recycled => g * g * s * (1.0 - s),
            Shape::SpotCheck { gamma } => {
                let p0 = gamma * (1.0 - s);
                (g / gamma).powi(2) * p0 * (1.0 - p0)
            }
            Shape::Biased { zeta_a, zeta_b } => g * g * s * (0.25 / (zeta_a * zeta_b) - s),
        }
        .max(0.0)
    }

    pub fn d_c(&self) -> f64 {
        match self.shape {
            Shape::Recycled => 16.0,
            _ => 4.0,
        }
    }

    pub fn spread(&self) -> f64 {
        self.max_over_all - self.min_over_achievable
    }
}

fn tangent(t: f64, rate: &RateFunction) -> Result<(f64, f64)> {
    let (lo, hi) = (0.75, S_MAX);
    if !(t > lo && t <= hi + 1e-12) {
        return Err(param(format!("tangent point {t} outside ({lo}, {hi}]")));
    }
    Ok((rate.eval(t), rate.slope(t)))
}

pub fn mintradeoff_recycled(t: f64, rate: &RateFunction) -> Result<MinTradeoff> {
    let (ft, g) = tangent(t, rate)?;
    let at = |s: f64| 2.0 + ft + g * (s - t);
    Ok(MinTradeoff {
        shape: Shape::Recycled,
        t,
        rate_at_t: ft,
        slope: g,
        offset: 2.0,
        values: vec![(Outcome::Lose, at(0.0)), (Outcome::Win, at(1.0))],
        max_over_all: at(1.0),
        min_over_achievable: at(S_MIN),
        var_bound: g * g / 4.0,
    })
}

pub fn mintradeoff_spotcheck(t: f64, gamma: f64, rate: &RateFunction) -> Result<MinTradeoff> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(param(format!("γ = {gamma} not in (0,1]")));
    }
    let (ft, g) = tangent(t, rate)?;
    let g1 = ft + g * (1.0 - t);
    let g0 = ft - g * t;
    let lose = g0 / gamma + (1.0 - 1.0 / gamma) * g1;
    Ok(MinTradeoff {
        shape: Shape::SpotCheck { gamma },
        t,
        rate_at_t: ft,
        slope: g,
        offset: 0.0,
        values: vec![(Outcome::Lose, lose), (Outcome::Win, g1), (Outcome::NoTest, g1)],
        max_over_all: g1,
        min_over_achievable: ft + g * (S_MIN - t),
        var_bound: (g / gamma).powi(2) / 4.0,
    })
}

pub fn mintradeoff_biased(t: f64, zeta_a: f64, zeta_b: f64, rate: &RateFunction) -> Result<MinTradeoff> {
    if !(zeta_a > 0.0 && zeta_a <= 0.5 && zeta_b > 0.0 && zeta_b <= 0.5) {
        return Err(param(format!("ζ = ({zeta_a}, {zeta_b}) not in (0,1/2]")));
    }
    let (ft, g) = tangent(t, rate)?;
    let base = ft - t * g;
    let px = |x: u8| if x == 1 { zeta_a } else { 1.0 - zeta_a };
    let py = |y: u8| if y == 1 { zeta_b } else { 1.0 - zeta_b };
    let mut values = Vec::new();
    for x in 0..2u8 {
        for y in 0..2u8 {
            values.push((Outcome::Inputs { x, y, win: false }, base));
            values.push((Outcome::Inputs { x, y, win: true }, base + g / (4.0 * px(x) * py(y))));
        }
    }
    let zz = zeta_a * zeta_b;
    Ok(MinTradeoff {
        shape: Shape::Biased { zeta_a, zeta_b },
        t,
        rate_at_t: ft,
        slope: g,
        offset: 0.0,
        values,
        max_over_all: g / (4.0 * zz) + base,
        min_over_achievable: ft - g * (t - S_MIN),
        var_bound: biased_var_bound(g, zz),
    })
}

/// `max_{ω∈[0,1]} F′²ω(1/(4ζAζB) − ω)`.
pub(crate) fn biased_var_bound(g: f64, zz: f64) -> f64 {
    if zz < 0.125 {
        g * g * (0.25 / zz - 1.0)
    } else {
        (g / (8.0 * zz)).powi(2)
    }
}
