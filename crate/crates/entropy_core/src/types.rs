use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{EntropyError, Result};

/// Slack allowed on the closed parameter region before a value is rejected.
pub const REGION_SLACK: f64 = 1e-12;

/// Bell-diagonal state parameters `(R, θ, δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    #[serde(rename = "R")]
    pub r: f64,
    pub theta: f64,
    pub delta: f64,
}

impl BellDiagonalParams {
    pub fn new(r: f64, theta: f64, delta: f64) -> Result<Self> {
        let p = BellDiagonalParams { r, theta, delta };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `δ = δ*(R, θ)`.
    pub fn with_delta_star(r: f64, theta: f64) -> Result<Self> {
        Self::new(r, theta, crate::delta_star(r, theta))
    }

    /// Largest admissible θ for a given R.
    pub fn theta_max(r: f64) -> f64 {
        if r <= FRAC_1_SQRT_2 {
            FRAC_PI_4
        } else {
            (FRAC_PI_4 - (1.0 / (r * 2f64.sqrt())).min(1.0).acos()).max(0.0)
        }
    }

    /// Admissible δ interval `[−¼ + R cosθ/2, ¼ − R sinθ/2]`.
    pub fn delta_range(r: f64, theta: f64) -> (f64, f64) {
        (-0.25 + r * theta.cos() / 2.0, 0.25 - r * theta.sin() / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let BellDiagonalParams { r, theta, delta } = *self;
        if !(r.is_finite() && theta.is_finite() && delta.is_finite()) {
            return Err(EntropyError::Domain(format!("non-finite state parameters {self:?}")));
        }
        if !(-REGION_SLACK..=1.0 + REGION_SLACK).contains(&r) {
            return Err(EntropyError::Domain(format!("R = {r} outside [0,1]")));
        }
        if theta < -REGION_SLACK || theta > Self::theta_max(r) + 1e-9 {
            return Err(EntropyError::Domain(format!("θ = {theta} outside [0, {}] for R = {r}", Self::theta_max(r))));
        }
        let (lo, hi) = Self::delta_range(r, theta);
        if delta < lo - 1e-9 || delta > hi + 1e-9 {
            return Err(EntropyError::Domain(format!("δ = {delta} outside [{lo}, {hi}] for R = {r}, θ = {theta}")));
        }
        Ok(())
    }
}

/// The four Bell-basis weights λ0..λ3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellSpectrum {
    pub lambda: [f64; 4],
}

impl BellSpectrum {
    /// Shannon entropy of the spectrum in bits.
    pub fn entropy(&self) -> f64 {
        crate::formulas::spectrum_entropy_g(&self.lambda)
    }

    /// Membership in the ordered set: λ0 ≥ λ3, λ1 ≥ λ2, λ0−λ3 ≥ λ1−λ2.
    pub fn is_ordered(&self, tol: f64) -> bool {
        let [l0, l1, l2, l3] = self.lambda;
        l0 + tol >= l3 && l1 + tol >= l2 && (l0 - l3) + tol >= l1 - l2
    }
}

/// Projector angles α_{0|x}, β_{0|y}; outcome 1 is rotated by π/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta0: f64,
    pub beta1: f64,
}

impl MeasurementAngles {
    /// Angles reduced into `[0, π)`.
    pub fn new(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64) -> Self {
        let m = |a: f64| {
            let r = a.rem_euclid(PI);
            if r >= PI {
                0.0
            } else {
                r
            }
        };
        MeasurementAngles { alpha0: m(alpha0), alpha1: m(alpha1), beta0: m(beta0), beta1: m(beta1) }
    }

    /// The angles that saturate the score bound for a given θ.
    pub fn chsh_optimal(theta: f64) -> Self {
        Self::new(0.0, FRAC_PI_4, PI / 8.0 - theta / 2.0, -PI / 8.0 + theta / 2.0)
    }

    pub fn alpha(&self, x: usize) -> f64 {
        if x == 0 {
            self.alpha0
        } else {
            self.alpha1
        }
    }

    pub fn beta(&self, y: usize) -> f64 {
        if y == 0 {
            self.beta0
        } else {
            self.beta1
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha0, self.alpha1, self.beta0, self.beta1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitStrategy {
    pub state: BellDiagonalParams,
    pub angles: MeasurementAngles,
}

impl QubitStrategy {
    pub fn new(state: BellDiagonalParams, angles: MeasurementAngles) -> Result<Self> {
        state.validate()?;
        Ok(QubitStrategy { state, angles })
    }
}

/// Input distribution `p_XY(x, y)`, indexed `p[x][y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution {
    pub p: [[f64; 2]; 2],
}

impl InputDistribution {
    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        let sum: f64 = p.iter().flatten().sum();
        if p.iter().flatten().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(EntropyError::Domain(format!("invalid input distribution {p:?}")));
        }
        Ok(InputDistribution { p })
    }

    pub fn uniform() -> Self {
        InputDistribution { p: [[0.25; 2]; 2] }
    }

    /// Independent inputs with `P(X=1) = zeta_a`, `P(Y=1) = zeta_b`.
    pub fn product(zeta_a: f64, zeta_b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta_a) || !(0.0..=1.0).contains(&zeta_b) {
            return Err(EntropyError::Domain(format!("biases ({zeta_a}, {zeta_b}) outside [0,1]")));
        }
        let px = [1.0 - zeta_a, zeta_a];
        let py = [1.0 - zeta_b, zeta_b];
        Ok(InputDistribution { p: [[px[0] * py[0], px[0] * py[1]], [px[1] * py[0], px[1] * py[1]]] })
    }

    pub fn px(&self, x: usize) -> f64 {
        self.p[x][0] + self.p[x][1]
    }

    pub fn py(&self, y: usize) -> f64 {
        self.p[0][y] + self.p[1][y]
    }
}

impl Default for InputDistribution {
    fn default() -> Self {
        Self::uniform()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntropyQuantity {
    #[serde(rename = "AB_00E")]
    AB00E,
    #[serde(rename = "AB_XYE")]
    ABXYE,
    #[serde(rename = "AB_E")]
    ABE,
    #[serde(rename = "A_00E")]
    A00E,
    #[serde(rename = "A_XYE")]
    AXYE,
    #[serde(rename = "A_E")]
    AE,
}

impl EntropyQuantity {
    pub const ALL: [EntropyQuantity; 6] = [
        EntropyQuantity::AB00E,
        EntropyQuantity::ABXYE,
        EntropyQuantity::ABE,
        EntropyQuantity::A00E,
        EntropyQuantity::AXYE,
        EntropyQuantity::AE,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            EntropyQuantity::AB00E => "AB_00E",
            EntropyQuantity::ABXYE => "AB_XYE",
            EntropyQuantity::ABE => "AB_E",
            EntropyQuantity::A00E => "A_00E",
            EntropyQuantity::AXYE => "A_XYE",
            EntropyQuantity::AE => "A_E",
        }
    }

    /// Whether δ enters only through H(λ), so it can be fixed at δ*.
    pub fn delta_independent(&self) -> bool {
        !matches!(self, EntropyQuantity::ABE | EntropyQuantity::AE)
    }

    /// Whether the value depends on the input distribution.
    pub fn uses_pxy(&self) -> bool {
        !matches!(self, EntropyQuantity::AB00E | EntropyQuantity::A00E)
    }

    pub fn two_sided(&self) -> bool {
        matches!(self, EntropyQuantity::AB00E | EntropyQuantity::ABXYE | EntropyQuantity::ABE)
    }
}

impl fmt::Display for EntropyQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EntropyQuantity {
    type Err = EntropyError;
    fn from_str(s: &str) -> Result<Self> {
        EntropyQuantity::ALL
            .into_iter()
            .find(|q| q.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| EntropyError::Domain(format!("unknown entropy quantity {s:?}")))
    }
}
