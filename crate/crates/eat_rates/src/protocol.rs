use entropy_core::{hbin, OMEGA_CLASSICAL, OMEGA_MAX};
use serde::{Deserialize, Serialize};

use crate::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Variant {
    /// Central test selection with probability γ, fixed inputs otherwise.
    SpotCheck { gamma: f64 },
    /// Independent local inputs with `P(X=1) = ζA`, `P(Y=1) = ζB`.
    BiasedLocal { zeta_a: f64, zeta_b: f64 },
    /// Uniform inputs that are fed to the extractor with the outputs.
    RecycledInput,
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::SpotCheck { gamma } if !(gamma > 0.0 && gamma <= 1.0) => Err(param(format!("γ = {gamma} not in (0,1]"))),
            Variant::BiasedLocal { zeta_a, zeta_b } if !(zeta_a > 0.0 && zeta_a <= 0.5 && zeta_b > 0.0 && zeta_b <= 0.5) => {
                Err(param(format!("ζ = ({zeta_a}, {zeta_b}) not in (0,1/2]")))
            }
            _ => Ok(()),
        }
    }

    /// Dimension of the register the entropy is accumulated on.
    pub fn d_c(&self) -> f64 {
        match self {
            Variant::RecycledInput => 16.0,
            _ => 4.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::SpotCheck { .. } => "spot_check",
            Variant::BiasedLocal { .. } => "biased_local",
            Variant::RecycledInput => "recycled_input",
        }
    }

    /// γ or ζA, whichever the variant has.
    pub fn mix(&self) -> Option<f64> {
        match *self {
            Variant::SpotCheck { gamma } => Some(gamma),
            Variant::BiasedLocal { zeta_a, .. } => Some(zeta_a),
            Variant::RecycledInput => None,
        }
    }

    /// Same variant with γ, or ζA = ζB, replaced.
    pub fn with_mix(&self, v: f64) -> Variant {
        match self {
            Variant::SpotCheck { .. } => Variant::SpotCheck { gamma: v },
            Variant::BiasedLocal { .. } => Variant::BiasedLocal { zeta_a: v, zeta_b: v },
            Variant::RecycledInput => Variant::RecycledInput,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub variant: Variant,
    pub omega_exp: f64,
    pub delta_conf: f64,
    pub n: u64,
}

impl ProtocolSpec {
    pub fn new(variant: Variant, omega_exp: f64, delta_conf: f64, n: u64) -> Result<Self> {
        let p = ProtocolSpec { variant, omega_exp, delta_conf, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.variant.validate()?;
        if !(self.omega_exp > OMEGA_CLASSICAL && self.omega_exp <= OMEGA_MAX) {
            return Err(param(format!("ω_exp = {} not in (3/4, {OMEGA_MAX}]", self.omega_exp)));
        }
        if !(self.delta_conf > 0.0 && self.delta_conf.is_finite()) {
            return Err(param(format!("δ = {} must be positive", self.delta_conf)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorBudget {
    pub eps_h: f64,
    pub eps_eat: f64,
    pub eps_ext: f64,
    pub eps_c: f64,
}

impl ErrorBudget {
    pub fn new(eps_h: f64, eps_eat: f64, eps_ext: f64, eps_c: f64) -> Result<Self> {
        let b = ErrorBudget { eps_h, eps_eat, eps_ext, eps_c };
        b.validate()?;
        Ok(b)
    }

    /// Splits a soundness target as ε_EAT = ε_S and ε_h = ε_EXT = ε_S/3.
    pub fn from_soundness(eps_s: f64, eps_c: f64) -> Result<Self> {
        Self::new(eps_s / 3.0, eps_s, eps_s / 3.0, eps_c)
    }

    pub fn eps_s(&self) -> f64 {
        self.eps_eat.max(2.0 * self.eps_h + self.eps_ext)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_h", self.eps_h), ("eps_eat", self.eps_eat), ("eps_ext", self.eps_ext), ("eps_c", self.eps_c)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(param(format!("{name} = {v} not in (0,1)")));
            }
        }
        if self.eps_s() >= 1.0 {
            return Err(param(format!("soundness error {} is not below 1", self.eps_s())));
        }
        Ok(())
    }
}

/// Tail bound used to relate δ to the completeness error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletenessModel {
    /// `exp(−2t²/(n(b−a)²))`.
    #[default]
    Hoeffding,
    /// Chernoff–Hoeffding `exp(−n·D(μ ± t ‖ μ))` for `[0,1]`-valued rounds.
    RelativeEntropy,
}

/// Per-round abort statistic rescaled to `[0,1]`: its mean, the deviation
/// that corresponds to δ, and whether aborting is an upper-tail event.
fn abort_statistic(variant: &Variant, omega_exp: f64) -> (f64, f64, bool) {
    match *variant {
        // 1 − W
        Variant::RecycledInput => (1.0 - omega_exp, 1.0, true),
        // T(1 − W)
        Variant::SpotCheck { gamma } => (gamma * (1.0 - omega_exp), gamma, true),
        // 4ζAζB·n·J, a lower-tail event.
        Variant::BiasedLocal { zeta_a, zeta_b } => {
            let z = 4.0 * zeta_a * zeta_b;
            (z * omega_exp, z, false)
        }
    }
}

/// Binary relative entropy in nats.
fn kl(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 { 0.0 } else { a * (a / b).ln() };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

/// Honest abort probability bound for the protocol's δ (Hoeffding).
pub fn completeness_error(protocol: &ProtocolSpec) -> f64 {
    completeness_error_with(protocol, CompletenessModel::Hoeffding)
}

pub fn completeness_error_with(protocol: &ProtocolSpec, model: CompletenessModel) -> f64 {
    let n = protocol.n as f64;
    if protocol.n == 0 {
        return 1.0;
    }
    let (mu, scale, upper) = abort_statistic(&protocol.variant, protocol.omega_exp);
    let t = scale * protocol.delta_conf;
    match model {
        CompletenessModel::Hoeffding => (-2.0 * n * t * t).exp(),
        CompletenessModel::RelativeEntropy => {
            let q = if upper { mu + t } else { mu - t };
            if !(0.0..=1.0).contains(&q) {
                return 0.0;
            }
            (-n * kl(q, mu)).exp()
        }
    }
}

/// Smallest δ whose completeness bound is at most `eps_c`. Infinite when no
/// deviation inside the statistic's range is enough.
pub fn delta_for_completeness(variant: &Variant, omega_exp: f64, n: u64, eps_c: f64, model: CompletenessModel) -> f64 {
    let target = (1.0 / eps_c).ln() / n as f64;
    let (mu, scale, upper) = abort_statistic(variant, omega_exp);
    let t = match model {
        CompletenessModel::Hoeffding => (target / 2.0).sqrt(),
        CompletenessModel::RelativeEntropy => {
            let room = if upper { 1.0 - mu } else { mu };
            let at = |x: f64| kl(if upper { mu + x } else { mu - x }, mu);
            if at(room) < target {
                return f64::INFINITY;
            }
            let (mut lo, mut hi) = (0.0, room);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if at(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            hi
        }
    };
    t / scale
}

/// Uniform bits consumed to choose the inputs.
pub fn input_randomness(protocol: &ProtocolSpec) -> f64 {
    let n = protocol.n as f64;
    let h = |p: f64| hbin(p).unwrap_or(0.0);
    match protocol.variant {
        Variant::SpotCheck { gamma } => n * (h(gamma) + 2.0 * gamma) + 3.0,
        Variant::BiasedLocal { zeta_a, zeta_b } => n * (h(zeta_a) + h(zeta_b)) + 6.0,
        Variant::RecycledInput => 2.0 * n,
    }
}
