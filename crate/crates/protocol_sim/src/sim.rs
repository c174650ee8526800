use eat_rates::{completeness_error, ProtocolSpec, Variant};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{HonestDeviceModel, Result, SimError};

/// 32-bit words of the trial's ChaCha stream consumed by one round. Round
/// `i` always reads words `[i·W, (i+1)·W)`, whether it uses them or not.
pub const WORDS_PER_ROUND: u128 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uniform draws for one round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundDraws {
    /// Test selection (spot-check) or Alice's input.
    pub select: f64,
    /// Bob's input.
    pub bob: f64,
    pub win: f64,
    /// Bits 0,1: test-round inputs (spot-check). Bits 2,3: generation outputs.
    pub bits: u64,
}

fn stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn next_draws(rng: &mut ChaCha8Rng) -> RoundDraws {
    RoundDraws { select: rng.gen(), bob: rng.gen(), win: rng.gen(), bits: rng.next_u64() }
}

/// Draws of round `round` of trial `trial`, read by seeking the stream.
pub fn round_draws(seed: u64, trial: u64, round: u64) -> RoundDraws {
    let mut rng = stream(seed, trial);
    rng.set_word_pos(round as u128 * WORDS_PER_ROUND);
    next_draws(&mut rng)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub trial: u64,
    pub variant: Variant,
    pub n: u64,
    /// Generation rounds of the spot-checking protocol (U = ⊥).
    pub untested: u64,
    /// `cells[2x + y] = [losses, wins]` over rounds with inputs (x, y).
    pub cells: [[u64; 2]; 4],
    /// Output pairs `2a + b` on generation rounds.
    pub generation_outputs: [u64; 4],
    pub aborted: bool,
    pub score_hat: f64,
}

impl Transcript {
    fn empty(trial: u64, variant: Variant, n: u64) -> Self {
        Transcript {
            trial,
            variant,
            n,
            untested: 0,
            cells: [[0; 2]; 4],
            generation_outputs: [0; 4],
            aborted: false,
            score_hat: 0.0,
        }
    }

    pub fn losses(&self) -> u64 {
        self.cells.iter().map(|c| c[0]).sum()
    }

    pub fn wins(&self) -> u64 {
        self.cells.iter().map(|c| c[1]).sum()
    }

    pub fn total(&self) -> u64 {
        self.untested + self.losses() + self.wins()
    }
}

/// Inverse-propensity score estimate `¼ Σ_xy W_xy / (n p_X(x) p_Y(y))`.
pub fn estimate_score_biased(t: &Transcript, zeta_a: f64, zeta_b: f64) -> Result<f64> {
    if t.n == 0 {
        return Err(SimError::Config("empty transcript".into()));
    }
    if !(zeta_a > 0.0 && zeta_a < 1.0 && zeta_b > 0.0 && zeta_b < 1.0) {
        return Err(SimError::Config(format!("ζ = ({zeta_a}, {zeta_b}) not in (0,1)")));
    }
    let px = [1.0 - zeta_a, zeta_a];
    let py = [1.0 - zeta_b, zeta_b];
    let n = t.n as f64;
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            s += t.cells[2 * x + y][1] as f64 / (4.0 * px[x] * py[y]);
        }
    }
    // At ζ = ½ every weight is exactly 1 and this is W/n bit for bit.
    Ok(s / n)
}

/// Relative slack on abort thresholds so that a statistic landing exactly
/// on `n(1 − ω_exp + δ)` is not pushed over it by rounding.
const TIE_SLACK: f64 = 1e-12;

/// One run of the protocol. Extraction is not performed.
pub fn simulate_trial(protocol: &ProtocolSpec, device: &HonestDeviceModel, seed: u64, trial: u64) -> Transcript {
    let mut rng = stream(seed, trial);
    let mut t = Transcript::empty(trial, protocol.variant, protocol.n);
    let (w, d) = (protocol.omega_exp, protocol.delta_conf);
    let n = protocol.n as f64;
    for _ in 0..protocol.n {
        let r = next_draws(&mut rng);
        let inputs = match protocol.variant {
            Variant::SpotCheck { gamma } => {
                if r.select < gamma {
                    Some(((r.bits & 1) as u8, ((r.bits >> 1) & 1) as u8))
                } else {
                    t.untested += 1;
                    t.generation_outputs[((r.bits >> 2) & 3) as usize] += 1;
                    None
                }
            }
            Variant::BiasedLocal { zeta_a, zeta_b } => Some(((r.select < zeta_a) as u8, (r.bob < zeta_b) as u8)),
            Variant::RecycledInput => Some(((r.select < 0.5) as u8, (r.bob < 0.5) as u8)),
        };
        if let Some((x, y)) = inputs {
            let won = r.win < device.win_prob(x, y);
            t.cells[2 * x as usize + y as usize][won as usize] += 1;
        }
    }
    let lost = t.losses() as f64;
    match protocol.variant {
        Variant::SpotCheck { gamma } => {
            t.score_hat = 1.0 - lost / (n * gamma);
            t.aborted = lost > n * gamma * (1.0 - w + d) * (1.0 + TIE_SLACK);
        }
        Variant::BiasedLocal { zeta_a, zeta_b } => {
            t.score_hat = estimate_score_biased(&t, zeta_a, zeta_b).unwrap_or(f64::NAN);
            t.aborted = t.score_hat < (w - d) * (1.0 - TIE_SLACK);
        }
        Variant::RecycledInput => {
            t.score_hat = t.wins() as f64 / n;
            t.aborted = lost > n * (1.0 - w + d) * (1.0 + TIE_SLACK);
        }
    }
    t
}

fn check(protocol: &ProtocolSpec, device: &HonestDeviceModel, config: &SimConfig) -> Result<()> {
    protocol.validate()?;
    device.validate()?;
    config.validate()?;
    if protocol.n == 0 {
        return Err(SimError::Config("n must be positive".into()));
    }
    Ok(())
}

/// `config.trials` independent runs; trial `k` uses stream `k` of the seed.
pub fn simulate(protocol: &ProtocolSpec, device: &HonestDeviceModel, config: &SimConfig) -> Result<Vec<Transcript>> {
    check(protocol, device, config)?;
    Ok((0..config.trials).into_par_iter().map(|k| simulate_trial(protocol, device, config.seed, k)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Completeness {
    pub trials: u64,
    pub aborts: u64,
    pub abort_rate: f64,
    /// Hoeffding bound on the honest abort probability.
    pub bound: f64,
    /// `bound + 3√(bound(1−bound)/trials) + 1/trials`.
    pub allowed: f64,
    pub holds: bool,
}

impl Completeness {
    pub fn from_counts(trials: u64, aborts: u64, bound: f64) -> Self {
        let n = trials.max(1) as f64;
        let abort_rate = aborts as f64 / n;
        let allowed = bound + 3.0 * (bound * (1.0 - bound) / n).sqrt() + 1.0 / n;
        Completeness { trials, aborts, abort_rate, bound, allowed, holds: abort_rate <= allowed }
    }
}

/// Abort frequency of an honest device whose mean score is the protocol's
/// ω_exp, against the analytic bound.
pub fn empirical_completeness(protocol: &ProtocolSpec, device: &HonestDeviceModel, config: &SimConfig) -> Result<Completeness> {
    check(protocol, device, config)?;
    if (device.omega_exp() - protocol.omega_exp).abs() > 1e-12 {
        return Err(SimError::Config(format!(
            "device mean score {} differs from ω_exp = {}",
            device.omega_exp(),
            protocol.omega_exp
        )));
    }
    let aborts =
        (0..config.trials).into_par_iter().filter(|&k| simulate_trial(protocol, device, config.seed, k).aborted).count() as u64;
    Ok(Completeness::from_counts(config.trials, aborts, completeness_error(protocol)))
}
