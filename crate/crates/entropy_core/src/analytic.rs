//! Closed-form reference curves.

use crate::{hbin, EntropyError, Result};

pub const OMEGA_CLASSICAL: f64 = 0.75;
/// Tsirelson value ½(1 + 1/√2).
pub const OMEGA_MAX: f64 = 0.853_553_390_593_273_8;

fn check(omega: f64) -> Result<()> {
    if !(OMEGA_CLASSICAL - 1e-12..=OMEGA_MAX + 1e-12).contains(&omega) {
        return Err(EntropyError::Domain(format!("score {omega} outside [3/4, {OMEGA_MAX}]")));
    }
    Ok(())
}

fn tsirelson_arg(omega: f64) -> f64 {
    (0.5 + (2.0 * omega - 1.0) / 2f64.sqrt()).min(1.0)
}

/// `1 − hbin(½(1 + √(16ω(ω−1) + 3)))`.
pub fn analytic_a_00e(omega: f64) -> Result<f64> {
    check(omega)?;
    let disc = (16.0 * omega * (omega - 1.0) + 3.0).max(0.0);
    Ok(1.0 - hbin((0.5 * (1.0 + disc.sqrt())).min(1.0))?)
}

/// `1 + hbin(ω) − 2·hbin(½ + (2ω−1)/√2)`.
pub fn analytic_g1(omega: f64) -> Result<f64> {
    check(omega)?;
    Ok(1.0 + hbin(omega)? - 2.0 * hbin(tsirelson_arg(omega))?)
}

/// `1 − hbin(½ + (2ω−1)/√2)`.
pub fn analytic_g2(omega: f64) -> Result<f64> {
    check(omega)?;
    Ok(1.0 - hbin(tsirelson_arg(omega))?)
}
