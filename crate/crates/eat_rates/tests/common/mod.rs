#![allow(dead_code)]

use curve_builder::{convex_envelope, CurveKind, CurvePoint, RateCurve};
use eat_rates::RateFunction;
use entropy_core::{EntropyQuantity, InputDistribution};

pub const OMEGA_MAX: f64 = 0.853_553_390_593_273_8;

pub fn hbin(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn a00e(w: f64) -> f64 {
    1.0 - hbin(0.5 * (1.0 + (16.0 * w * (w - 1.0) + 3.0).max(0.0).sqrt()))
}

fn tsirelson(w: f64) -> f64 {
    (0.5 + (2.0 * w - 1.0) / 2f64.sqrt()).min(1.0)
}

pub fn g1(w: f64) -> f64 {
    1.0 + hbin(w) - 2.0 * hbin(tsirelson(w))
}

pub fn g2(w: f64) -> f64 {
    1.0 - hbin(tsirelson(w))
}

/// Curve sampled from a closed form on 400 points; the envelope is taken
/// unless the quantity is one of the fixed-input ones.
pub fn curve(q: EntropyQuantity, f: fn(f64) -> f64) -> RateCurve {
    let n = 400;
    let points = (1..=n)
        .map(|i| {
            let omega = 0.75 + (OMEGA_MAX - 0.75) * i as f64 / n as f64;
            CurvePoint { omega, entropy: f(omega), argmin: None }
        })
        .collect();
    let g = RateCurve { quantity: q, pxy: InputDistribution::uniform(), kind: CurveKind::G, points, tangent: None };
    if matches!(q, EntropyQuantity::A00E | EntropyQuantity::AB00E) {
        g
    } else {
        convex_envelope(&g).unwrap()
    }
}

pub fn two_sided() -> RateFunction {
    RateFunction::from_curve(&curve(EntropyQuantity::ABXYE, g1)).unwrap()
}

pub fn one_sided() -> RateFunction {
    RateFunction::from_curve(&curve(EntropyQuantity::AXYE, g2)).unwrap()
}

pub fn fixed_input() -> RateFunction {
    RateFunction::from_curve(&curve(EntropyQuantity::A00E, a00e)).unwrap()
}
