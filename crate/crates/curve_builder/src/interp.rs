//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson).

use entropy_core::OMEGA_MAX;
use serde::{Deserialize, Serialize};

use crate::{CurveError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interpolant {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

/// One-sided three-point endpoint derivative, limited so the end segment
/// stays monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

impl Interpolant {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(CurveError::Domain(format!("interpolant needs >= 2 matching knots, got {n}")));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(CurveError::Domain("knots must be finite and strictly increasing".into()));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes.fill(d[0]);
        } else {
            for i in 1..n - 1 {
                if d[i - 1] * d[i] > 0.0 {
                    // Weighted harmonic mean.
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slopes[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], d[0], d[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        Ok(Interpolant { xs: xs.to_vec(), ys: ys.to_vec(), slopes })
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    /// Domain actually covered: the knot range intersected with [3/4, ω_max].
    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0].max(0.75), self.xs[self.xs.len() - 1].min(OMEGA_MAX))
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, self.xs.len() - 1) - 1;
        (i, x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, x) = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, x) = self.locate(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * self.ys[i] + (6.0 * t - 6.0 * t2) * self.ys[i + 1]) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.slopes[i]
            + (3.0 * t2 - 2.0 * t) * self.slopes[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let xs = [0.76, 0.78, 0.8, 0.83, 0.85];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let p = Interpolant::new(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(p.eval(*x), *y);
        }
        assert!((p.eval(0.79) - 0.58).abs() < 1e-14);
        assert!((p.derivative(0.812) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamps_outside_domain() {
        let p = Interpolant::new(&[0.7, 0.8, 0.9], &[0.0, 1.0, 1.5]).unwrap();
        assert_eq!(p.eval(0.1), p.eval(0.75));
        assert_eq!(p.eval(2.0), p.eval(OMEGA_MAX));
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(Interpolant::new(&[0.8], &[1.0]).is_err());
        assert!(Interpolant::new(&[0.8, 0.8], &[1.0, 2.0]).is_err());
    }
}
