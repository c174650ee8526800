//! Scalar abstraction so the entropy formulas can be evaluated either on
//! plain `f64` or on forward-mode dual numbers carrying a gradient.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::eigen::{symmetric_eigen, Mat4};

/// Floor applied before taking roots inside derivatives.
const TINY: f64 = 1e-300;
/// Floor for `log x` inside entropy derivatives. Eigenvalues that should be
/// zero come out of the eigensolver at roundoff level, so exact and numerical
/// zeros must share one floor for singular terms to cancel.
const LOG_FLOOR: f64 = 1e-15;

pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn val(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn acos(self) -> Self;
    /// `x·log₂x` with the convention `0·log 0 = 0`.
    fn xlog2x(self) -> Self;
    /// von Neumann entropy `−tr M log₂ M` of a symmetric PSD matrix, with
    /// eigenvalues below zero treated as zero.
    fn sym4_entropy(m: &[[Self; 4]; 4]) -> Self;
}

fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

fn values(m: &[[impl Real; 4]; 4]) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[i][j].val();
        }
    }
    out
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self.max(0.0))
    }
    fn acos(self) -> Self {
        f64::acos(self.clamp(-1.0, 1.0))
    }
    fn xlog2x(self) -> Self {
        -eta(self)
    }
    fn sym4_entropy(m: &[[Self; 4]; 4]) -> Self {
        let (w, _) = symmetric_eigen(m);
        w.iter().map(|&x| eta(x)).sum()
    }
}

/// Dual number with an `N`-component gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<const N: usize> {
    pub v: f64,
    pub d: [f64; N],
}

impl<const N: usize> Dual<N> {
    /// The `i`-th coordinate variable with value `v`.
    pub fn var(v: f64, i: usize) -> Self {
        let mut d = [0.0; N];
        d[i] = 1.0;
        Dual { v, d }
    }

    fn chain(self, v: f64, dv: f64) -> Self {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= dv;
        }
        Dual { v, d }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut d = self.d;
        for (x, y) in d.iter_mut().zip(o.d) {
            *x += y;
        }
        Dual { v: self.v + o.v, d }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut d = self.d;
        for (x, y) in d.iter_mut().zip(o.d) {
            *x -= y;
        }
        Dual { v: self.v - o.v, d }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        Dual { v: self.v * o.v, d }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = (self.d[i] - q * o.d[i]) * inv;
        }
        Dual { v: q, d }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.chain(-self.v, -1.0)
    }
}

impl<const N: usize> Add<f64> for Dual<N> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Dual { v: self.v + o, d: self.d }
    }
}

impl<const N: usize> Sub<f64> for Dual<N> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Dual { v: self.v - o, d: self.d }
    }
}

impl<const N: usize> Mul<f64> for Dual<N> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        self.chain(self.v * o, o)
    }
}

impl<const N: usize> Div<f64> for Dual<N> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self.chain(self.v / o, 1.0 / o)
    }
}

impl<const N: usize> Real for Dual<N> {
    fn cst(v: f64) -> Self {
        Dual { v, d: [0.0; N] }
    }
    fn val(self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sqrt(self) -> Self {
        let s = self.v.max(0.0).sqrt();
        self.chain(s, 0.5 / s.max(TINY.sqrt()))
    }
    fn acos(self) -> Self {
        let x = self.v.clamp(-1.0, 1.0);
        let den = (1.0 - x * x).max(TINY).sqrt();
        self.chain(x.acos(), -1.0 / den)
    }
    fn xlog2x(self) -> Self {
        let x = self.v.max(0.0);
        let dv = x.max(LOG_FLOOR).log2() + std::f64::consts::LOG2_E;
        self.chain(-eta(x), dv)
    }
    fn sym4_entropy(m: &[[Self; 4]; 4]) -> Self {
        let (w, vecs) = symmetric_eigen(&values(m));
        let mut out = Dual::cst(w.iter().map(|&x| eta(x)).sum());
        // d tr η(M) = tr(η'(M) dM), valid through degeneracies.
        for k in 0..4 {
            let deta = -(w[k].max(LOG_FLOOR).log2() + std::f64::consts::LOG2_E);
            let u = vecs[k];
            for g in 0..N {
                let mut q = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        q += u[i] * m[i][j].d[g] * u[j];
                    }
                }
                out.d[g] += deta * q;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::<2>::var(1.5, 0);
        let y = Dual::<2>::var(-0.5, 1);
        let f = (x * y).sin() / (x + 2.0);
        let h = 1e-7;
        let fv = |a: f64, b: f64| (a * b).sin() / (a + 2.0);
        let dx = (fv(1.5 + h, -0.5) - fv(1.5 - h, -0.5)) / (2.0 * h);
        let dy = (fv(1.5, -0.5 + h) - fv(1.5, -0.5 - h)) / (2.0 * h);
        assert!((f.d[0] - dx).abs() < 1e-7);
        assert!((f.d[1] - dy).abs() < 1e-7);
    }

    #[test]
    fn matrix_entropy_gradient() {
        let t = Dual::<1>::var(0.3, 0);
        let build = |t: Dual<1>| {
            let c = t.cos();
            let s = t.sin();
            let z = Dual::cst(0.0);
            [
                [c * c * 0.6 + 0.1, c * s * 0.2, z, z],
                [c * s * 0.2, s * s * 0.3 + 0.05, z, z],
                [z, z, Dual::cst(0.2), t * 0.01],
                [z, z, t * 0.01, Dual::cst(0.1)],
            ]
        };
        let e = Dual::sym4_entropy(&build(t));
        let h = 1e-6;
        let ev = |v: f64| f64::sym4_entropy(&values(&build(Dual::cst(v))));
        let fd = (ev(0.3 + h) - ev(0.3 - h)) / (2.0 * h);
        assert!((e.d[0] - fd).abs() < 1e-6, "{} vs {}", e.d[0], fd);
    }
}
