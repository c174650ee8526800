use curve_builder::{CurveKind, Interpolant, RateCurve};
use entropy_core::{EntropyQuantity, InputDistribution, OMEGA_CLASSICAL, OMEGA_MAX};

use crate::{EatError, Result, Variant};

/// Single-round rate as a function of the CHSH score, read from an F curve.
/// Zero at and below 3/4.
#[derive(Clone, Debug)]
pub struct RateFunction {
    pub quantity: EntropyQuantity,
    interp: Interpolant,
    /// Lower end of the range worth trying as a tangent point.
    t_min: f64,
    /// Slope of the linear piece, used at and below ω*.
    linear_slope: Option<f64>,
}

impl RateFunction {
    /// Curves of kind G are accepted only for the fixed-input quantities,
    /// which are already convex.
    pub fn from_curve(curve: &RateCurve) -> Result<Self> {
        let fixed = matches!(curve.quantity, EntropyQuantity::AB00E | EntropyQuantity::A00E);
        if curve.kind != CurveKind::F && !fixed {
            return Err(EatError::Mismatch(format!("{} curve must be an F curve", curve.quantity)));
        }
        let interp = curve.interpolant()?;
        let first = curve.points.first().map_or(OMEGA_CLASSICAL, |p| p.omega);
        let t_min = curve.tangent.map_or(first, |t| t.omega_star.max(first));
        Ok(RateFunction { quantity: curve.quantity, interp, t_min, linear_slope: curve.tangent.map(|t| t.slope) })
    }

    /// Checks that the curve is one the protocol's EAT statement accepts.
    pub fn check_variant(&self, variant: &Variant, curve: &RateCurve) -> Result<()> {
        use EntropyQuantity::*;
        let ok = match variant {
            Variant::RecycledInput => matches!(self.quantity, ABXYE | AXYE) && curve.pxy == InputDistribution::uniform(),
            _ => matches!(self.quantity, AB00E | A00E),
        };
        if ok {
            Ok(())
        } else {
            Err(EatError::Mismatch(format!("{} cannot drive the {} protocol", self.quantity, variant.name())))
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= OMEGA_CLASSICAL {
            0.0
        } else {
            self.interp.eval(s.min(OMEGA_MAX))
        }
    }

    pub fn slope(&self, s: f64) -> f64 {
        match self.linear_slope {
            Some(g) if s <= self.t_min => g,
            _ => self.interp.derivative(s.clamp(OMEGA_CLASSICAL, OMEGA_MAX)),
        }
    }

    /// Candidate tangent points: from ω* (or the first knot) to ω_max.
    pub fn t_range(&self) -> (f64, f64) {
        (self.t_min, self.interp.domain().1)
    }

    pub fn knots(&self) -> &[f64] {
        self.interp.knots()
    }
}
