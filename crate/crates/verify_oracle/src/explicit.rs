use std::collections::BTreeMap;

use entropy_core::{EntropyError, EntropyQuantity, InputDistribution, QubitStrategy, Result};
use nalgebra::Matrix4;

const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell vectors in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
const BELL: [[f64; 4]; 4] = [[S2, 0.0, 0.0, S2], [S2, 0.0, 0.0, -S2], [0.0, S2, S2, 0.0], [0.0, S2, -S2, 0.0]];

/// Bell-diagonal two-qubit state with its purification onto a 4-level E.
#[derive(Clone, Debug)]
pub struct ExplicitState {
    /// Density matrix in the Bell basis (diagonal).
    pub rho_bell: Matrix4<f64>,
    /// Density matrix in the computational basis.
    pub rho: Matrix4<f64>,
    /// `purification[e]` is the A'B' vector paired with E basis state `e`:
    /// |ψ⟩ = Σ_e purification[e] ⊗ |e⟩.
    pub purification: [[f64; 4]; 4],
}

impl ExplicitState {
    pub fn new(r: f64, theta: f64, delta: f64) -> Result<Self> {
        let (c, s) = (theta.cos(), theta.sin());
        let lambda =
            [0.25 + r * c / 2.0 + delta, 0.25 + r * s / 2.0 - delta, 0.25 - r * s / 2.0 - delta, 0.25 - r * c / 2.0 + delta];
        if lambda.iter().any(|&l| l < -1e-10) || !(0.0..=1.0 + 1e-12).contains(&r) {
            return Err(EntropyError::Domain(format!("({r}, {theta}, {delta}) is not a state")));
        }
        let lambda = lambda.map(|l| l.max(0.0));
        let rho_bell = Matrix4::from_diagonal(&lambda.into());
        let basis = Matrix4::from_fn(|row, col| BELL[col][row]);
        let rho = basis * rho_bell * basis.transpose();
        let purification = std::array::from_fn(|e| BELL[e].map(|v| v * lambda[e].sqrt()));
        let out = ExplicitState { rho_bell, rho, purification };
        out.check()?;
        Ok(out)
    }

    pub fn from_strategy(s: &QubitStrategy) -> Result<Self> {
        Self::new(s.state.r, s.state.theta, s.state.delta)
    }

    fn check(&self) -> Result<()> {
        let tr = self.rho.trace();
        let asym = (self.rho - self.rho.transpose()).abs().max();
        let min_eig = self.rho.symmetric_eigenvalues().min();
        if (tr - 1.0).abs() > 1e-10 || asym > 1e-12 || min_eig < -1e-10 {
            return Err(EntropyError::Domain(format!("invalid density matrix (tr {tr}, min eig {min_eig})")));
        }
        Ok(())
    }

    /// Unnormalised E state after outcome vector `proj` on A'B':
    /// `v_e = ⟨proj|purification[e]⟩`.
    fn eve_vector(&self, proj: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|e| (0..4).map(|k| proj[k] * self.purification[e][k]).sum())
    }
}

fn qubit(angle: f64) -> [f64; 2] {
    [angle.cos(), angle.sin()]
}

fn kron(a: [f64; 2], b: [f64; 2]) -> [f64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// One term of the classical–quantum ensemble.
struct Term {
    a: usize,
    b: usize,
    x: usize,
    y: usize,
    weight: f64,
    v: [f64; 4],
}

fn ensemble(state: &ExplicitState, s: &QubitStrategy, pxy: &[[f64; 2]; 2]) -> Vec<Term> {
    let mut out = Vec::with_capacity(16);
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let pa = qubit(s.angles.alpha(x) + a as f64 * std::f64::consts::FRAC_PI_2);
                    let pb = qubit(s.angles.beta(y) + b as f64 * std::f64::consts::FRAC_PI_2);
                    out.push(Term { a, b, x, y, weight: pxy[x][y], v: state.eve_vector(&kron(pa, pb)) });
                }
            }
        }
    }
    out
}

fn eta_sum(m: &Matrix4<f64>) -> f64 {
    m.symmetric_eigenvalues().iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum()
}

/// `S` of the block-diagonal cq state whose blocks are keyed by `key`.
fn block_entropy(terms: &[Term], key: impl Fn(&Term) -> Vec<usize>) -> f64 {
    let mut blocks: BTreeMap<Vec<usize>, Matrix4<f64>> = BTreeMap::new();
    for t in terms.iter().filter(|t| t.weight > 0.0) {
        let v = nalgebra::Vector4::from(t.v);
        *blocks.entry(key(t)).or_insert_with(Matrix4::zeros) += v * v.transpose() * t.weight;
    }
    blocks.values().map(eta_sum).sum()
}

/// Probability that `a ⊕ b = x·y` under uniform inputs, from the explicit
/// ensemble.
pub fn brute_force_score(s: &QubitStrategy) -> Result<f64> {
    let state = ExplicitState::from_strategy(s)?;
    Ok(ensemble(&state, s, &[[0.25; 2]; 2])
        .iter()
        .filter(|t| (t.a ^ t.b) == (t.x & t.y))
        .map(|t| t.weight * t.v.iter().map(|c| c * c).sum::<f64>())
        .sum())
}

/// `H(C|DE) = S(CDE) − S(DE)` from the explicit post-measurement state.
pub fn brute_force_entropy(q: EntropyQuantity, s: &QubitStrategy, pxy: &InputDistribution) -> Result<f64> {
    let state = ExplicitState::from_strategy(s)?;
    let fixed = [[1.0, 0.0], [0.0, 0.0]];
    let (weights, key_cde, key_de): (_, fn(&Term) -> Vec<usize>, fn(&Term) -> Vec<usize>) = match q {
        EntropyQuantity::AB00E => (fixed, |t| vec![t.a, t.b], |_| vec![]),
        EntropyQuantity::ABXYE => (pxy.p, |t| vec![t.a, t.b, t.x, t.y], |t| vec![t.x, t.y]),
        EntropyQuantity::ABE => (pxy.p, |t| vec![t.a, t.b], |_| vec![]),
        EntropyQuantity::A00E => (fixed, |t| vec![t.a], |_| vec![]),
        EntropyQuantity::AXYE => (pxy.p, |t| vec![t.a, t.x, t.y], |t| vec![t.x, t.y]),
        EntropyQuantity::AE => (pxy.p, |t| vec![t.a], |_| vec![]),
    };
    let terms = ensemble(&state, s, &weights);
    let h = block_entropy(&terms, key_cde) - block_entropy(&terms, key_de);
    if !h.is_finite() {
        return Err(EntropyError::Numeric { tag: q });
    }
    Ok(h)
}
