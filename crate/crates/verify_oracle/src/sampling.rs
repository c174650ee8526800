use std::f64::consts::{FRAC_PI_4, PI};

use entropy_core::{BellDiagonalParams, MeasurementAngles, QubitStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform draw in the box coordinates of the valid region:
/// `u = R(cosθ + sinθ) ∈ [0,1]`, `θ ∈ [0,π/4]`, δ uniform on its admissible
/// interval, angles uniform on `[0,π)`. Rejection is kept as a guard for
/// round-off at the region boundary.
pub fn random_strategy(seed: u64) -> QubitStrategy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let u: f64 = rng.gen();
        let theta = rng.gen::<f64>() * FRAC_PI_4;
        let r = u / (theta.cos() + theta.sin());
        let (lo, hi) = BellDiagonalParams::delta_range(r, theta);
        let delta = lo + rng.gen::<f64>() * (hi - lo);
        let a: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>() * PI);
        if let Ok(state) = BellDiagonalParams::new(r, theta, delta) {
            if let Ok(s) = QubitStrategy::new(state, MeasurementAngles::new(a[0], a[1], a[2], a[3])) {
                return s;
            }
        }
    }
}
