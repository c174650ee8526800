use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

/// i.i.d. device described only by its per-input winning probabilities.
/// Outputs are uniform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HonestDeviceModel {
    /// `omega_xy[x][y]`.
    pub omega_xy: [[f64; 2]; 2],
}

impl HonestDeviceModel {
    pub fn new(omega_xy: [[f64; 2]; 2]) -> Result<Self> {
        let d = HonestDeviceModel { omega_xy };
        d.validate()?;
        Ok(d)
    }

    /// Same winning probability on every input pair.
    pub fn uniform(omega: f64) -> Result<Self> {
        Self::new([[omega; 2]; 2])
    }

    pub fn validate(&self) -> Result<()> {
        for row in &self.omega_xy {
            for &w in row {
                if !(0.0..=1.0).contains(&w) {
                    return Err(SimError::Device(format!("winning probability {w} not in [0,1]")));
                }
            }
        }
        Ok(())
    }

    /// Mean over the four input pairs.
    pub fn omega_exp(&self) -> f64 {
        self.omega_xy.iter().flatten().sum::<f64>() / 4.0
    }

    pub fn win_prob(&self, x: u8, y: u8) -> f64 {
        self.omega_xy[x as usize][y as usize]
    }
}
