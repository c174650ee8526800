use serde::{Deserialize, Serialize};

use crate::{EatError, EatResult, Result};

/// One line of a rate table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: u64,
    pub omega: f64,
    pub gamma_or_zeta: Option<f64>,
    pub alpha: f64,
    pub t: f64,
    pub hmin: f64,
    pub input: f64,
    pub net: f64,
}

impl From<&EatResult> for RateRow {
    fn from(r: &EatResult) -> Self {
        RateRow {
            n: r.protocol.n,
            omega: r.protocol.omega_exp,
            gamma_or_zeta: r.chosen.mix,
            alpha: r.chosen.alpha,
            t: r.chosen.t,
            hmin: r.hmin_bound,
            input: r.input_bits,
            net: r.net_expansion,
        }
    }
}

/// CSV with header `n,omega,gamma_or_zeta,alpha,t,hmin,input,net`.
pub fn rate_table_csv(results: &[EatResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in results {
        w.serialize(RateRow::from(r)).map_err(|e| EatError::Output(e.to_string()))?;
    }
    if results.is_empty() {
        w.write_record(["n", "omega", "gamma_or_zeta", "alpha", "t", "hmin", "input", "net"])
            .map_err(|e| EatError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| EatError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EatError::Output(e.to_string()))
}

/// Full results, including the error budget, as pretty JSON.
pub fn rate_table_json(results: &[EatResult]) -> Result<String> {
    serde_json::to_string_pretty(results).map_err(|e| EatError::Output(e.to_string()))
}
