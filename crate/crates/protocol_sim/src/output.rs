use eat_rates::ProtocolSpec;
use serde::{Deserialize, Serialize};

use crate::{Completeness, HonestDeviceModel, Result, SimConfig, SimError, Transcript};

#[derive(Serialize)]
struct TrialRow {
    trial: u64,
    aborted: bool,
    score_hat: f64,
}

/// CSV with header `trial,aborted,score_hat`.
pub fn trial_table_csv(transcripts: &[Transcript]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| SimError::Output(e.to_string());
    if transcripts.is_empty() {
        w.write_record(["trial", "aborted", "score_hat"]).map_err(err)?;
    }
    for t in transcripts {
        w.serialize(TrialRow { trial: t.trial, aborted: t.aborted, score_hat: t.score_hat }).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| SimError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| SimError::Output(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub protocol: ProtocolSpec,
    pub device: HonestDeviceModel,
    pub config: SimConfig,
    pub completeness: Completeness,
    pub score_mean: f64,
    pub score_sd: f64,
}

impl SimSummary {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| SimError::Output(e.to_string()))
    }
}

/// Aggregates already simulated transcripts. The abort rate is compared
/// with the Hoeffding bound as in `empirical_completeness`.
pub fn summarize(
    protocol: &ProtocolSpec,
    device: &HonestDeviceModel,
    config: &SimConfig,
    transcripts: &[Transcript],
) -> SimSummary {
    let trials = transcripts.len().max(1) as f64;
    let aborts = transcripts.iter().filter(|t| t.aborted).count() as u64;
    let mean = transcripts.iter().map(|t| t.score_hat).sum::<f64>() / trials;
    let var = transcripts.iter().map(|t| (t.score_hat - mean).powi(2)).sum::<f64>() / (trials - 1.0).max(1.0);
    SimSummary {
        protocol: *protocol,
        device: *device,
        config: *config,
        completeness: Completeness::from_counts(transcripts.len() as u64, aborts, eat_rates::completeness_error(protocol)),
        score_mean: mean,
        score_sd: var.sqrt(),
    }
}
