use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::run::ExperimentResult;
use super::stats::SummaryStats;
use crate::error::{Error, Result};

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultsFile {
    schema_version: u32,
    config: ExperimentConfig,
    config_hash: String,
    samples: Vec<f64>,
    seeds: Vec<u64>,
    stats: SummaryStats,
    centering: f64,
    failures: usize,
    /// Master seed, repeated from the config for quick inspection.
    seed: u64,
    /// Seconds since the Unix epoch.
    timestamp: u64,
}

/// SHA-256 of the config's canonical JSON, hex encoded.
pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let text = serde_json::to_string(config).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

fn csv_path(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

/// Writes `path` (JSON) and a companion CSV with the same stem holding
/// `index,seed,value` rows. Returns the CSV path.
pub fn persist_results(result: &ExperimentResult, path: &Path) -> Result<PathBuf> {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let file = ResultsFile {
        schema_version: RESULTS_SCHEMA_VERSION,
        config: result.config.clone(),
        config_hash: config_hash(&result.config)?,
        samples: result.samples.clone(),
        seeds: result.seeds.clone(),
        stats: result.stats.clone(),
        centering: result.centering,
        failures: result.failures,
        seed: result.config.master_seed,
        timestamp,
    };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    fs::write(path, json)?;

    let mut csv = String::from("index,seed,value\n");
    for (i, (seed, value)) in result.seeds.iter().zip(&result.samples).enumerate() {
        csv.push_str(&format!("{i},{seed},{value:?}\n"));
    }
    let csv_file = csv_path(path);
    fs::write(&csv_file, csv)?;
    Ok(csv_file)
}

pub fn load_results(path: &Path) -> Result<ExperimentResult> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::SchemaVersionMismatch(format!("unreadable results file: {e}")))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == RESULTS_SCHEMA_VERSION as u64 => {}
        Some(v) => return Err(Error::SchemaVersionMismatch(format!("expected {RESULTS_SCHEMA_VERSION}, found {v}"))),
        None => return Err(Error::SchemaVersionMismatch("missing schema_version".into())),
    }
    let file: ResultsFile = serde_json::from_value(value)
        .map_err(|e| Error::SchemaVersionMismatch(format!("malformed results file: {e}")))?;
    let computed = config_hash(&file.config)?;
    if computed != file.config_hash {
        return Err(Error::ConfigHashMismatch { stored: file.config_hash, computed });
    }
    if file.samples.len() != file.config.reps || file.seeds.len() != file.config.reps {
        return Err(Error::SchemaVersionMismatch(format!(
            "{} samples and {} seeds for {} replications",
            file.samples.len(),
            file.seeds.len(),
            file.config.reps
        )));
    }
    Ok(ExperimentResult {
        config: file.config,
        samples: file.samples,
        seeds: file.seeds,
        stats: file.stats,
        centering: file.centering,
        failures: file.failures,
    })
}
