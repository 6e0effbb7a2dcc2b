//! Run instrumentation and the JSON report emitted by the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Counters accumulated by a solver run. `points_sampled` counts every index
/// drawn by a sampling step; `full_passes` counts complete scans over the
/// input; `fw_iterations` aggregates center-refinement iterations.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct RunStats {
    pub points_sampled: u64,
    pub full_passes: u64,
    pub fw_iterations: u64,
    pub flags: Vec<String>,
}

impl RunStats {
    pub fn flag(&mut self, f: impl Into<String>) {
        let f = f.into();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    pub fn merge(&mut self, other: &RunStats) {
        self.points_sampled += other.points_sampled;
        self.full_passes += other.full_passes;
        self.fw_iterations += other.fw_iterations;
        for f in &other.flags {
            self.flag(f.clone());
        }
    }
}

/// Solution summary inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultSummary {
    /// Achieved size (radius, width, or margin).
    pub size: f64,
    /// `radius-approx` or `covering-approx` for hybrid solvers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Explicit center coordinates, one vector per shape center.
    pub center: Vec<Vec<f64>>,
    pub center_digest: String,
}

impl ResultSummary {
    pub fn new(size: f64, label: Option<String>, center: Vec<Vec<f64>>) -> Self {
        let mut hasher = Sha256::new();
        for c in &center {
            for v in c {
                hasher.update(v.to_le_bytes());
            }
            hasher.update([0xff]);
        }
        let center_digest = hex::encode(&hasher.finalize()[..16]);
        ResultSummary {
            size,
            label,
            center,
            center_digest,
        }
    }
}

/// The unit persisted and emitted as JSON by the CLI: algorithm, parameters,
/// seed, result, counters, and flags. Serializes with stable key order and
/// round-trips losslessly; the wall-time field is excluded from the digest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub algorithm: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub stream: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset_digest: Option<String>,
    pub result: ResultSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<usize>,
    pub counters: RunStats,
    pub sample_sizes: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winning_repetition: Option<usize>,
    pub wall_ms: f64,
}

impl SolveReport {
    pub fn new(
        algorithm: impl Into<String>,
        seed: u64,
        stream: u64,
        result: ResultSummary,
    ) -> Self {
        SolveReport {
            schema: 1,
            algorithm: algorithm.into(),
            params: BTreeMap::new(),
            seed,
            stream,
            dataset_digest: None,
            result,
            coverage: None,
            counters: RunStats::default(),
            sample_sizes: BTreeMap::new(),
            winning_repetition: None,
            wall_ms: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    /// Digest over the canonical JSON with the wall-time field zeroed.
    pub fn digest(&self) -> String {
        let mut clone = self.clone();
        clone.wall_ms = 0.0;
        let json = serde_json::to_string(&clone).expect("report serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex::encode(&hasher.finalize()[..16])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips_and_digest_ignores_wall_time() {
        let mut r = SolveReport::new(
            "bc-meb",
            7,
            0,
            ResultSummary::new(1.5, None, vec![vec![0.0, 1.0]]),
        );
        r.param("epsilon", 0.1);
        r.coverage = Some(100);
        r.wall_ms = 12.5;
        let json = serde_json::to_string(&r).unwrap();
        let back: SolveReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.result.center, r.result.center);
        assert_eq!(back.params["epsilon"], serde_json::json!(0.1));
        let mut r2 = r.clone();
        r2.wall_ms = 999.0;
        assert_eq!(r.digest(), r2.digest());
        let mut r3 = r.clone();
        r3.result.size = 2.0;
        assert_ne!(r.digest(), r3.digest());
    }
}
