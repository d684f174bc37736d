//! JSON test reports.
//!
//! Reports echo every input that influenced the result, so a run can be
//! reproduced from its report alone. Serialization is deterministic: fixed
//! field order, shortest round-trip float formatting.

use serde::{Deserialize, Serialize};

use crate::calibration::{NullModel, StatisticKind};
use crate::error::{RdgofError, Result};

/// Accept or reject at the configured significance level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

/// Full record of one test invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    /// Subcommand that produced the report.
    pub command: String,
    pub tool_version: String,
    pub model: NullModel,
    pub statistic_kind: StatisticKind,
    pub sample_size: usize,
    pub statistic: f64,
    pub significance: f64,
    pub replications: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub decision: Decision,
}

impl TestReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| RdgofError::Numeric(e.to_string()))
    }
}
