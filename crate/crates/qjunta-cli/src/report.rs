//! Versioned experiment reports shared by every subcommand.

use qjunta::QueryLedger;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Report schema version, bumped on breaking field changes.
pub const REPORT_SCHEMA: u32 = 1;

/// A command's inputs and outputs in one serializable record.
///
/// JSON objects serialize with sorted keys, so a fixed seed reproduces a
/// report byte for byte except for the wall time; `canonical_json` masks
/// that field for exact comparisons.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    /// Query totals summed over all trials.
    pub ledger: QueryLedger,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    pub fn new(command: &str, parameters: Value, results: Value, ledger: QueryLedger) -> Self {
        ExperimentReport {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            parameters,
            results,
            ledger,
            wall_time_ms: 0,
        }
    }

    /// Pretty JSON with a trailing newline, wall time included.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `to_json` with the wall time zeroed.
    pub fn canonical_json(&self) -> String {
        let mut masked = self.clone();
        masked.wall_time_ms = 0;
        masked.to_json()
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        serde_json::from_str(s)
            .map_err(|e| CliError::InvalidArgument(format!("malformed report: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn reports_round_trip_and_mask_wall_time() {
        let mut r = ExperimentReport::new(
            "test",
            json!({"k": 2, "eps": 0.5}),
            json!({"accept_fraction": 1.0}),
            QueryLedger {
                simulated_u: 3,
                simulated_u_dagger: 0,
                modeled_quantum: 7,
            },
        );
        r.wall_time_ms = 1234;
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.wall_time_ms, 1234);
        assert_eq!(back.ledger, r.ledger);
        assert_eq!(back.canonical_json(), r.canonical_json());
        assert!(r.canonical_json().contains("\"wall_time_ms\": 0"));
    }
}
