//! Report envelope shared by all experiments: named checks, tabular rows, and
//! a deterministic JSON summary (timing lives in a separate sidecar so the
//! summary is byte-stable across runs and worker counts).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// Direction of a check comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// One named pass/fail criterion with the observed statistic and its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            threshold,
            comparison: Comparison::AtMost,
            pass: observed <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            threshold,
            comparison: Comparison::AtLeast,
            pass: observed >= threshold,
        }
    }

    /// Single status line, e.g. `PASS joint_bias_lambda_1e4: 0.0021 <= 0.0130`.
    pub fn status_line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        format!(
            "{} {}: {:.6} {} {:.6}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            op,
            self.threshold
        )
    }
}

/// Everything a driver produces: rows in both JSON and CSV form, the checks,
/// and any extra artifacts to place next to the summary.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub experiment: &'static str,
    pub rows_json: Value,
    pub rows_csv: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub extra_files: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn new(experiment: &'static str, rows_json: Value, rows_csv: String, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        ExperimentOutput {
            experiment,
            rows_json,
            rows_csv,
            checks,
            pass,
            extra_files: Vec::new(),
        }
    }
}

/// Top-level summary written to `summary.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub config: Value,
    pub rows: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Summary {
    pub fn from_output(output: &ExperimentOutput, seed: u64, config: Value) -> Self {
        Summary {
            experiment: output.experiment.to_string(),
            version: crate::VERSION.to_string(),
            seed,
            config,
            rows: output.rows_json.clone(),
            checks: output.checks.clone(),
            pass: output.pass,
        }
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// Format a float for CSV output. Uses the shortest round-trip decimal form;
/// infinities print as `inf`/`-inf`, matching what `f64::Display` emits.
pub fn csv_float(x: f64) -> String {
    format!("{x}")
}

/// Assemble a CSV document from a header and per-row cell lists.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn check_constructors_set_pass() {
        assert!(Check::at_most("a", 1.0, 2.0).pass);
        assert!(!Check::at_most("a", 3.0, 2.0).pass);
        assert!(Check::at_least("b", 0.95, 0.9).pass);
        assert!(!Check::at_least("b", 0.85, 0.9).pass);
        // boundary counts as passing in both directions
        assert!(Check::at_most("c", 2.0, 2.0).pass);
        assert!(Check::at_least("c", 2.0, 2.0).pass);
    }

    #[test]
    fn status_line_format() {
        let c = Check::at_most("bias", 0.0021, 0.013);
        assert_eq!(c.status_line(), "PASS bias: 0.002100 <= 0.013000");
        let c = Check::at_least("coverage", 0.8, 0.9);
        assert_eq!(c.status_line(), "FAIL coverage: 0.800000 >= 0.900000");
    }

    #[test]
    fn summary_round_trips_through_json() {
        let output = ExperimentOutput::new(
            "demo",
            json!([{"lambda": 100.0, "estimate": 0.5}]),
            "lambda,estimate\n100,0.5\n".to_string(),
            vec![Check::at_most("bias", 0.1, 0.2)],
        );
        let summary = Summary::from_output(&output, 42, json!({"lambda": 100.0}));
        let text = summary.to_json_pretty().unwrap();
        let back: Summary = serde_json::from_str(&text).unwrap();
        assert_eq!(back.experiment, "demo");
        assert_eq!(back.seed, 42);
        assert!(back.pass);
        assert_eq!(back.checks, summary.checks);
    }

    #[test]
    fn csv_float_conventions() {
        assert_eq!(csv_float(0.5), "0.5");
        assert_eq!(csv_float(1.0), "1");
        assert_eq!(csv_float(f64::INFINITY), "inf");
        assert_eq!(csv_float(0.1 + 0.2), "0.30000000000000004");
    }

    #[test]
    fn csv_table_layout() {
        let table = csv_table(
            &["a", "b"],
            &[vec!["1".into(), "2".into()], vec!["3".into(), "4".into()]],
        );
        assert_eq!(table, "a,b\n1,2\n3,4\n");
    }
}
