//! Machine-readable run reports.
//!
//! A report is one JSON document with a fixed field order (struct order),
//! so identical runs produce byte-identical payloads apart from the
//! `timing_ms` field, and serialize → parse → serialize is a fixed point.

use matrix_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    /// Echo of the invoking command line.
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub output: ReportOutput,
    pub timing_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub label: String,
    pub path: String,
    pub rows: usize,
    pub cols: usize,
    pub frobenius_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportOutput {
    Certify {
        side: String,
        requested_rank: usize,
        tol: f64,
        valid: bool,
        certified_bound: usize,
        residual: f64,
        trace: f64,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
        degenerate_cut: bool,
        justification: String,
        w: Matrix,
    },
    RankTooHigh {
        side: String,
        requested_rank: usize,
        observed_rank: usize,
    },
    Solve {
        mode: String,
        status: String,
        certified: bool,
        iterations: usize,
        rank_estimate: Option<usize>,
        final_objective: f64,
        final_residual: f64,
        theta: Vec<f64>,
        objective_trajectory: Vec<f64>,
        residual_trajectory: Vec<f64>,
        penalty_trajectory: Vec<f64>,
        w: Matrix,
    },
    Gen {
        generator: String,
        rows: usize,
        cols: usize,
        planted: usize,
        noise: f64,
        seed: u64,
        files: Vec<String>,
    },
    Bench {
        seed: u64,
        dims_cap: usize,
        groups: Vec<BenchGroup>,
        all_passed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchGroup {
    pub name: String,
    pub instances: usize,
    pub failures: usize,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: Vec<String>, inputs: Vec<InputDigest>, output: ReportOutput) -> Self {
        Self {
            tool: "rankcert".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs,
            output,
            timing_ms: 0,
        }
    }

    pub fn to_text(&self) -> Result<String, HarnessError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Copy with the timing zeroed, used by determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut copy = self.clone();
        copy.timing_ms = 0;
        copy
    }
}

pub fn digest(label: &str, path: &str, matrix: &Matrix) -> InputDigest {
    InputDigest {
        label: label.to_string(),
        path: path.to_string(),
        rows: matrix.rows(),
        cols: matrix.cols(),
        frobenius_norm: matrix.frobenius_norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> RunReport {
        RunReport::new(
            vec!["certify".into(), "--rank".into(), "1".into()],
            vec![digest("matrix", "g.mat", &Matrix::diag(&[1.0, 0.0]))],
            ReportOutput::Certify {
                side: "right".into(),
                requested_rank: 1,
                tol: 1e-8,
                valid: true,
                certified_bound: 1,
                residual: 0.0,
                trace: 1.0,
                min_eigenvalue: 0.0,
                max_eigenvalue: 1.0,
                degenerate_cut: false,
                justification: "ok".into(),
                w: Matrix::diag(&[0.0, 1.0]),
            },
        )
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let report = sample_report();
        let text = report.to_text().unwrap();
        let parsed = RunReport::parse(&text).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_text().unwrap(), text);
    }

    #[test]
    fn timing_is_excluded_from_comparisons() {
        let mut a = sample_report();
        let mut b = sample_report();
        a.timing_ms = 3;
        b.timing_ms = 99;
        assert_ne!(a, b);
        assert_eq!(a.without_timing(), b.without_timing());
    }

    #[test]
    fn awkward_floats_round_trip() {
        let mut report = sample_report();
        if let ReportOutput::Certify { residual, .. } = &mut report.output {
            *residual = 1.2345678901234567e-13;
        }
        let text = report.to_text().unwrap();
        let parsed = RunReport::parse(&text).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_text().unwrap(), text);
    }
}
