//! Machine-readable batch and sweep reports.
//!
//! JSON mirrors the field names of [`TrialBatchReport`] in camelCase. CSV
//! has one header row and renders every real with 17 significant digits,
//! so both formats carry the same `f64` values. Undefined reals (no passing
//! trial, no analytic form) are `null` in JSON and empty in CSV.

use serde::{Deserialize, Serialize};

use crate::batch::BatchCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub zero: u64,
    pub one: u64,
    pub invalid: u64,
}

impl From<BatchCounts> for Counts {
    fn from(c: BatchCounts) -> Self {
        Counts {
            zero: c.zero,
            one: c.one,
            invalid: c.invalid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialBatchReport {
    pub trials: u64,
    pub rounds: usize,
    pub seed: u64,
    pub alice_strategy: String,
    pub bob_strategy: String,
    pub counts: Counts,
    pub detection_rate: f64,
    pub parity_bias_given_pass: Option<f64>,
    pub analytic_pass_probability: Option<f64>,
    pub wall_clock_seconds: f64,
}

pub const BATCH_CSV_HEADER: [&str; 12] = [
    "trials",
    "rounds",
    "seed",
    "aliceStrategy",
    "bobStrategy",
    "zero",
    "one",
    "invalid",
    "detectionRate",
    "parityBiasGivenPass",
    "analyticPassProbability",
    "wallClockSeconds",
];

/// 17 significant digits, scientific notation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

impl TrialBatchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.trials.to_string(),
            self.rounds.to_string(),
            self.seed.to_string(),
            self.alice_strategy.clone(),
            self.bob_strategy.clone(),
            self.counts.zero.to_string(),
            self.counts.one.to_string(),
            self.counts.invalid.to_string(),
            format_real(self.detection_rate),
            format_opt(self.parity_bias_given_pass),
            format_opt(self.analytic_pass_probability),
            format_real(self.wall_clock_seconds),
        ]
    }

    pub fn to_csv(&self) -> String {
        write_csv(&BATCH_CSV_HEADER, std::iter::once(self.csv_fields()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub report: TrialBatchReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    /// One row per point: the parameter value first, then the batch columns.
    pub fn to_csv(&self) -> String {
        let mut header = vec![self.parameter.as_str()];
        header.extend(BATCH_CSV_HEADER);
        let rows = self.points.iter().map(|p| {
            let mut row = vec![format_real(p.value)];
            row.extend(p.report.csv_fields());
            row
        });
        write_csv(&header, rows)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
