use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::interpret::{interpret, InterpretationNote, InterpretationThresholds};
use crate::error::{Error, Result};
use crate::measurements::{
    measurement_series_with, Estimate, Measurement, MeasurementPoint, MeasurementSeries, ScoreMatrix, Warning,
    DEFAULT_LAMBDA,
};
use crate::metrics::{IntervalMethod, DEFAULT_CONFIDENCE};

/// Name and version written into every report.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// JSON document; the only format that can be read back.
    Structured,
    /// One CSV row per step with mean/lo/hi columns for every measurement.
    Delimited,
    /// Long CSV `step,series_name,mean,ci_low,ci_high`, ready for plotting.
    PlotSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the raw score-matrix bytes, lowercase hex.
    pub input_sha256: String,
    pub tool_version: String,
    pub thresholds: InterpretationThresholds,
}

/// Everything `compute` produces for one score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub series: MeasurementSeries,
    pub confidence: f64,
    pub interval_method: IntervalMethod,
    pub provenance: Provenance,
    pub notes: Vec<InterpretationNote>,
}

impl Report {
    pub fn lambda(&self) -> f64 {
        self.series.lambda
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.series.warnings
    }

    /// Replaces the thresholds and recomputes the interpretation notes.
    pub fn reinterpret(&mut self, thresholds: InterpretationThresholds) {
        self.provenance.thresholds = thresholds;
        self.notes = interpret(&self.series, &thresholds);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeOptions {
    pub lambda: f64,
    pub confidence: f64,
    pub interval_method: IntervalMethod,
    /// `None` scales the default thresholds to the matrix's metric range.
    pub thresholds: Option<InterpretationThresholds>,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            confidence: DEFAULT_CONFIDENCE,
            interval_method: IntervalMethod::default(),
            thresholds: None,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Computes the measurement series and interpretation notes for `matrix`.
///
/// `input` is the raw file the matrix was parsed from; only its digest is kept.
pub fn compute_report(input: &[u8], matrix: &ScoreMatrix, options: &ComputeOptions) -> Result<Report> {
    let series = measurement_series_with(matrix, options.lambda, options.confidence, options.interval_method)?;
    let thresholds = options
        .thresholds
        .unwrap_or_else(|| InterpretationThresholds::for_range(matrix.range()));
    let notes = interpret(&series, &thresholds);
    Ok(Report {
        series,
        confidence: options.confidence,
        interval_method: options.interval_method,
        provenance: Provenance {
            input_sha256: sha256_hex(input),
            tool_version: TOOL_VERSION.to_owned(),
            thresholds,
        },
        notes,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRecord {
    step: usize,
    performance: Estimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    learning: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    potential: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    retention: Option<Estimate>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportDocument {
    metric: String,
    lambda: f64,
    confidence: f64,
    interval_method: IntervalMethod,
    provenance: Provenance,
    steps: Vec<StepRecord>,
    warnings: Vec<Warning>,
    notes: Vec<InterpretationNote>,
}

pub fn write_report(report: &Report, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Structured => {
            let doc = ReportDocument {
                metric: report.series.metric_name.clone(),
                lambda: report.series.lambda,
                confidence: report.confidence,
                interval_method: report.interval_method,
                provenance: report.provenance.clone(),
                steps: report
                    .series
                    .points
                    .iter()
                    .map(|p| StepRecord {
                        step: p.step,
                        performance: p.performance,
                        learning: p.learning,
                        potential: p.potential,
                        retention: p.retention,
                    })
                    .collect(),
                warnings: report.series.warnings.clone(),
                notes: report.notes.clone(),
            };
            let mut out = serde_json::to_vec_pretty(&doc).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Delimited => {
            let mut out = String::from("step");
            for m in Measurement::ALL {
                for col in ["mean", "lo", "hi"] {
                    out.push_str(&format!(",{}_{col}", m.name()));
                }
            }
            out.push('\n');
            for p in &report.series.points {
                out.push_str(&p.step.to_string());
                for m in Measurement::ALL {
                    match p.get(m) {
                        Some(e) => out.push_str(&format!(",{},{},{}", e.mean, e.ci_low, e.ci_high)),
                        None => out.push_str(",,,"),
                    }
                }
                out.push('\n');
            }
            out.into_bytes()
        }
        ReportFormat::PlotSeries => {
            let mut out = String::from("step,series_name,mean,ci_low,ci_high\n");
            for p in &report.series.points {
                for m in Measurement::ALL {
                    if let Some(e) = p.get(m) {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            p.step,
                            m.name(),
                            e.mean,
                            e.ci_low,
                            e.ci_high
                        ));
                    }
                }
            }
            out.into_bytes()
        }
    }
}

/// Reads a structured report back.
pub fn parse_report(bytes: &[u8]) -> Result<Report> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::parse(0, "empty input: expected a report document"));
    }
    let doc: ReportDocument = serde_json::from_slice(bytes).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let mut points = Vec::with_capacity(doc.steps.len());
    for (i, s) in doc.steps.into_iter().enumerate() {
        if s.step != i {
            return Err(Error::invalid(format!(
                "report steps must be 0, 1, 2, ...; entry {i} is step {}",
                s.step
            )));
        }
        let derived = [s.learning.is_some(), s.potential.is_some(), s.retention.is_some()];
        if i == 0 && derived.iter().any(|&d| d) {
            return Err(Error::invalid("step 0 cannot carry learning, potential, or retention"));
        }
        points.push(MeasurementPoint {
            step: s.step,
            performance: s.performance,
            learning: s.learning,
            potential: s.potential,
            retention: s.retention,
        });
    }
    Ok(Report {
        series: MeasurementSeries {
            points,
            lambda: doc.lambda,
            metric_name: doc.metric,
            warnings: doc.warnings,
        },
        confidence: doc.confidence,
        interval_method: doc.interval_method,
        provenance: doc.provenance,
        notes: doc.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_score_matrix, MatrixFormat};

    const TOY: &[u8] = b"model_step,dataset_step,repetition,score\n\
        0,0,0,0.6\n0,1,0,0.6\n1,0,0,0.7\n1,1,0,0.8\n";

    fn toy_report() -> Report {
        let m = parse_score_matrix(TOY, MatrixFormat::Delimited).unwrap();
        compute_report(TOY, &m, &ComputeOptions::default()).unwrap()
    }

    #[test]
    fn structured_round_trip() {
        let r = toy_report();
        let bytes = write_report(&r, ReportFormat::Structured);
        assert_eq!(parse_report(&bytes).unwrap(), r);
        assert_eq!(
            write_report(&parse_report(&bytes).unwrap(), ReportFormat::Structured),
            bytes
        );
    }

    #[test]
    fn digest_and_version_recorded() {
        let r = toy_report();
        assert_eq!(r.provenance.input_sha256.len(), 64);
        assert_eq!(r.provenance.input_sha256, sha256_hex(TOY));
        assert!(r.provenance.tool_version.starts_with("adaptive-eval "));
        assert_eq!(r.warnings().len(), 2);
    }

    #[test]
    fn tabular_layouts() {
        let r = toy_report();
        let wide = String::from_utf8(write_report(&r, ReportFormat::Delimited)).unwrap();
        let lines: Vec<_> = wide.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 13);
        assert!(lines[1].starts_with("0,0.6,0.6,0.6,,,"));

        let long = String::from_utf8(write_report(&r, ReportFormat::PlotSeries)).unwrap();
        assert_eq!(long.lines().count(), 1 + 1 + 4);
        assert!(long.contains("\n1,learning,0.2"));
    }

    #[test]
    fn malformed_reports_rejected() {
        assert!(matches!(parse_report(b"").unwrap_err(), Error::Parse { line: 0, .. }));
        let r = toy_report();
        let text = String::from_utf8(write_report(&r, ReportFormat::Structured)).unwrap();
        let shifted = text.replacen("\"step\": 1", "\"step\": 5", 1);
        assert!(parse_report(shifted.as_bytes()).is_err());
    }
}
