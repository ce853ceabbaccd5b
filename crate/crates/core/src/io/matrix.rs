use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurements::{CellKey, MetricRange, ScoreMatrix};

/// Header line of the delimited score-matrix format.
pub const DELIMITED_HEADER: [&str; 4] = ["model_step", "dataset_step", "repetition", "score"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    /// Comma-separated `model_step,dataset_step,repetition,score` rows.
    Delimited,
    /// JSON document with metric metadata.
    Structured,
}

impl MatrixFormat {
    /// Picks structured input when the first non-blank byte opens a JSON object.
    pub fn sniff(bytes: &[u8]) -> Self {
        match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') => MatrixFormat::Structured,
            _ => MatrixFormat::Delimited,
        }
    }
}

/// One score cell as it appears in the structured format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub model_step: usize,
    pub dataset_step: usize,
    pub repetition: usize,
    pub score: f64,
    /// Must match the document metric when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

/// A parsed matrix plus the optional metadata the structured format carries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub matrix: ScoreMatrix,
    /// Decay constant suggested by the file's producer.
    pub lambda: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructuredMatrix {
    metric: String,
    metric_range: [f64; 2],
    num_steps: usize,
    num_repetitions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    scores: Vec<ScoreRecord>,
}

pub fn parse_score_matrix(bytes: &[u8], format: MatrixFormat) -> Result<ScoreMatrix> {
    parse_matrix_document(bytes, format).map(|d| d.matrix)
}

pub fn parse_matrix_document(bytes: &[u8], format: MatrixFormat) -> Result<MatrixDocument> {
    match format {
        MatrixFormat::Delimited => {
            parse_delimited(bytes, MetricRange::UNIT).map(|matrix| MatrixDocument { matrix, lambda: None })
        }
        MatrixFormat::Structured => parse_structured(bytes),
    }
}

/// Parses the delimited format with an explicit metric range.
///
/// The matrix extent is inferred from the largest step and repetition indices.
pub fn parse_delimited(bytes: &[u8], range: MetricRange) -> Result<ScoreMatrix> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(0, format!("input is not UTF-8: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut rows: Vec<(usize, CellKey, f64)> = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if !saw_header {
            let fields: Vec<&str> = record.iter().collect();
            if fields != DELIMITED_HEADER {
                return Err(Error::parse(
                    line,
                    format!(
                        "expected header '{}', found '{}'",
                        DELIMITED_HEADER.join(","),
                        fields.join(",")
                    ),
                ));
            }
            saw_header = true;
            continue;
        }
        if record.len() != DELIMITED_HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", DELIMITED_HEADER.len(), record.len()),
            ));
        }
        let index = |i: usize| -> Result<usize> {
            record[i].parse::<usize>().map_err(|_| {
                Error::parse(
                    line,
                    format!(
                        "{} must be a non-negative integer, got '{}'",
                        DELIMITED_HEADER[i], &record[i]
                    ),
                )
            })
        };
        let key = CellKey {
            model_step: index(0)?,
            dataset_step: index(1)?,
            repetition: index(2)?,
        };
        let score = parse_decimal(&record[3]).ok_or_else(|| {
            Error::parse(
                line,
                format!("score must be a finite decimal number, got '{}'", &record[3]),
            )
        })?;
        rows.push((line, key, score));
    }
    if !saw_header {
        return Err(Error::parse(
            0,
            format!("empty input: expected header '{}'", DELIMITED_HEADER.join(",")),
        ));
    }
    assemble(rows, "auroc", range, None, None, |line| format!("line {line}"))
}

fn parse_structured(bytes: &[u8]) -> Result<MatrixDocument> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::parse(0, "empty input: expected a score-matrix document"));
    }
    let doc: StructuredMatrix = serde_json::from_slice(bytes).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let range = MetricRange::new(doc.metric_range[0], doc.metric_range[1])?;
    if let Some(l) = doc.lambda {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::invalid(format!(
                "lambda must be finite and non-negative, got {l}"
            )));
        }
    }
    for (i, r) in doc.scores.iter().enumerate() {
        if let Some(m) = &r.metric {
            if *m != doc.metric {
                return Err(Error::invalid(format!(
                    "score record #{i} has metric '{m}' but the document metric is '{}'",
                    doc.metric
                )));
            }
        }
    }
    let rows = doc
        .scores
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (
                i,
                CellKey {
                    model_step: r.model_step,
                    dataset_step: r.dataset_step,
                    repetition: r.repetition,
                },
                r.score,
            )
        })
        .collect();
    let matrix = assemble(
        rows,
        &doc.metric,
        range,
        Some(doc.num_steps),
        Some(doc.num_repetitions),
        |i| format!("score record #{i}"),
    )?;
    Ok(MatrixDocument {
        matrix,
        lambda: doc.lambda,
    })
}

/// Builds the matrix, naming rows by `locate` in error messages.
fn assemble(
    rows: Vec<(usize, CellKey, f64)>,
    metric: &str,
    range: MetricRange,
    num_steps: Option<usize>,
    num_repetitions: Option<usize>,
    locate: impl Fn(usize) -> String,
) -> Result<ScoreMatrix> {
    let steps = num_steps.unwrap_or_else(|| {
        rows.iter()
            .map(|(_, k, _)| k.model_step.max(k.dataset_step) + 1)
            .max()
            .unwrap_or(0)
    });
    let reps = num_repetitions.unwrap_or_else(|| rows.iter().map(|(_, k, _)| k.repetition + 1).max().unwrap_or(0));
    if steps == 0 || reps == 0 {
        return Err(Error::invalid("score matrix contains no scores"));
    }

    let mut seen: HashMap<CellKey, usize> = HashMap::with_capacity(rows.len());
    let mut builder = ScoreMatrix::builder(steps, reps).metric(metric).range(range);
    for (at, key, score) in rows {
        if let Some(first) = seen.insert(key, at) {
            return Err(Error::invalid(format!(
                "duplicate cell (model {}, dataset {}, repetition {}) at {} and {}",
                key.model_step,
                key.dataset_step,
                key.repetition,
                locate(first),
                locate(at)
            )));
        }
        builder
            .insert(key.model_step, key.dataset_step, key.repetition, score)
            .map_err(|e| Error::invalid(format!("{}: {e}", locate(at))))?;
    }
    Ok(builder.build())
}

/// Accepts plain decimal notation (optionally with an exponent); rejects
/// `inf`, `nan`, and locale forms such as `0,5`.
fn parse_decimal(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit());
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn write_score_matrix(matrix: &ScoreMatrix, format: MatrixFormat) -> Vec<u8> {
    write_matrix_document(
        &MatrixDocument {
            matrix: matrix.clone(),
            lambda: None,
        },
        format,
    )
}

/// Serializes a matrix. Output is byte-stable for equal inputs.
pub fn write_matrix_document(doc: &MatrixDocument, format: MatrixFormat) -> Vec<u8> {
    let matrix = &doc.matrix;
    match format {
        MatrixFormat::Delimited => {
            let mut out = String::with_capacity(24 * (matrix.len() + 1));
            out.push_str(&DELIMITED_HEADER.join(","));
            out.push('\n');
            for (k, s) in matrix.entries() {
                out.push_str(&format!("{},{},{},{}\n", k.model_step, k.dataset_step, k.repetition, s));
            }
            out.into_bytes()
        }
        MatrixFormat::Structured => {
            let body = StructuredMatrix {
                metric: matrix.metric().to_owned(),
                metric_range: [matrix.range().low, matrix.range().high],
                num_steps: matrix.num_steps(),
                num_repetitions: matrix.num_repetitions(),
                lambda: doc.lambda,
                scores: matrix
                    .entries()
                    .map(|(k, s)| ScoreRecord {
                        model_step: k.model_step,
                        dataset_step: k.dataset_step,
                        repetition: k.repetition,
                        score: s,
                        metric: None,
                    })
                    .collect(),
            };
            let mut out = serde_json::to_vec_pretty(&body).expect("matrix serializes");
            out.push(b'\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::learning;

    #[test]
    fn happy_path() {
        let m = parse_score_matrix(
            b"model_step,dataset_step,repetition,score\n0,0,0,0.6\n0,1,0,0.6\n1,1,0,0.8\n",
            MatrixFormat::Delimited,
        )
        .unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.num_steps(), 2);
        assert!((learning(&m, 1, 0).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn duplicate_rows_name_both_lines() {
        let err = parse_score_matrix(
            b"model_step,dataset_step,repetition,score\n0,0,0,0.6\n1,1,0,0.8\n0,0,0,0.7\n",
            MatrixFormat::Delimited,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("line 2") && err.contains("line 4"), "{err}");
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        let cases: [(&[u8], &str); 6] = [
            (b"", "line 0"),
            (b"\n\n", "line 0"),
            (b"model,dataset,rep,score\n", "line 1"),
            (
                b"model_step,dataset_step,repetition,score\n0,0,0,0.5\n0,1,x,0.5\n",
                "line 3",
            ),
            (b"model_step,dataset_step,repetition,score\n0,0,0\n", "line 2"),
            (b"model_step,dataset_step,repetition,score\n0,0,0,1.5\n", "line 2"),
        ];
        for (input, expected) in cases {
            let err = parse_score_matrix(input, MatrixFormat::Delimited)
                .unwrap_err()
                .to_string();
            assert!(err.contains(expected), "{err} should mention {expected}");
        }
    }

    #[test]
    fn locale_decimals_rejected() {
        for bad in ["\"0,5\"", "nan", "inf", "0.5%", ""] {
            let input = format!("model_step,dataset_step,repetition,score\n0,0,0,{bad}\n");
            assert!(
                parse_score_matrix(input.as_bytes(), MatrixFormat::Delimited).is_err(),
                "{bad}"
            );
        }
        let ok = b"model_step,dataset_step,repetition,score\n0,0,0,5e-1\n";
        assert_eq!(
            parse_score_matrix(ok, MatrixFormat::Delimited).unwrap().score(0, 0, 0),
            Some(0.5)
        );
    }

    #[test]
    fn structured_carries_metadata() {
        let mut b = ScoreMatrix::builder(3, 2)
            .metric("auroc")
            .range(MetricRange::new(-1.0, 1.0).unwrap());
        b.insert(0, 0, 1, -0.25).unwrap();
        let doc = MatrixDocument {
            matrix: b.build(),
            lambda: Some(0.25),
        };
        let bytes = write_matrix_document(&doc, MatrixFormat::Structured);
        assert_eq!(MatrixFormat::sniff(&bytes), MatrixFormat::Structured);
        assert_eq!(parse_matrix_document(&bytes, MatrixFormat::Structured).unwrap(), doc);
    }

    #[test]
    fn structured_errors() {
        let dup = br#"{"metric":"auroc","metric_range":[0,1],"num_steps":1,"num_repetitions":1,
            "scores":[{"model_step":0,"dataset_step":0,"repetition":0,"score":0.5},
                      {"model_step":0,"dataset_step":0,"repetition":0,"score":0.6}]}"#;
        let err = parse_score_matrix(dup, MatrixFormat::Structured)
            .unwrap_err()
            .to_string();
        assert!(err.contains("#0") && err.contains("#1"), "{err}");

        let wrong_metric = br#"{"metric":"auroc","metric_range":[0,1],"num_steps":1,"num_repetitions":1,
            "scores":[{"model_step":0,"dataset_step":0,"repetition":0,"score":0.5,"metric":"f1"}]}"#;
        assert!(parse_score_matrix(wrong_metric, MatrixFormat::Structured).is_err());

        let broken = b"{\n\"metric\": \"auroc\",\n oops }";
        match parse_score_matrix(broken, MatrixFormat::Structured).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }
}
