//! Score-matrix and report file formats, plus the interpretation rules.
//!
//! Score matrices come in two layouts:
//!
//! ```text
//! model_step,dataset_step,repetition,score
//! 0,0,0,0.91
//! 0,1,0,0.88
//! ```
//!
//! and a JSON document carrying the metric name and range. Reports can be
//! written as JSON, as a wide per-step CSV, or as long plot-ready rows.

mod interpret;
mod matrix;
mod report;

pub use interpret::{interpret, InterpretationNote, InterpretationThresholds, NoteRule};
pub use matrix::{
    parse_delimited, parse_matrix_document, parse_score_matrix, write_matrix_document, write_score_matrix,
    MatrixDocument, MatrixFormat, ScoreRecord, DELIMITED_HEADER,
};
pub use report::{
    compute_report, parse_report, sha256_hex, write_report, ComputeOptions, Provenance, Report, ReportFormat,
    TOOL_VERSION,
};
