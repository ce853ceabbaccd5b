//! Reading and writing score matrices and reports.
//!
//! ```text
//! cargo run --example file_formats
//! ```

use adaptive_eval::io::{
    compute_report, parse_report, parse_score_matrix, write_report, write_score_matrix, ComputeOptions, MatrixFormat,
    ReportFormat,
};

const SCORES: &str = "\
model_step,dataset_step,repetition,score
0,0,0,0.71
0,1,0,0.69
1,0,0,0.70
1,1,0,0.75
0,0,1,0.73
0,1,1,0.70
1,0,1,0.72
1,1,1,0.76
";

fn main() -> adaptive_eval::Result<()> {
    let matrix = parse_score_matrix(SCORES.as_bytes(), MatrixFormat::Delimited)?;
    let json = write_score_matrix(&matrix, MatrixFormat::Structured);
    assert_eq!(parse_score_matrix(&json, MatrixFormat::Structured)?, matrix);
    let text = String::from_utf8_lossy(&json);
    println!("structured matrix ({} bytes), first lines:", json.len());
    for line in text.lines().take(8) {
        println!("  {line}");
    }

    let report = compute_report(SCORES.as_bytes(), &matrix, &ComputeOptions::default())?;
    let structured = write_report(&report, ReportFormat::Structured);
    assert_eq!(parse_report(&structured)?, report);
    println!("input digest {}", report.provenance.input_sha256);
    for w in report.warnings() {
        println!("warning at step {}: {}", w.step, w.message);
    }
    println!(
        "\nwide table:\n{}",
        String::from_utf8_lossy(&write_report(&report, ReportFormat::Delimited))
    );
    println!(
        "plot rows:\n{}",
        String::from_utf8_lossy(&write_report(&report, ReportFormat::PlotSeries))
    );

    // A missing cell is reported precisely.
    let gap = "model_step,dataset_step,repetition,score\n0,0,0,0.7\n1,1,0,0.8\n1,0,0,0.6\n";
    let err = compute_report(
        gap.as_bytes(),
        &parse_score_matrix(gap.as_bytes(), MatrixFormat::Delimited)?,
        &ComputeOptions::default(),
    )
    .unwrap_err();
    println!("{err}");
    Ok(())
}
