//! Full-plasticity model while the data drifts from population A to B.
//!
//! ```text
//! cargo run --release --example single_shift
//! ```

use adaptive_eval::cli::summary_lines;
use adaptive_eval::io::{compute_report, write_score_matrix, ComputeOptions, MatrixFormat};
use adaptive_eval::simulator::{preset, simulate, PresetName};

fn main() -> adaptive_eval::Result<()> {
    let config = preset(PresetName::SingleShift)?;
    for (step, mix) in config.schedule.steps().iter().enumerate() {
        let parts: Vec<String> = mix.iter().map(|(id, f)| format!("{id} {:.0}%", f * 100.0)).collect();
        println!("step {step} data: {}", parts.join(", "));
    }
    let matrix = simulate(&config)?;
    let input = write_score_matrix(&matrix, MatrixFormat::Delimited);
    let report = compute_report(&input, &matrix, &ComputeOptions::default())?;
    println!();
    for line in summary_lines(&report) {
        println!("{line}");
    }
    Ok(())
}
