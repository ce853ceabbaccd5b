//! Two population shifts (A → B → C) and the notes they trigger.
//!
//! ```text
//! cargo run --release --example double_shift
//! ```

use adaptive_eval::io::{compute_report, write_score_matrix, ComputeOptions, MatrixFormat};
use adaptive_eval::measurements::Measurement;
use adaptive_eval::simulator::{preset, simulate, PresetName};

fn main() -> adaptive_eval::Result<()> {
    let config = preset(PresetName::DoubleShift)?;
    let matrix = simulate(&config)?;
    let input = write_score_matrix(&matrix, MatrixFormat::Delimited);
    let report = compute_report(&input, &matrix, &ComputeOptions::default())?;

    for id in ["A", "B", "C"] {
        let share: Vec<String> = config
            .schedule
            .trajectory(id)
            .iter()
            .map(|f| format!("{f:.2}"))
            .collect();
        println!("population {id} share by step: {}", share.join(" "));
    }
    println!();
    for p in &report.series.points {
        if let Some(e) = p.get(Measurement::Potential) {
            println!(
                "step {} potential {:+.4} [{:+.4}, {:+.4}]",
                p.step, e.mean, e.ci_low, e.ci_high
            );
        }
    }
    println!();
    for n in &report.notes {
        println!("step {} {}: {}", n.step, n.rule, n.message);
    }
    Ok(())
}
