//! AUROC of a prediction set, and confidence intervals over repetitions.
//!
//! ```text
//! cargo run --example auroc_intervals
//! ```

use adaptive_eval::metrics::{auroc, mean_ci, mean_ci_with, IntervalMethod, PredictionSet};

fn main() -> adaptive_eval::Result<()> {
    let preds = PredictionSet::from_indicators(&[1, 1, 0, 0, 1, 0], vec![0.9, 0.4, 0.4, 0.1, 0.7, 0.8])?;
    println!("AUROC with a tied pair: {:.4}", auroc(&preds)?);

    let per_repetition = [0.81, 0.84, 0.79, 0.86, 0.83, 0.80, 0.85, 0.82];
    let boot = mean_ci(&per_repetition, 0.95)?;
    let normal = mean_ci_with(&per_repetition, 0.95, IntervalMethod::Normal)?;
    println!("bootstrap: {:.4} [{:.4}, {:.4}]", boot.mean, boot.ci_low, boot.ci_high);
    println!(
        "normal:    {:.4} [{:.4}, {:.4}]",
        normal.mean, normal.ci_low, normal.ci_high
    );

    let single = mean_ci(&[0.8], 0.95)?;
    println!(
        "one repetition: {:?} (degenerate = {})",
        (single.ci_low, single.ci_high),
        single.degenerate
    );
    Ok(())
}
