//! How the decay constant spreads retention across earlier datasets.
//!
//! ```text
//! cargo run --example retention_weights
//! ```

use adaptive_eval::measurements::{decay_weights, retention, ScoreMatrix};

fn main() -> adaptive_eval::Result<()> {
    let step = 4;
    for lambda in [0.0, 0.5, 1.0, 5.0] {
        let w = decay_weights(step, lambda)?;
        let cells: Vec<String> = w.weights().iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "λ = {lambda:<4} weights on datasets 0..{}: [{}]",
            step - 1,
            cells.join(", ")
        );
    }

    // Model 4 forgets older data progressively.
    let mut b = ScoreMatrix::builder(step + 1, 1);
    for (d, s) in [0.62, 0.70, 0.78, 0.85, 0.90].into_iter().enumerate() {
        b.insert(step, d, 0, s)?;
    }
    let m = b.build();
    println!();
    for lambda in [0.0, 0.5, 1.0, 5.0] {
        println!(
            "retention at step {step}, λ = {lambda:<4}: {:.4}",
            retention(&m, step, lambda, 0)?
        );
    }
    Ok(())
}
