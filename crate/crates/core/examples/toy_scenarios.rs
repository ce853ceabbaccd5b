//! Two-step toy: the same performance gain read two ways.
//!
//! The old model scores 0.6 on the old data and the new model 0.8 on the new
//! data. Whether that gain is "learning" depends on how the old model does on
//! the new data.
//!
//! ```text
//! cargo run --example toy_scenarios
//! ```

use adaptive_eval::measurements::{learning, performance, potential, retention, ScoreMatrix, DEFAULT_LAMBDA};

fn toy(old_model_on_new_data: f64) -> adaptive_eval::Result<ScoreMatrix> {
    let mut b = ScoreMatrix::builder(2, 1);
    b.insert(0, 0, 0, 0.6)?
        .insert(1, 1, 0, 0.8)?
        .insert(0, 1, 0, old_model_on_new_data)?
        .insert(1, 0, 0, 0.7)?;
    Ok(b.build())
}

fn main() -> adaptive_eval::Result<()> {
    for (label, s01) in [("new data is easier", 0.8), ("model improved", 0.6)] {
        let m = toy(s01)?;
        let (l, p) = (learning(&m, 1, 0)?, potential(&m, 1, 0)?);
        let delta = performance(&m, 1, 0)? - performance(&m, 0, 0)?;
        println!("{label}: S(M0|D1) = {s01}");
        println!("  learning  {l:+.3}");
        println!("  potential {p:+.3}");
        println!("  retention {:.3}", retention(&m, 1, DEFAULT_LAMBDA, 0)?);
        println!(
            "  learning − potential = {:+.3} = performance change {delta:+.3}",
            l - p
        );
    }
    Ok(())
}
