//! Same drift as `single_shift`, but only the bias may change after step 0.
//!
//! Learning stays below potential and performance decays.
//!
//! ```text
//! cargo run --release --example limited_plasticity
//! ```

use adaptive_eval::measurements::{measurement_series, Measurement};
use adaptive_eval::simulator::{preset, simulate, PresetName};

fn main() -> adaptive_eval::Result<()> {
    let full = measurement_series(&simulate(&preset(PresetName::SingleShift)?)?, 0.5, 0.95)?;
    let limited = measurement_series(&simulate(&preset(PresetName::SingleShiftLimited)?)?, 0.5, 0.95)?;

    println!("step  {:>22}  {:>22}", "full (perf / learn)", "limited (perf / learn)");
    for (f, l) in full.points.iter().zip(&limited.points) {
        let learn = |p: &adaptive_eval::measurements::MeasurementPoint| {
            p.learning
                .map(|e| format!("{:+.3}", e.mean))
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "{:>4}  {:>13.3} / {:>6}  {:>13.3} / {:>6}",
            f.step,
            f.performance.mean,
            learn(f),
            l.performance.mean,
            learn(l)
        );
    }
    let gaps: Vec<String> = limited
        .means(Measurement::Potential)
        .iter()
        .zip(limited.means(Measurement::Learning))
        .filter_map(|(p, l)| Some(format!("{:.3}", (*p)? - l?)))
        .collect();
    println!("\nlimited: potential − learning by step: {}", gaps.join(" "));
    Ok(())
}
