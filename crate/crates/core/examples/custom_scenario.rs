//! Building a scenario by hand: three populations, a custom schedule, and an
//! easier incoming population.
//!
//! ```text
//! cargo run --release --example custom_scenario
//! ```

use adaptive_eval::measurements::measurement_series;
use adaptive_eval::simulator::{
    simulate, Mixture, MixtureSchedule, PartitionSizes, Plasticity, Population, ScenarioConfig, TrainingConfig,
};

fn main() -> adaptive_eval::Result<()> {
    let dim = 4;
    let axis = |i: usize, v: f64| {
        let mut x = vec![0.0; dim];
        x[i] = v;
        x
    };
    let populations = vec![
        Population::shifted_pair("clinic", &axis(2, 1.0), &axis(0, 2.0))?,
        Population::shifted_pair("outreach", &axis(3, 1.0), &axis(1, 3.0))?,
    ];
    let schedule = MixtureSchedule::new(vec![
        Mixture::single("clinic"),
        Mixture::new([("clinic", 0.8), ("outreach", 0.2)])?,
        Mixture::new([("clinic", 0.5), ("outreach", 0.5)])?,
        Mixture::new([("clinic", 0.5), ("outreach", 0.5)])?,
    ])?;
    let config = ScenarioConfig {
        name: "clinic_to_outreach".into(),
        populations,
        schedule,
        plasticity: Plasticity::Full,
        partition_sizes: PartitionSizes::REFERENCE.scaled(0.2)?,
        num_repetitions: 10,
        base_seed: 42,
        training: TrainingConfig::default(),
        reuse_samples: true,
        retrain_from_scratch: false,
    };
    let series = measurement_series(&simulate(&config)?, 0.5, 0.95)?;
    println!(
        "{}: {} steps, {} repetitions",
        config.name,
        config.num_steps(),
        config.num_repetitions
    );
    for p in &series.points {
        let fmt = |e: Option<adaptive_eval::measurements::Estimate>| {
            e.map(|e| format!("{:+.3}", e.mean)).unwrap_or_else(|| "   -  ".into())
        };
        println!(
            "step {}  performance {:.3}  learning {}  potential {}  retention {}",
            p.step,
            p.performance.mean,
            fmt(p.learning),
            fmt(p.potential),
            p.retention
                .map(|e| format!("{:.3}", e.mean))
                .unwrap_or_else(|| "  -  ".into())
        );
    }
    Ok(())
}
