//! Synthetic population-shift scenarios.
//!
//! A scenario is a schedule of population mixtures over modification steps.
//! At each step class-balanced train / validation / test partitions are drawn,
//! a logistic-linear model is trained (continuing from the previous step), and
//! the cells of the cross-evaluation score matrix are filled in.
//!
//! Seeds: repetition `r` uses `derive_seed(base_seed, r)`, and every partition
//! and (population, class) stream below it is derived the same way, so
//! repetitions are independent and may run in any order.

mod model;
mod population;
mod scenario;

pub use model::{train_step, LinearModel, TrainingConfig};
pub use population::{sample_dataset, Dataset, Gaussian, Mixture, MixtureSchedule, PartitionSizes, Population};
pub use scenario::{
    preset, preset_with, run_scenario, simulate, Plasticity, PresetName, PresetOptions, RepetitionRun, ScenarioConfig,
    ShiftDifficulty, DEFAULT_REPETITIONS, DEFAULT_SCALE, DEFAULT_SEED, FEATURE_DIM,
};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `tag` under `parent`.
pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    splitmix64(parent ^ splitmix64(tag))
}

pub fn repetition_seed(base_seed: u64, repetition: usize) -> u64 {
    derive_seed(base_seed, repetition as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|r| repetition_seed(7, r)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 2), derive_seed(2, 1));
    }
}
