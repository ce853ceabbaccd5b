use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train_step, LinearModel, TrainingConfig};
use super::population::{sample_dataset, Dataset, Mixture, MixtureSchedule, PartitionSizes, Population};
use super::{derive_seed, repetition_seed};
use crate::error::{Error, Result};
use crate::measurements::{CellKey, ScoreMatrix};
use crate::metrics::{Auroc, PerformanceMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plasticity {
    /// Every parameter trains at every step.
    Full,
    /// After step 0 all weight components are frozen; only the bias trains.
    Limited,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub populations: Vec<Population>,
    pub schedule: MixtureSchedule,
    pub plasticity: Plasticity,
    pub partition_sizes: PartitionSizes,
    pub num_repetitions: usize,
    pub base_seed: u64,
    pub training: TrainingConfig,
    /// Draw each partition from one stream per population across steps, so a
    /// shrinking population keeps a subset of its earlier rows.
    pub reuse_samples: bool,
    /// Start every step from a fresh model instead of the previous step's.
    pub retrain_from_scratch: bool,
}

impl ScenarioConfig {
    pub fn num_steps(&self) -> usize {
        self.schedule.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_repetitions == 0 {
            return Err(Error::invalid("repetitions must be ≥ 1"));
        }
        let PartitionSizes {
            train,
            validation,
            test,
        } = self.partition_sizes;
        if train == 0 || validation == 0 || test == 0 {
            return Err(Error::invalid("partition sizes must be positive"));
        }
        let dim = match self.populations.first() {
            Some(p) => p.dim(),
            None => return Err(Error::invalid("scenario defines no populations")),
        };
        if let Some(p) = self.populations.iter().find(|p| p.dim() != dim) {
            return Err(Error::invalid(format!(
                "population {} has dimension {} but {} was expected",
                p.id(),
                p.dim(),
                dim
            )));
        }
        for (step, mixture) in self.schedule.steps().iter().enumerate() {
            for (id, _) in mixture.iter() {
                if !self.populations.iter().any(|p| p.id() == id) {
                    return Err(Error::invalid(format!(
                        "schedule step {step} names unknown population {id}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.populations[0].dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Partition {
    Train = 0,
    Validation = 1,
    Test = 2,
}

/// Everything one repetition produced.
#[derive(Debug, Clone)]
pub struct RepetitionRun {
    pub repetition: usize,
    /// Model after each step.
    pub models: Vec<LinearModel>,
    pub scores: Vec<(CellKey, f64)>,
}

fn partition_seed(config: &ScenarioConfig, rep_seed: u64, step: usize, partition: Partition) -> u64 {
    let seed = derive_seed(rep_seed, partition as u64);
    if config.reuse_samples {
        seed
    } else {
        derive_seed(seed, 1000 + step as u64)
    }
}

fn draw(config: &ScenarioConfig, mixture: &Mixture, per_class: usize, seed: u64) -> Result<Dataset> {
    sample_dataset(&config.populations, mixture, per_class, seed)
}

/// Runs every step of one repetition.
///
/// Step 0 trains from zeros; later steps continue from the previous model
/// (or from zeros with `retrain_from_scratch`). Model `v` is scored on the
/// test sets of steps `0..=v`, and model `v−1` on test set `v`.
pub fn run_scenario(config: &ScenarioConfig, repetition: usize) -> Result<RepetitionRun> {
    config.validate()?;
    let metric = Auroc;
    let rep_seed = repetition_seed(config.base_seed, repetition);
    let sizes = config.partition_sizes;

    let mut tests: Vec<Dataset> = Vec::with_capacity(config.num_steps());
    let mut models: Vec<LinearModel> = Vec::with_capacity(config.num_steps());
    let mut scores = Vec::new();

    for (step, mixture) in config.schedule.steps().iter().enumerate() {
        let train = draw(
            config,
            mixture,
            sizes.train,
            partition_seed(config, rep_seed, step, Partition::Train),
        )?;
        let validation = draw(
            config,
            mixture,
            sizes.validation,
            partition_seed(config, rep_seed, step, Partition::Validation),
        )?;
        tests.push(draw(
            config,
            mixture,
            sizes.test,
            partition_seed(config, rep_seed, step, Partition::Test),
        )?);

        let start = match (step, models.last()) {
            (0, _) | (_, None) => LinearModel::zeros(config.dim()),
            (_, Some(_)) if config.retrain_from_scratch => {
                let fresh = LinearModel::zeros(config.dim());
                match config.plasticity {
                    Plasticity::Full => fresh,
                    // A frozen fresh model could never learn; keep step 0's weights.
                    Plasticity::Limited => models[0].clone().freeze_weights(),
                }
            }
            (_, Some(prev)) => match config.plasticity {
                Plasticity::Full => prev.clone(),
                Plasticity::Limited => prev.clone().freeze_weights(),
            },
        };
        let epochs = if step == 0 {
            config.training.epochs
        } else {
            config.training.update_epochs
        };
        let model = train_step(
            &start,
            &train,
            &validation,
            config.training.learning_rate,
            epochs,
            config.training.l2,
        )?;

        let mut record = |model_step: usize, dataset_step: usize, m: &LinearModel| -> Result<()> {
            let s = metric.score(&m.predict(&tests[dataset_step])?)?;
            scores.push((
                CellKey {
                    model_step,
                    dataset_step,
                    repetition,
                },
                s,
            ));
            Ok(())
        };
        if step > 0 {
            record(step - 1, step, &models[step - 1])?;
        }
        for d in 0..=step {
            record(step, d, &model)?;
        }
        models.push(model);
    }

    Ok(RepetitionRun {
        repetition,
        models,
        scores,
    })
}

/// Runs all repetitions (in parallel) and assembles the score matrix.
pub fn simulate(config: &ScenarioConfig) -> Result<ScoreMatrix> {
    config.validate()?;
    let runs = (0..config.num_repetitions)
        .into_par_iter()
        .map(|r| run_scenario(config, r))
        .collect::<Result<Vec<_>>>()?;
    let metric = Auroc;
    let mut builder = ScoreMatrix::builder(config.num_steps(), config.num_repetitions)
        .metric(metric.name())
        .range(metric.range());
    for run in &runs {
        for (k, s) in &run.scores {
            builder.insert(k.model_step, k.dataset_step, k.repetition, *s)?;
        }
    }
    Ok(builder.build())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetName {
    SingleShift,
    SingleShiftLimited,
    DoubleShift,
}

impl PresetName {
    pub const ALL: [PresetName; 3] = [
        PresetName::SingleShift,
        PresetName::SingleShiftLimited,
        PresetName::DoubleShift,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::SingleShift => "single_shift",
            PresetName::SingleShiftLimited => "single_shift_limited",
            PresetName::DoubleShift => "double_shift",
        }
    }

    pub fn names() -> Vec<String> {
        Self::ALL.iter().map(|p| p.as_str().to_owned()).collect()
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == wanted)
            .ok_or_else(|| Error::UnknownScenario {
                name: s.to_owned(),
                valid: Self::names(),
            })
    }
}

/// How hard a newly introduced population is relative to the one it replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftDifficulty {
    /// Narrower class separation in the incoming population.
    #[default]
    Harder,
    /// Wider class separation in the incoming population.
    Easier,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetOptions {
    /// Fraction of the reference partition sizes (525 / 75 / 150 per class).
    pub scale: f64,
    pub num_repetitions: usize,
    pub base_seed: u64,
    pub difficulty: ShiftDifficulty,
}

pub const DEFAULT_SCALE: f64 = 0.2;
pub const DEFAULT_REPETITIONS: usize = 25;
pub const DEFAULT_SEED: u64 = 7;
pub const FEATURE_DIM: usize = 10;

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            scale: DEFAULT_SCALE,
            num_repetitions: DEFAULT_REPETITIONS,
            base_seed: DEFAULT_SEED,
            difficulty: ShiftDifficulty::default(),
        }
    }
}

/// Preset with default options.
pub fn preset(name: PresetName) -> Result<ScenarioConfig> {
    preset_with(name, PresetOptions::default())
}

/// Five-step (0–4) scenarios over synthetic populations.
///
/// - `single_shift`: A → B in equal 25% increments.
/// - `single_shift_limited`: the same schedule with weights frozen after step 0.
/// - `double_shift`: A → B over steps 0–2, then B → C over steps 2–4; B first
///   appears at step 1 and C at step 3.
pub fn preset_with(name: PresetName, options: PresetOptions) -> Result<ScenarioConfig> {
    let ramp = |from: &str, to: &str, f: f64| -> Result<Mixture> {
        if f == 0.0 {
            Ok(Mixture::single(from))
        } else if f == 1.0 {
            Ok(Mixture::single(to))
        } else {
            Mixture::new([(from, 1.0 - f), (to, f)])
        }
    };
    let single = || -> Result<MixtureSchedule> {
        MixtureSchedule::new(
            [0.0, 0.25, 0.5, 0.75, 1.0]
                .into_iter()
                .map(|f| ramp("A", "B", f))
                .collect::<Result<_>>()?,
        )
    };
    let (schedule, plasticity) = match name {
        PresetName::SingleShift => (single()?, Plasticity::Full),
        PresetName::SingleShiftLimited => (single()?, Plasticity::Limited),
        PresetName::DoubleShift => (
            MixtureSchedule::new(vec![
                ramp("A", "B", 0.0)?,
                ramp("A", "B", 0.5)?,
                ramp("A", "B", 1.0)?,
                ramp("B", "C", 0.5)?,
                ramp("B", "C", 1.0)?,
            ])?,
            Plasticity::Full,
        ),
    };

    let config = ScenarioConfig {
        name: name.as_str().to_owned(),
        populations: preset_populations(name, options.difficulty)?,
        schedule,
        plasticity,
        partition_sizes: PartitionSizes::REFERENCE.scaled(options.scale)?,
        num_repetitions: options.num_repetitions,
        base_seed: options.base_seed,
        training: TrainingConfig::default(),
        reuse_samples: true,
        retrain_from_scratch: false,
    };
    config.validate()?;
    Ok(config)
}

/// Populations in a 10-dimensional feature space.
///
/// Each population separates its classes along its own unit direction and
/// sits at its own center along an otherwise label-free axis. In the single
/// shift presets B's direction is close to A's (cosine 0.85), so the ramp is
/// gentle. The double shift uses a B at cosine 0.5 to A, and a C that overlaps
/// B even less, so each introduction is a visible jump.
fn preset_populations(name: PresetName, difficulty: ShiftDifficulty) -> Result<Vec<Population>> {
    const SEPARATION: f64 = 2.6;
    let incoming = SEPARATION
        * match difficulty {
            ShiftDifficulty::Harder => 0.9,
            ShiftDifficulty::Easier => 1.15,
        };
    let b_cosine: f64 = match name {
        PresetName::DoubleShift => 0.5,
        _ => 0.85,
    };
    let direction = |a: usize, ca: f64, b: usize, length: f64| {
        let mut v = vec![0.0; FEATURE_DIM];
        v[a] = ca * length;
        v[b] = (1.0 - ca * ca).sqrt() * length;
        v
    };
    let center = |axis: Option<usize>| {
        let mut v = vec![0.0; FEATURE_DIM];
        if let Some(i) = axis {
            v[i] = 1.5;
        }
        v
    };
    Ok(vec![
        Population::shifted_pair("A", &center(None), &direction(0, 1.0, 1, SEPARATION))?,
        Population::shifted_pair("B", &center(Some(5)), &direction(0, b_cosine, 1, incoming))?,
        Population::shifted_pair("C", &center(Some(6)), &direction(1, 0.4, 2, incoming))?,
    ])
}
