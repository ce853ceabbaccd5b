//! Cross-evaluation score matrix and the learning / potential / retention
//! measurements derived from it.
//!
//! `S(M_v | D_w)` is the score of the model from modification step `v` on the
//! evaluation dataset from step `w`. For a step `V ≥ 1`:
//!
//! - learning  = `S(M_V|D_V) − S(M_{V−1}|D_V)`
//! - potential = `S(M_{V−1}|D_{V−1}) − S(M_{V−1}|D_V)`
//! - retention = `Σ_{v<V} S(M_V|D_v) · W((V−1)−v)` with `W(t) ∝ e^{−λt}`
//!   normalized over `v = 0..V−1`.
//!
//! Together these satisfy `learning − potential = S(M_V|D_V) − S(M_{V−1}|D_{V−1})`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{mean_ci_with, IntervalEstimate, IntervalMethod};

pub const DEFAULT_LAMBDA: f64 = 0.5;

/// Closed interval of attainable metric values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRange {
    pub low: f64,
    pub high: f64,
}

impl MetricRange {
    pub const UNIT: MetricRange = MetricRange { low: 0.0, high: 1.0 };

    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::invalid(format!(
                "metric range [{low}, {high}] must be finite with low < high"
            )));
        }
        Ok(Self { low, high })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.low && x <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

impl Default for MetricRange {
    fn default() -> Self {
        Self::UNIT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub model_step: usize,
    pub dataset_step: usize,
    pub repetition: usize,
}

/// Scores of every evaluated (model step, dataset step, repetition) triple.
///
/// Storage is sparse: only the cells a measurement needs have to be present,
/// and completeness is checked per measurement. Build with
/// [`ScoreMatrixBuilder`]; the matrix is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    num_steps: usize,
    num_repetitions: usize,
    metric: String,
    range: MetricRange,
    entries: BTreeMap<CellKey, f64>,
}

impl ScoreMatrix {
    pub fn builder(num_steps: usize, num_repetitions: usize) -> ScoreMatrixBuilder {
        ScoreMatrixBuilder::new(num_steps, num_repetitions)
    }

    /// Number of modification steps including step 0 (so the last step is `num_steps − 1`).
    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn last_step(&self) -> usize {
        self.num_steps - 1
    }

    pub fn num_repetitions(&self) -> usize {
        self.num_repetitions
    }

    pub fn metric(&self) -> &str {
        &self.metric
    }

    pub fn range(&self) -> MetricRange {
        self.range
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score(&self, model_step: usize, dataset_step: usize, repetition: usize) -> Option<f64> {
        self.entries
            .get(&CellKey {
                model_step,
                dataset_step,
                repetition,
            })
            .copied()
    }

    /// Entries in (model, dataset, repetition) order.
    pub fn entries(&self) -> impl Iterator<Item = (CellKey, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Returns a copy with every score mapped through `f`, in a new metric range.
    pub fn map_scores(&self, range: MetricRange, f: impl Fn(f64) -> f64) -> Result<ScoreMatrix> {
        let mut b = ScoreMatrixBuilder::new(self.num_steps, self.num_repetitions)
            .metric(self.metric.clone())
            .range(range);
        for (k, s) in self.entries() {
            b.insert(k.model_step, k.dataset_step, k.repetition, f(s))?;
        }
        Ok(b.build())
    }

    fn check_step(&self, step: usize) -> Result<()> {
        if step >= self.num_steps {
            return Err(Error::StepOutOfRange {
                step,
                num_steps: self.num_steps,
            });
        }
        Ok(())
    }

    fn check_repetition(&self, repetition: usize) -> Result<()> {
        if repetition >= self.num_repetitions {
            return Err(Error::RepetitionOutOfRange {
                repetition,
                num_repetitions: self.num_repetitions,
            });
        }
        Ok(())
    }

    fn gaps_for(&self, measurement: Measurement, step: usize, reps: &[usize]) -> Vec<Gap> {
        measurement
            .required_cells(step)
            .into_iter()
            .filter_map(|(model_step, dataset_step)| {
                let missing: Vec<usize> = reps
                    .iter()
                    .copied()
                    .filter(|&r| self.score(model_step, dataset_step, r).is_none())
                    .collect();
                (!missing.is_empty()).then_some(Gap {
                    step,
                    measurement,
                    model_step,
                    dataset_step,
                    repetitions: missing,
                })
            })
            .collect()
    }

    /// Cells missing for `measurement` at `step`, across all repetitions.
    pub fn missing_cells(&self, measurement: Measurement, step: usize) -> Vec<Gap> {
        let reps: Vec<usize> = (0..self.num_repetitions).collect();
        self.gaps_for(measurement, step, &reps)
    }

    fn supports(&self, measurement: Measurement, step: usize) -> bool {
        step < self.num_steps
            && (measurement == Measurement::Performance || step >= 1)
            && self.missing_cells(measurement, step).is_empty()
    }

    pub fn supports_performance(&self, step: usize) -> bool {
        self.supports(Measurement::Performance, step)
    }

    /// `(V, V)` and `(V−1, V)` present for every repetition.
    pub fn supports_learning(&self, step: usize) -> bool {
        self.supports(Measurement::Learning, step)
    }

    /// `(V−1, V−1)` and `(V−1, V)` present for every repetition.
    pub fn supports_potential(&self, step: usize) -> bool {
        self.supports(Measurement::Potential, step)
    }

    /// `(V, v)` present for every `v < V` and every repetition.
    pub fn supports_retention(&self, step: usize) -> bool {
        self.supports(Measurement::Retention, step)
    }

    /// Every gap that would stop a full measurement series from being computed.
    pub fn completeness(&self) -> CompletenessReport {
        let mut gaps = Vec::new();
        for step in 0..self.num_steps {
            for m in Measurement::applicable(step) {
                gaps.extend(self.missing_cells(*m, step));
            }
        }
        CompletenessReport { gaps }
    }

    fn require(&self, measurement: Measurement, step: usize, repetition: usize) -> Result<()> {
        if step == 0 && measurement != Measurement::Performance {
            return Err(Error::InitialStep {
                measurement: measurement.name(),
            });
        }
        self.check_step(step)?;
        self.check_repetition(repetition)?;
        let gaps = self.gaps_for(measurement, step, &[repetition]);
        if gaps.is_empty() {
            Ok(())
        } else {
            Err(Error::Incomplete(CompletenessReport { gaps }))
        }
    }

    // Only called after `require` succeeded.
    fn cell(&self, model_step: usize, dataset_step: usize, repetition: usize) -> f64 {
        self.score(model_step, dataset_step, repetition)
            .expect("cell presence checked by require")
    }
}

#[derive(Debug, Clone)]
pub struct ScoreMatrixBuilder {
    matrix: ScoreMatrix,
}

impl ScoreMatrixBuilder {
    pub fn new(num_steps: usize, num_repetitions: usize) -> Self {
        Self {
            matrix: ScoreMatrix {
                num_steps,
                num_repetitions,
                metric: "auroc".to_owned(),
                range: MetricRange::UNIT,
                entries: BTreeMap::new(),
            },
        }
    }

    pub fn metric(mut self, name: impl Into<String>) -> Self {
        self.matrix.metric = name.into();
        self
    }

    /// Sets the metric range. Must be called before inserting scores.
    pub fn range(mut self, range: MetricRange) -> Self {
        self.matrix.range = range;
        self
    }

    pub fn insert(
        &mut self,
        model_step: usize,
        dataset_step: usize,
        repetition: usize,
        score: f64,
    ) -> Result<&mut Self> {
        let m = &mut self.matrix;
        if m.num_steps == 0 {
            return Err(Error::invalid("a score matrix needs at least one step"));
        }
        if m.num_repetitions == 0 {
            return Err(Error::invalid("repetitions must be ≥ 1"));
        }
        m.check_step(model_step)?;
        m.check_step(dataset_step)?;
        m.check_repetition(repetition)?;
        if !m.range.contains(score) {
            return Err(Error::ScoreOutOfRange {
                model_step,
                dataset_step,
                repetition,
                score,
                low: m.range.low,
                high: m.range.high,
            });
        }
        let key = CellKey {
            model_step,
            dataset_step,
            repetition,
        };
        if m.entries.insert(key, score).is_some() {
            return Err(Error::DuplicateCell {
                model_step,
                dataset_step,
                repetition,
            });
        }
        Ok(self)
    }

    pub fn build(self) -> ScoreMatrix {
        self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    Performance,
    Learning,
    Potential,
    Retention,
}

impl Measurement {
    pub const ALL: [Measurement; 4] = [
        Measurement::Performance,
        Measurement::Learning,
        Measurement::Potential,
        Measurement::Retention,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measurement::Performance => "performance",
            Measurement::Learning => "learning",
            Measurement::Potential => "potential",
            Measurement::Retention => "retention",
        }
    }

    pub fn applicable(step: usize) -> &'static [Measurement] {
        if step == 0 {
            &Self::ALL[..1]
        } else {
            &Self::ALL
        }
    }

    /// (model_step, dataset_step) cells this measurement reads at `step`.
    pub fn required_cells(self, step: usize) -> Vec<(usize, usize)> {
        match (self, step) {
            (Measurement::Performance, v) => vec![(v, v)],
            (_, 0) => Vec::new(),
            (Measurement::Learning, v) => vec![(v - 1, v), (v, v)],
            (Measurement::Potential, v) => vec![(v - 1, v - 1), (v - 1, v)],
            (Measurement::Retention, v) => (0..v).map(|d| (v, d)).collect(),
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One missing (model_step, dataset_step) cell needed by a measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    pub step: usize,
    pub measurement: Measurement,
    pub model_step: usize,
    pub dataset_step: usize,
    pub repetitions: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompletenessReport {
    pub gaps: Vec<Gap>,
}

impl CompletenessReport {
    pub fn is_complete(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Distinct missing (model_step, dataset_step) cells.
    pub fn missing_cells(&self) -> BTreeSet<(usize, usize)> {
        self.gaps.iter().map(|g| (g.model_step, g.dataset_step)).collect()
    }
}

impl fmt::Display for CompletenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gaps.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "step {}: {} needs cell (model_step={}, dataset_step={}), missing for repetition(s) {}",
                g.step,
                g.measurement,
                g.model_step,
                g.dataset_step,
                format_reps(&g.repetitions)
            )?;
        }
        Ok(())
    }
}

fn format_reps(reps: &[usize]) -> String {
    const SHOWN: usize = 8;
    let mut s = reps
        .iter()
        .take(SHOWN)
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    if reps.len() > SHOWN {
        s.push_str(&format!(",… ({} total)", reps.len()));
    }
    s
}

/// Normalized exponential decay weights over prior dataset steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayWeights {
    lambda: f64,
    weights: Vec<f64>,
}

impl DecayWeights {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Weight for prior dataset step `v`, indexed `0..V`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }
}

/// Weights for the `step` prior datasets `0..step`.
///
/// Dataset `v` is `t = (step−1) − v` steps old and gets `e^{−λt}`, normalized so
/// the weights sum to 1. Very large `λ` can underflow the oldest weights to 0.
pub fn decay_weights(step: usize, lambda: f64) -> Result<DecayWeights> {
    if step == 0 {
        return Err(Error::NoPriorSteps);
    }
    validate_lambda(lambda)?;
    let raw: Vec<f64> = (0..step).map(|v| (-lambda * ((step - 1 - v) as f64)).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(DecayWeights {
        lambda,
        weights: raw.into_iter().map(|w| w / total).collect(),
    })
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    Ok(())
}

/// `S(M_V | D_V)`.
pub fn performance(matrix: &ScoreMatrix, step: usize, repetition: usize) -> Result<f64> {
    matrix.require(Measurement::Performance, step, repetition)?;
    Ok(matrix.cell(step, step, repetition))
}

/// Change attributable to the model update, on the current dataset.
pub fn learning(matrix: &ScoreMatrix, step: usize, repetition: usize) -> Result<f64> {
    matrix.require(Measurement::Learning, step, repetition)?;
    Ok(matrix.cell(step, step, repetition) - matrix.cell(step - 1, step, repetition))
}

/// Change attributable to the dataset update, seen by the previous model.
/// Positive when the new dataset is harder for that model.
pub fn potential(matrix: &ScoreMatrix, step: usize, repetition: usize) -> Result<f64> {
    matrix.require(Measurement::Potential, step, repetition)?;
    Ok(matrix.cell(step - 1, step - 1, repetition) - matrix.cell(step - 1, step, repetition))
}

/// Decay-weighted score of model `step` on all prior datasets.
pub fn retention(matrix: &ScoreMatrix, step: usize, lambda: f64, repetition: usize) -> Result<f64> {
    validate_lambda(lambda)?;
    matrix.require(Measurement::Retention, step, repetition)?;
    let weights = decay_weights(step, lambda)?;
    let scores: Vec<f64> = (0..step).map(|v| matrix.cell(step, v, repetition)).collect();
    let value: f64 = scores.iter().zip(weights.weights()).map(|(s, w)| s * w).sum();
    // A convex combination; rounding must not push it past the extreme inputs.
    let (lo, hi) = scores.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
        (lo.min(s), hi.max(s))
    });
    Ok(value.clamp(lo, hi))
}

/// Aggregated value of one measurement at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    #[serde(rename = "lo")]
    pub ci_low: f64,
    #[serde(rename = "hi")]
    pub ci_high: f64,
}

impl Estimate {
    pub fn width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    /// True when the two intervals share at least one point.
    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

impl From<IntervalEstimate> for Estimate {
    fn from(e: IntervalEstimate) -> Self {
        Self {
            mean: e.mean,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPoint {
    pub step: usize,
    pub performance: Estimate,
    pub learning: Option<Estimate>,
    pub potential: Option<Estimate>,
    pub retention: Option<Estimate>,
}

impl MeasurementPoint {
    pub fn get(&self, m: Measurement) -> Option<&Estimate> {
        match m {
            Measurement::Performance => Some(&self.performance),
            Measurement::Learning => self.learning.as_ref(),
            Measurement::Potential => self.potential.as_ref(),
            Measurement::Retention => self.retention.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub step: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    pub points: Vec<MeasurementPoint>,
    pub lambda: f64,
    pub metric_name: String,
    pub warnings: Vec<Warning>,
}

impl MeasurementSeries {
    pub fn point(&self, step: usize) -> Option<&MeasurementPoint> {
        self.points.get(step)
    }

    /// Means of one measurement, `None` where it does not apply.
    pub fn means(&self, m: Measurement) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.get(m).map(|e| e.mean)).collect()
    }
}

/// Measurement series with the default bootstrap interval.
pub fn measurement_series(matrix: &ScoreMatrix, lambda: f64, confidence: f64) -> Result<MeasurementSeries> {
    measurement_series_with(matrix, lambda, confidence, IntervalMethod::default())
}

pub fn measurement_series_with(
    matrix: &ScoreMatrix,
    lambda: f64,
    confidence: f64,
    method: IntervalMethod,
) -> Result<MeasurementSeries> {
    validate_lambda(lambda)?;
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    if matrix.num_steps() == 0 || matrix.num_repetitions() == 0 {
        return Err(Error::invalid("score matrix has no steps or no repetitions"));
    }
    let report = matrix.completeness();
    if !report.is_complete() {
        return Err(Error::Incomplete(report));
    }

    let reps = 0..matrix.num_repetitions();
    let summarize = |values: Vec<f64>| -> Result<Estimate> { Ok(mean_ci_with(&values, confidence, method)?.into()) };
    let collect = |f: &dyn Fn(usize) -> Result<f64>| -> Result<Estimate> {
        summarize(reps.clone().map(f).collect::<Result<Vec<_>>>()?)
    };

    let mut points = Vec::with_capacity(matrix.num_steps());
    let mut warnings = Vec::new();
    for step in 0..matrix.num_steps() {
        let performance = collect(&|r| performance(matrix, step, r))?;
        let (learning, potential, retention) = if step == 0 {
            (None, None, None)
        } else {
            (
                Some(collect(&|r| learning(matrix, step, r))?),
                Some(collect(&|r| potential(matrix, step, r))?),
                Some(collect(&|r| retention(matrix, step, lambda, r))?),
            )
        };
        if matrix.num_repetitions() == 1 {
            warnings.push(Warning {
                step,
                message: "single repetition: confidence intervals are degenerate".to_owned(),
            });
        }
        points.push(MeasurementPoint {
            step,
            performance,
            learning,
            potential,
            retention,
        });
    }

    Ok(MeasurementSeries {
        points,
        lambda,
        metric_name: matrix.metric().to_owned(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_step(s00: f64, s01: f64, s11: f64, s10: Option<f64>) -> ScoreMatrix {
        let mut b = ScoreMatrix::builder(2, 1);
        b.insert(0, 0, 0, s00).unwrap();
        b.insert(0, 1, 0, s01).unwrap();
        b.insert(1, 1, 0, s11).unwrap();
        if let Some(s) = s10 {
            b.insert(1, 0, 0, s).unwrap();
        }
        b.build()
    }

    #[test]
    fn toy_scenarios_a_and_b() {
        // A: dataset got easier, model unchanged in skill.
        let a = two_step(0.6, 0.8, 0.8, None);
        assert!((learning(&a, 1, 0).unwrap() - 0.0).abs() < 1e-12);
        assert!((potential(&a, 1, 0).unwrap() + 0.2).abs() < 1e-12);
        // B: same dataset difficulty, model improved.
        let b = two_step(0.6, 0.6, 0.8, None);
        assert!((learning(&b, 1, 0).unwrap() - 0.2).abs() < 1e-12);
        assert!((potential(&b, 1, 0).unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn decay_weights_closed_forms() {
        assert_eq!(decay_weights(1, 0.5).unwrap().weights(), &[1.0]);
        for w in decay_weights(3, 0.0).unwrap().weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
        // e^{-0.5} = 0.6065306597126334; / (1 + e^{-0.5}) = 0.37754066879814546
        let w = decay_weights(2, 0.5).unwrap();
        assert!((w.weights()[0] - 0.37754066879814546).abs() < 1e-15);
        assert!((w.weights()[1] - 0.6224593312018546).abs() < 1e-15);
    }

    #[test]
    fn decay_weights_errors() {
        assert!(matches!(decay_weights(0, 0.5), Err(Error::NoPriorSteps)));
        assert!(decay_weights(2, -0.1).is_err());
        assert!(decay_weights(2, f64::NAN).is_err());
        assert!(decay_weights(2, f64::INFINITY).is_err());
    }

    #[test]
    fn large_lambda_concentrates_on_latest() {
        for v in 1..=10 {
            let w = decay_weights(v, 50.0).unwrap();
            assert!(w.weights()[v - 1] > 1.0 - 1e-6);
        }
    }

    #[test]
    fn retention_examples() {
        let m = two_step(0.6, 0.6, 0.8, Some(0.7));
        assert_eq!(retention(&m, 1, 0.5, 0).unwrap(), 0.7);

        let mut b = ScoreMatrix::builder(3, 1);
        b.insert(2, 0, 0, 0.6).unwrap();
        b.insert(2, 1, 0, 0.8).unwrap();
        assert!((retention(&b.clone().build(), 2, 0.0, 0).unwrap() - 0.7).abs() < 1e-15);

        // Hand evaluation: weights ∝ (e^{-1}, e^{-0.5}, 1) on scores (0.5, 0.6, 0.9).
        let mut b = ScoreMatrix::builder(4, 1);
        for (d, s) in [0.5, 0.6, 0.9].into_iter().enumerate() {
            b.insert(3, d, 0, s).unwrap();
        }
        let (e1, e05): (f64, f64) = (0.36787944117144233, 0.6065306597126334);
        let expected = (0.5 * e1 + 0.6 * e05 + 0.9) / (e1 + e05 + 1.0);
        // = 0.7333117449941114
        assert!((expected - 0.7333117449941114).abs() < 1e-15);
        assert!((retention(&b.build(), 3, 0.5, 0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn initial_step_always_errors() {
        let m = two_step(0.6, 0.6, 0.8, Some(0.7));
        assert!(matches!(learning(&m, 0, 0), Err(Error::InitialStep { .. })));
        assert!(matches!(potential(&m, 0, 0), Err(Error::InitialStep { .. })));
        assert!(matches!(retention(&m, 0, 0.5, 0), Err(Error::InitialStep { .. })));
        assert_eq!(performance(&m, 0, 0).unwrap(), 0.6);
    }

    #[test]
    fn missing_cells_are_named() {
        let mut b = ScoreMatrix::builder(3, 1);
        b.insert(0, 0, 0, 0.6).unwrap();
        b.insert(1, 1, 0, 0.7).unwrap();
        let m = b.build();
        let err = learning(&m, 1, 0).unwrap_err();
        assert!(err.to_string().contains("(model_step=0, dataset_step=1)"), "{err}");
        match retention(&m, 2, 0.5, 0).unwrap_err() {
            Error::Incomplete(r) => {
                assert_eq!(r.missing_cells().into_iter().collect::<Vec<_>>(), vec![(2, 0), (2, 1)])
            }
            e => panic!("unexpected {e}"),
        }
        assert!(!m.supports_learning(1));
        assert!(!m.supports_retention(1));
        assert!(m.supports_performance(1));
        assert!(!m.supports_learning(0));
    }

    #[test]
    fn builder_rejects_bad_cells() {
        let mut b = ScoreMatrix::builder(2, 1);
        b.insert(0, 0, 0, 0.5).unwrap();
        assert!(matches!(b.insert(0, 0, 0, 0.6), Err(Error::DuplicateCell { .. })));
        assert!(matches!(b.insert(1, 0, 0, 1.2), Err(Error::ScoreOutOfRange { .. })));
        assert!(matches!(b.insert(2, 0, 0, 0.5), Err(Error::StepOutOfRange { .. })));
        assert!(matches!(
            b.insert(0, 1, 1, 0.5),
            Err(Error::RepetitionOutOfRange { .. })
        ));
    }

    fn constant_matrix(steps: usize, reps: usize, value: f64) -> ScoreMatrix {
        let mut b = ScoreMatrix::builder(steps, reps);
        for r in 0..reps {
            for m in 0..steps {
                for d in 0..=(m + 1).min(steps - 1) {
                    b.insert(m, d, r, value).unwrap();
                }
            }
        }
        b.build()
    }

    #[test]
    fn constant_matrix_series() {
        let s = measurement_series(&constant_matrix(5, 4, 0.75), 0.5, 0.95).unwrap();
        assert_eq!(s.points.len(), 5);
        assert!(s.warnings.is_empty());
        for p in &s.points {
            assert_eq!(
                p.performance,
                Estimate {
                    mean: 0.75,
                    ci_low: 0.75,
                    ci_high: 0.75
                }
            );
            if p.step == 0 {
                assert!(p.learning.is_none() && p.potential.is_none() && p.retention.is_none());
            } else {
                assert_eq!(p.learning.unwrap().mean, 0.0);
                assert_eq!(p.potential.unwrap().mean, 0.0);
                assert_eq!(p.retention.unwrap().mean, 0.75);
            }
        }
    }

    #[test]
    fn single_repetition_series_warns() {
        let s = measurement_series(&two_step(0.6, 0.6, 0.8, Some(0.7)), 0.5, 0.95).unwrap();
        let l = s.points[1].learning.unwrap();
        assert!((l.mean - 0.2).abs() < 1e-12);
        assert_eq!(l.width(), 0.0);
        assert_eq!(s.warnings.len(), 2);
        assert_eq!(s.warnings[1].step, 1);
    }

    #[test]
    fn incomplete_series_reports_every_gap() {
        let m = two_step(0.6, 0.6, 0.8, None);
        match measurement_series(&m, 0.5, 0.95).unwrap_err() {
            Error::Incomplete(r) => {
                assert_eq!(r.gaps.len(), 1);
                assert_eq!((r.gaps[0].model_step, r.gaps[0].dataset_step), (1, 0));
                assert_eq!(r.gaps[0].measurement, Measurement::Retention);
            }
            e => panic!("unexpected {e}"),
        }
    }
}
