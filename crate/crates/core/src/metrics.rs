//! Performance metric and repeated-measurement summaries.
//!
//! The metric shipped here is AUROC, computed with the rank-sum (Mann–Whitney)
//! formulation. Repeated measurements are summarized as a mean with a
//! percentile-bootstrap confidence interval, or optionally a normal
//! approximation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::measurements::MetricRange;

/// Binary labels with continuous scores (higher means more likely positive).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    labels: Vec<bool>,
    scores: Vec<f64>,
}

impl PredictionSet {
    pub fn new(labels: Vec<bool>, scores: Vec<f64>) -> Result<Self> {
        if labels.len() != scores.len() {
            return Err(Error::invalid(format!(
                "{} labels but {} scores",
                labels.len(),
                scores.len()
            )));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!(
                "score at index {i} is not finite ({})",
                scores[i]
            )));
        }
        Ok(Self { labels, scores })
    }

    /// Builds from 0/1 class indicators.
    pub fn from_indicators(labels: &[u8], scores: Vec<f64>) -> Result<Self> {
        let labels = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| match l {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::invalid(format!(
                    "label at index {i} must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, scores)
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_positive(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }
}

/// A scalar performance metric S computed from predictions.
pub trait PerformanceMetric: Send + Sync {
    fn name(&self) -> &str;
    fn range(&self) -> MetricRange;
    fn score(&self, preds: &PredictionSet) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Auroc;

impl PerformanceMetric for Auroc {
    fn name(&self) -> &str {
        "auroc"
    }

    fn range(&self) -> MetricRange {
        MetricRange::UNIT
    }

    fn score(&self, preds: &PredictionSet) -> Result<f64> {
        auroc(preds)
    }
}

/// Area under the ROC curve, ties credited one half.
///
/// Computed from the rank sum of the positives using mid-ranks for tied
/// scores, so the result equals the pairwise Mann–Whitney fraction exactly.
pub fn auroc(preds: &PredictionSet) -> Result<f64> {
    let n = preds.len();
    let n_pos = preds.num_positive();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| preds.scores[a].total_cmp(&preds.scores[b]));

    // Ranks are 1-based; a tie group spanning ranks [i+1, j] gets (i+1+j)/2.
    // Twice the rank sum keeps everything integral.
    let mut twice_rank_sum: u64 = 0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && preds.scores[order[j]] == preds.scores[order[i]] {
            j += 1;
        }
        let twice_mid_rank = (i + 1 + j) as u64;
        let positives_in_group = order[i..j].iter().filter(|&&k| preds.labels[k]).count() as u64;
        twice_rank_sum += twice_mid_rank * positives_in_group;
        i = j;
    }

    let n_pos = n_pos as u64;
    let twice_u = twice_rank_sum - n_pos * (n_pos + 1);
    Ok(twice_u as f64 / 2.0 / (n_pos * n_neg as u64) as f64)
}

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_RESAMPLES: usize = 2000;
pub const DEFAULT_BOOTSTRAP_SEED: u64 = 20_240_625;

/// How a confidence interval around the sample mean is formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalMethod {
    /// Percentile bootstrap of the mean.
    Bootstrap { resamples: usize, seed: u64 },
    /// mean ± z·s/√n with z from the standard normal.
    Normal,
}

impl Default for IntervalMethod {
    fn default() -> Self {
        IntervalMethod::Bootstrap {
            resamples: DEFAULT_RESAMPLES,
            seed: DEFAULT_BOOTSTRAP_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub n: usize,
    /// Set when the interval has zero width because there was only one sample.
    pub degenerate: bool,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    fn point(mean: f64, confidence: f64, n: usize) -> Self {
        Self {
            mean,
            ci_low: mean,
            ci_high: mean,
            confidence,
            n,
            degenerate: n == 1,
        }
    }
}

/// Mean and 95%-style interval with the default percentile bootstrap.
pub fn mean_ci(samples: &[f64], confidence: f64) -> Result<IntervalEstimate> {
    mean_ci_with(samples, confidence, IntervalMethod::default())
}

pub fn mean_ci_with(samples: &[f64], confidence: f64, method: IntervalMethod) -> Result<IntervalEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    if let Some(bad) = samples.iter().find(|s| !s.is_finite()) {
        return Err(Error::invalid(format!("sample {bad} is not finite")));
    }

    // Sorting first makes the result independent of sample order, including
    // the bootstrap draws.
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if sorted[0] == sorted[n - 1] {
        return Ok(IntervalEstimate::point(sorted[0], confidence, n));
    }
    let mean = mean_of(&sorted);

    let (low, high) = match method {
        IntervalMethod::Bootstrap { resamples, seed } => {
            if resamples == 0 {
                return Err(Error::invalid("bootstrap needs at least one resample"));
            }
            percentile_bootstrap(&sorted, confidence, resamples, seed)
        }
        IntervalMethod::Normal => normal_interval(&sorted, mean, confidence),
    };

    Ok(IntervalEstimate {
        mean,
        ci_low: low.min(mean),
        ci_high: high.max(mean),
        confidence,
        n,
        degenerate: false,
    })
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn percentile_bootstrap(sorted: &[f64], confidence: f64, resamples: usize, seed: u64) -> (f64, f64) {
    let n = sorted.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let total: f64 = (0..n).map(|_| sorted[rng.random_range(0..n)]).sum();
            total / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    (quantile(&means, tail), quantile(&means, 1.0 - tail))
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn normal_interval(sorted: &[f64], mean: f64, confidence: f64) -> (f64, f64) {
    let n = sorted.len() as f64;
    let var = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let half = z * (var / n).sqrt();
    (mean - half, mean + half)
}
