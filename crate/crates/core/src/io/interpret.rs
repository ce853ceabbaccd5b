use std::fmt;

use serde::{Deserialize, Serialize};

use crate::measurements::{MeasurementSeries, MetricRange};

/// Thresholds for the interpretation rules, in metric units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpretationThresholds {
    /// Potential above this suggests a population shift.
    pub potential_high: f64,
    /// Retention this far below the previous step's performance flags knowledge loss.
    pub retention_drop: f64,
}

impl InterpretationThresholds {
    /// Fraction of the metric range used by the default thresholds.
    pub const DEFAULT_FRACTION: f64 = 0.05;

    /// Default thresholds scaled to a metric range.
    pub fn for_range(range: MetricRange) -> Self {
        let t = Self::DEFAULT_FRACTION * range.width();
        Self {
            potential_high: t,
            retention_drop: t,
        }
    }
}

impl Default for InterpretationThresholds {
    fn default() -> Self {
        Self::for_range(MetricRange::UNIT)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteRule {
    NegativeLearning,
    PopulationShift,
    KnowledgeLoss,
}

impl NoteRule {
    pub fn as_str(self) -> &'static str {
        match self {
            NoteRule::NegativeLearning => "negative_learning",
            NoteRule::PopulationShift => "population_shift",
            NoteRule::KnowledgeLoss => "knowledge_loss",
        }
    }
}

impl fmt::Display for NoteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationNote {
    pub step: usize,
    pub rule: NoteRule,
    pub message: String,
}

/// Applies the interpretation rules to mean values, step by step.
///
/// * learning below zero while performance rose: the new dataset may be
///   easier than the last one and is worth a look;
/// * potential above `potential_high`: new or shifted population;
/// * retention more than `retention_drop` below the previous step's
///   performance: earlier knowledge is being lost.
pub fn interpret(series: &MeasurementSeries, thresholds: &InterpretationThresholds) -> Vec<InterpretationNote> {
    let mut notes = Vec::new();
    for pair in series.points.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let step = cur.step;
        let delta = cur.performance.mean - prev.performance.mean;
        if let Some(l) = cur.learning {
            if l.mean < 0.0 && delta > 0.0 {
                notes.push(InterpretationNote {
                    step,
                    rule: NoteRule::NegativeLearning,
                    message: format!(
                        "learning is negative ({:+.4}) while performance rose by {:+.4}; examine the new dataset",
                        l.mean, delta
                    ),
                });
            }
        }
        if let Some(p) = cur.potential {
            if p.mean > thresholds.potential_high {
                notes.push(InterpretationNote {
                    step,
                    rule: NoteRule::PopulationShift,
                    message: format!(
                        "potential {:.4} exceeds {}; a population may have been added or shifted",
                        p.mean, thresholds.potential_high
                    ),
                });
            }
        }
        if let Some(r) = cur.retention {
            let floor = prev.performance.mean - thresholds.retention_drop;
            if r.mean < floor {
                notes.push(InterpretationNote {
                    step,
                    rule: NoteRule::KnowledgeLoss,
                    message: format!(
                        "retention {:.4} is more than {} below step {} performance {:.4}; \
                         knowledge of earlier data is fading",
                        r.mean, thresholds.retention_drop, prev.step, prev.performance.mean
                    ),
                });
            }
        }
    }
    notes
}
