use serde::{Deserialize, Serialize};

use super::population::Dataset;
use crate::error::{Error, Result};
use crate::metrics::PredictionSet;

/// Logistic-linear classifier `score = w·x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    weights: Vec<f64>,
    bias: f64,
    frozen: Vec<bool>,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
            frozen: vec![false; dim],
        }
    }

    pub fn from_parts(weights: Vec<f64>, bias: f64) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::invalid("model parameters must be finite"));
        }
        let dim = weights.len();
        Ok(Self {
            weights,
            bias,
            frozen: vec![false; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// Freezes every weight component; only the bias stays trainable.
    pub fn freeze_weights(mut self) -> Self {
        self.frozen.iter_mut().for_each(|f| *f = true);
        self
    }

    pub fn with_frozen_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.dim() {
            return Err(Error::invalid(format!(
                "frozen mask has {} entries for a {}-dimensional model",
                mask.len(),
                self.dim()
            )));
        }
        self.frozen = mask;
        Ok(self)
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    pub fn predict(&self, data: &Dataset) -> Result<PredictionSet> {
        PredictionSet::new(data.labels().to_vec(), data.rows().map(|x| self.decision(x)).collect())
    }

    /// Mean logistic loss over `data`.
    pub fn loss(&self, data: &Dataset) -> f64 {
        let total: f64 = data
            .rows()
            .zip(data.labels())
            .map(|(x, &y)| {
                let z = self.decision(x);
                softplus(z) - if y { z } else { 0.0 }
            })
            .sum();
        total / data.len() as f64
    }

    fn max_abs_weight(&self) -> f64 {
        self.weights.iter().fold(0.0_f64, |m, w| m.max(w.abs()))
    }
}

// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    /// Epochs for the initial (step 0) model.
    pub epochs: usize,
    /// Epochs for every later modification step.
    pub update_epochs: usize,
    pub l2: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1.0,
            epochs: 300,
            update_epochs: 300,
            l2: 1e-3,
        }
    }
}

/// Full-batch gradient descent on the logistic loss.
///
/// Frozen weight components never change. After every epoch the validation
/// loss is measured; the parameters with the lowest validation loss seen
/// (including the starting point) are returned.
pub fn train_step(
    model: &LinearModel,
    train: &Dataset,
    validation: &Dataset,
    learning_rate: f64,
    epochs: usize,
    l2: f64,
) -> Result<LinearModel> {
    if epochs == 0 {
        return Ok(model.clone());
    }
    if train.is_empty() || validation.is_empty() {
        return Err(Error::invalid("training and validation sets must be nonempty"));
    }
    for (name, d) in [("training", train), ("validation", validation)] {
        let (pos, neg) = d.class_counts();
        if pos != neg {
            return Err(Error::invalid(format!(
                "{name} set is not class balanced ({pos} positive, {neg} negative)"
            )));
        }
        if d.dim() != model.dim() {
            return Err(Error::invalid(format!(
                "{name} set has dimension {} but model has {}",
                d.dim(),
                model.dim()
            )));
        }
    }
    if !(learning_rate.is_finite() && learning_rate > 0.0) || !(l2.is_finite() && l2 >= 0.0) {
        return Err(Error::invalid("learning rate must be positive and l2 non-negative"));
    }

    let n = train.len() as f64;
    let mut current = model.clone();
    let mut best = model.clone();
    let mut best_loss = checked_loss(&current, validation, 0)?;
    let mut grad = vec![0.0; model.dim()];

    for epoch in 1..=epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_bias = 0.0;
        for (x, &y) in train.rows().zip(train.labels()) {
            let residual = sigmoid(current.decision(x)) - if y { 1.0 } else { 0.0 };
            grad.iter_mut().zip(x).for_each(|(g, xi)| *g += residual * xi);
            grad_bias += residual;
        }
        for ((w, g), &frozen) in current.weights.iter_mut().zip(&grad).zip(&model.frozen) {
            if !frozen {
                *w -= learning_rate * (g / n + l2 * *w);
            }
        }
        current.bias -= learning_rate * grad_bias / n;

        checked_loss(&current, train, epoch)?;
        let val_loss = checked_loss(&current, validation, epoch)?;
        if val_loss < best_loss {
            best_loss = val_loss;
            best = current.clone();
        }
    }
    Ok(best)
}

fn checked_loss(model: &LinearModel, data: &Dataset, epoch: usize) -> Result<f64> {
    let loss = model.loss(data);
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFiniteLoss {
            epoch,
            loss,
            max_weight: model.max_abs_weight(),
            bias: model.bias,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::auroc;
    use crate::simulator::population::{sample_dataset, Mixture, Population};

    fn data(seed: u64, center: f64) -> Dataset {
        let pops = [Population::shifted_pair("A", &[center, 0.0, 0.0], &[3.0, 1.0, 0.0]).unwrap()];
        sample_dataset(&pops, &Mixture::single("A"), 40, seed).unwrap()
    }

    #[test]
    fn zero_epochs_is_identity() {
        let m = LinearModel::from_parts(vec![0.3, -0.2, 0.1], 0.05).unwrap();
        let out = train_step(&m, &data(1, 0.0), &data(2, 0.0), 0.5, 0, 0.0).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn frozen_weights_stay_bit_identical() {
        // Classes are offset from the origin, so only the bias needs to move.
        let m = LinearModel::from_parts(vec![1.0, 0.3, 0.0], -4.0)
            .unwrap()
            .freeze_weights();
        let out = train_step(&m, &data(1, 5.0), &data(2, 5.0), 0.5, 100, 1e-3).unwrap();
        assert_eq!(out.weights(), m.weights());
        assert!(out.bias() != m.bias());
        assert!(out.loss(&data(2, 5.0)) < m.loss(&data(2, 5.0)));
    }

    #[test]
    fn full_training_improves_auroc() {
        let train = data(1, 0.0);
        let start = LinearModel::from_parts(vec![-0.5, 0.2, 0.4], 0.0).unwrap();
        let before = auroc(&start.predict(&train).unwrap()).unwrap();
        let out = train_step(&start, &train, &data(2, 0.0), 0.5, 100, 1e-3).unwrap();
        let after = auroc(&out.predict(&train).unwrap()).unwrap();
        assert!(after >= before, "{before} -> {after}");
        assert!(after > 0.9);
    }

    #[test]
    fn exploding_learning_rate_reports_diagnostics() {
        let start = LinearModel::zeros(3);
        let err = train_step(&start, &data(1, 50.0), &data(2, 50.0), 1e305, 5, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { .. }), "{err}");
    }

    #[test]
    fn unbalanced_training_rejected() {
        let pops = [Population::shifted_pair("A", &[0.0], &[1.0]).unwrap()];
        let d = sample_dataset(&pops, &Mixture::single("A"), 4, 1).unwrap();
        let mut unbalanced = d.clone();
        unbalanced.truncate_for_tests(7);
        assert!(train_step(&LinearModel::zeros(1), &unbalanced, &d, 0.1, 3, 0.0).is_err());
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
