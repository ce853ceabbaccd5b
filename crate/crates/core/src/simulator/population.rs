use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::error::{Error, Result};

/// Multivariate normal with a precomputed Cholesky factor.
#[derive(Debug, Clone)]
pub struct Gaussian {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::invalid("gaussian needs at least one dimension"));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::invalid(format!(
                "covariance is {}x{} but mean has {d} entries",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("gaussian parameters must be finite"));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 {
            return Err(Error::invalid("covariance must be symmetric"));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::invalid("covariance must be positive definite"))?
            .l();
        Ok(Self {
            mean: DVector::from_vec(mean),
            cov,
            chol,
        })
    }

    pub fn isotropic(mean: Vec<f64>, sd: f64) -> Result<Self> {
        let d = mean.len();
        Self::new(mean, DMatrix::identity(d, d) * (sd * sd))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        let z = DVector::<f64>::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        let x = &self.mean + &self.chol * z;
        out.extend(x.iter());
    }
}

/// A data-generating subpopulation with class-conditional Gaussians.
#[derive(Debug, Clone)]
pub struct Population {
    id: String,
    positive: Gaussian,
    negative: Gaussian,
}

impl Population {
    pub fn new(id: impl Into<String>, positive: Gaussian, negative: Gaussian) -> Result<Self> {
        let id = id.into();
        if positive.dim() != negative.dim() {
            return Err(Error::invalid(format!(
                "population {id}: class dimensions differ ({} vs {})",
                positive.dim(),
                negative.dim()
            )));
        }
        if positive.mean == negative.mean && positive.cov == negative.cov {
            return Err(Error::invalid(format!(
                "population {id}: positive and negative distributions are identical"
            )));
        }
        Ok(Self { id, positive, negative })
    }

    /// Unit-variance classes at `center ± separation / 2`.
    pub fn shifted_pair(id: impl Into<String>, center: &[f64], separation: &[f64]) -> Result<Self> {
        if center.len() != separation.len() {
            return Err(Error::invalid("center and separation lengths differ"));
        }
        let pos = center.iter().zip(separation).map(|(c, s)| c + s / 2.0).collect();
        let neg = center.iter().zip(separation).map(|(c, s)| c - s / 2.0).collect();
        Self::new(id, Gaussian::isotropic(pos, 1.0)?, Gaussian::isotropic(neg, 1.0)?)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.positive.dim()
    }

    pub fn class(&self, positive: bool) -> &Gaussian {
        if positive {
            &self.positive
        } else {
            &self.negative
        }
    }
}

/// Population fractions at one modification step, keyed by population id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture(BTreeMap<String, f64>);

impl Mixture {
    pub fn new<I, S>(fractions: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (id, f) in fractions {
            let id = id.into();
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::invalid(format!(
                    "fraction for population {id} must lie in [0, 1], got {f}"
                )));
            }
            if map.insert(id.clone(), f).is_some() {
                return Err(Error::invalid(format!("population {id} listed twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::invalid("empty mixture"));
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("mixture fractions sum to {total}, expected 1")));
        }
        Ok(Self(map))
    }

    pub fn single(id: impl Into<String>) -> Self {
        Self(BTreeMap::from([(id.into(), 1.0)]))
    }

    pub fn fraction(&self, id: &str) -> f64 {
        self.0.get(id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Splits `count` draws across populations with largest-remainder rounding.
    ///
    /// Each population first gets `floor(fraction · count)`; leftover draws go to
    /// the largest fractional remainders, ties going to the lexicographically
    /// smaller id. Zero-fraction populations are omitted.
    pub fn allocate(&self, count: usize) -> Vec<(&str, usize)> {
        let mut alloc: Vec<(&str, usize, f64)> = self
            .iter()
            .filter(|(_, f)| *f > 0.0)
            .map(|(id, f)| {
                let quota = f * count as f64;
                let base = quota.floor();
                (id, base as usize, quota - base)
            })
            .collect();
        let assigned: usize = alloc.iter().map(|a| a.1).sum();
        let mut order: Vec<usize> = (0..alloc.len()).collect();
        // Stable sort keeps id order among equal remainders.
        order.sort_by(|&a, &b| alloc[b].2.total_cmp(&alloc[a].2));
        for &i in order.iter().cycle().take(count.saturating_sub(assigned)) {
            alloc[i].1 += 1;
        }
        alloc.into_iter().map(|(id, n, _)| (id, n)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSchedule {
    steps: Vec<Mixture>,
}

impl MixtureSchedule {
    pub fn new(steps: Vec<Mixture>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(Error::invalid(
                "a schedule needs at least two steps (an initial step and one modification)",
            ));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[Mixture] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Fraction of one population at every step.
    pub fn trajectory(&self, id: &str) -> Vec<f64> {
        self.steps.iter().map(|m| m.fraction(id)).collect()
    }
}

/// Per-class sample counts (every partition is class balanced).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl PartitionSizes {
    /// Per-class counts of the reference study: 525 / 75 / 150.
    pub const REFERENCE: PartitionSizes = PartitionSizes {
        train: 525,
        validation: 75,
        test: 150,
    };

    /// Scales every partition, rounding to the nearest count and keeping at least one.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {factor}")));
        }
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Ok(Self {
            train: s(self.train),
            validation: s(self.validation),
            test: s(self.test),
        })
    }
}

/// Labeled feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<bool>,
    origins: Vec<String>,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// Population id each row was drawn from.
    pub fn origins(&self) -> &[String] {
        &self.origins
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l).count();
        (pos, self.len() - pos)
    }

    #[cfg(test)]
    pub(crate) fn truncate_for_tests(&mut self, rows: usize) {
        self.features.truncate(rows * self.dim);
        self.labels.truncate(rows);
        self.origins.truncate(rows);
    }

    /// Number of rows of the given class drawn from population `id`.
    pub fn count_from(&self, id: &str, positive: bool) -> usize {
        self.origins
            .iter()
            .zip(&self.labels)
            .filter(|(o, &l)| o.as_str() == id && l == positive)
            .count()
    }
}

/// Draws a class-balanced dataset from a population mixture.
///
/// Each (population, class) pair reads its own deterministic stream derived
/// from `seed`, so the rows drawn for a smaller count are a prefix of those
/// drawn for a larger one. Reusing a seed across steps therefore nests the
/// datasets population by population.
pub fn sample_dataset(populations: &[Population], mixture: &Mixture, per_class: usize, seed: u64) -> Result<Dataset> {
    if per_class == 0 {
        return Err(Error::invalid("per-class sample count must be ≥ 1"));
    }
    let dim = populations
        .first()
        .map(Population::dim)
        .ok_or_else(|| Error::invalid("no populations defined"))?;

    let mut features = Vec::with_capacity(2 * per_class * dim);
    let mut labels = Vec::with_capacity(2 * per_class);
    let mut origins = Vec::with_capacity(2 * per_class);
    for positive in [true, false] {
        for (id, n) in mixture.allocate(per_class) {
            let (index, pop) = populations
                .iter()
                .enumerate()
                .find(|(_, p)| p.id() == id)
                .ok_or_else(|| Error::invalid(format!("mixture names unknown population {id}")))?;
            if pop.dim() != dim {
                return Err(Error::invalid(format!(
                    "population {id} has dimension {} but expected {dim}",
                    pop.dim()
                )));
            }
            let stream = derive_seed(derive_seed(seed, index as u64), positive as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            for _ in 0..n {
                pop.class(positive).sample_into(&mut rng, &mut features);
                labels.push(positive);
                origins.push(id.to_owned());
            }
        }
    }
    Ok(Dataset {
        dim,
        features,
        labels,
        origins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pops() -> Vec<Population> {
        vec![
            Population::shifted_pair("A", &[0.0, 0.0], &[2.0, 0.0]).unwrap(),
            Population::shifted_pair("B", &[0.0, 1.0], &[0.0, 2.0]).unwrap(),
        ]
    }

    #[test]
    fn single_population_mixture() {
        let d = sample_dataset(&pops(), &Mixture::single("A"), 10, 1).unwrap();
        assert_eq!(d.len(), 20);
        assert_eq!(d.class_counts(), (10, 10));
        assert!(d.origins().iter().all(|o| o == "A"));
    }

    #[test]
    fn even_mixture_splits_exactly() {
        let m = Mixture::new([("A", 0.5), ("B", 0.5)]).unwrap();
        let d = sample_dataset(&pops(), &m, 100, 1).unwrap();
        for id in ["A", "B"] {
            assert_eq!(d.count_from(id, true), 50);
            assert_eq!(d.count_from(id, false), 50);
        }
    }

    #[test]
    fn largest_remainder_tie_goes_to_first_id() {
        // 0.75·150 = 112.5 and 0.25·150 = 37.5: equal remainders, A wins.
        let m = Mixture::new([("A", 0.75), ("B", 0.25)]).unwrap();
        assert_eq!(m.allocate(150), vec![("A", 113), ("B", 37)]);
        let m = Mixture::new([("A", 0.7), ("B", 0.2), ("C", 0.1)]).unwrap();
        assert_eq!(m.allocate(7), vec![("A", 5), ("B", 1), ("C", 1)]);
        assert_eq!(m.allocate(7).iter().map(|a| a.1).sum::<usize>(), 7);
    }

    #[test]
    fn mixture_validation() {
        assert!(Mixture::new(Vec::<(&str, f64)>::new()).is_err());
        assert!(Mixture::new([("A", 0.5), ("B", 0.4)]).is_err());
        assert!(Mixture::new([("A", 1.5), ("B", -0.5)]).is_err());
        assert!(MixtureSchedule::new(vec![Mixture::single("A")]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_nested() {
        let m = Mixture::new([("A", 0.5), ("B", 0.5)]).unwrap();
        let a = sample_dataset(&pops(), &m, 20, 9).unwrap();
        assert_eq!(a, sample_dataset(&pops(), &m, 20, 9).unwrap());
        assert_ne!(a, sample_dataset(&pops(), &m, 20, 10).unwrap());

        // Fewer A rows at the next step are a prefix of the earlier A rows.
        let next = Mixture::new([("A", 0.25), ("B", 0.75)]).unwrap();
        let b = sample_dataset(&pops(), &next, 20, 9).unwrap();
        let a_rows: Vec<&[f64]> = (0..a.len())
            .filter(|&i| a.origins()[i] == "A" && a.labels()[i])
            .map(|i| a.row(i))
            .collect();
        let b_rows: Vec<&[f64]> = (0..b.len())
            .filter(|&i| b.origins()[i] == "A" && b.labels()[i])
            .map(|i| b.row(i))
            .collect();
        assert_eq!(b_rows.len(), 5);
        assert_eq!(&a_rows[..5], &b_rows[..]);
    }

    #[test]
    fn gaussian_validation() {
        let not_spd = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Gaussian::new(vec![0.0, 0.0], not_spd).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Gaussian::new(vec![0.0, 0.0], asym).is_err());
        let g = Gaussian::isotropic(vec![1.0, 1.0], 1.0).unwrap();
        assert!(Population::new("X", g.clone(), g).is_err());
    }

    #[test]
    fn partition_scaling() {
        let s = PartitionSizes::REFERENCE.scaled(0.2).unwrap();
        assert_eq!(
            s,
            PartitionSizes {
                train: 105,
                validation: 15,
                test: 30
            }
        );
        assert!(PartitionSizes::REFERENCE.scaled(0.0).is_err());
        assert_eq!(PartitionSizes::REFERENCE.scaled(0.001).unwrap().validation, 1);
    }
}
