//! Small supervised learners and estimators used by the metrics.
//!
//! Every learner is deterministic given its data and seed, and none of them
//! depends on the order of the input columns: dot products go through
//! [`crate::numeric::ordered_dot`], weights start at zero, and the random
//! forest identifies features by content rather than by position.

mod auc;
mod forest;
mod logreg;
mod majority;
mod mi;
mod softmax;
mod svm;

pub use auc::roc_auc;
pub use forest::{train_random_forest, ForestConfig, MaxFeatures, RandomForest};
pub use logreg::{train_logreg_ovr, LogRegConfig, LogRegModel};
pub use majority::{train_majority_vote, MajorityVote};
pub use mi::{bin_indices, discrete_mutual_information, MutualInformation};
pub use softmax::{train_linear_softmax, SoftmaxConfig, SoftmaxModel};
pub use svm::{train_linear_svm_ovr, SvmConfig, SvmModel};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::numeric::argmax;
use crate::seed::{self, Rng};

/// Row-major inputs with class targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub p: usize,
    pub y: Vec<u32>,
    pub classes: usize,
}

impl Dataset {
    pub fn new(x: Vec<f64>, p: usize, y: Vec<u32>, classes: usize) -> Result<Self> {
        if p == 0 || x.len() != y.len() * p {
            return Err(Error::validation(format!(
                "dataset shape: {} inputs for {} rows of width {p}",
                x.len(),
                y.len()
            )));
        }
        if let Some(&bad) = y.iter().find(|&&c| c as usize >= classes) {
            return Err(Error::validation(format!(
                "target {bad} >= class count {classes}"
            )));
        }
        Ok(Dataset { x, p, y, classes })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(rows.len() * self.p);
        for &r in rows {
            x.extend_from_slice(self.row(r));
        }
        Dataset {
            x,
            p: self.p,
            y: rows.iter().map(|&r| self.y[r]).collect(),
            classes: self.classes,
        }
    }

    /// Single column `d` as a one-feature dataset.
    pub fn column(&self, d: usize) -> Dataset {
        Dataset {
            x: self.x.iter().skip(d).step_by(self.p).copied().collect(),
            p: 1,
            y: self.y.clone(),
            classes: self.classes,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &c in &self.y {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Most frequent class; lowest id wins ties.
    pub fn majority_class(&self) -> u32 {
        let counts: Vec<f64> = self.class_counts().iter().map(|&c| c as f64).collect();
        argmax(&counts) as u32
    }
}

/// Sizes of an 80/20-style split of `m` rows: test gets `round(m·(1-train))`,
/// clamped so both parts are non-empty.
pub fn split_sizes(m: usize, train_fraction: f64) -> Result<(usize, usize)> {
    if m < 2 {
        return Err(Error::validation(format!("cannot split {m} rows")));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::validation(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let test = ((m as f64) * (1.0 - train_fraction)).round() as usize;
    let test = test.clamp(1, m - 1);
    Ok((m - test, test))
}

/// Seeded uniform split into (train, test) row indices, each sorted.
pub fn split_indices(m: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let (train, _) = split_sizes(m, train_fraction)?;
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut seed::rng_from(seed));
    let mut test = idx.split_off(train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

pub fn split_80_20(data: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    let (tr, te) = split_indices(data.len(), 0.8, seed)?;
    Ok((data.subset(&tr), data.subset(&te)))
}

/// Per-feature centring and scaling; constant features map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &Dataset) -> Self {
        let p = data.p;
        let m = data.len().max(1) as f64;
        let mut mean = vec![0.0; p];
        for i in 0..data.len() {
            for (acc, x) in mean.iter_mut().zip(data.row(i)) {
                *acc += x;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        let mut var = vec![0.0; p];
        for i in 0..data.len() {
            for ((acc, x), mu) in var.iter_mut().zip(data.row(i)).zip(&mean) {
                *acc += (x - mu) * (x - mu);
            }
        }
        let scale = var
            .iter()
            .map(|v| {
                let s = (v / m).sqrt();
                if s > 0.0 {
                    1.0 / s
                } else {
                    0.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, v), mu), s) in out.iter_mut().zip(x).zip(&self.mean).zip(&self.scale) {
            *o = (v - mu) * s;
        }
    }

    pub fn transform(&self, data: &Dataset) -> Vec<f64> {
        let mut out = vec![0.0; data.x.len()];
        for (src, dst) in data.x.chunks(data.p).zip(out.chunks_mut(data.p)) {
            self.apply_into(src, dst);
        }
        out
    }
}

/// Any trained classifier.
#[derive(Debug, Clone)]
pub enum Classifier {
    LinearSoftmax(SoftmaxModel),
    MajorityVote(MajorityVote),
    LinearSvmOvr(SvmModel),
    LogRegOvr(LogRegModel),
    RandomForest(RandomForest),
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> u32 {
        match self {
            Classifier::LinearSoftmax(m) => m.predict(x),
            Classifier::MajorityVote(m) => m.predict(x),
            Classifier::LinearSvmOvr(m) => m.predict(x),
            Classifier::LogRegOvr(m) => m.predict(x),
            Classifier::RandomForest(m) => m.predict(x),
        }
    }

    pub fn accuracy(&self, data: &Dataset) -> f64 {
        accuracy(|x| self.predict(x), data)
    }

    pub fn feature_importances(&self) -> Option<&[f64]> {
        match self {
            Classifier::RandomForest(m) => Some(m.feature_importances()),
            _ => None,
        }
    }
}

/// Fraction of rows of `data` predicted correctly.
pub fn accuracy(predict: impl Fn(&[f64]) -> u32, data: &Dataset) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let hits = (0..data.len())
        .filter(|&i| predict(data.row(i)) == data.y[i])
        .count();
    hits as f64 / data.len() as f64
}

/// Shuffled visiting order for one SGD epoch.
pub(crate) fn epoch_order(rng: &mut Rng, order: &mut [usize]) {
    order.shuffle(rng);
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_sizes_round_and_clamp() {
        assert_eq!(split_sizes(100, 0.8).unwrap(), (80, 20));
        assert_eq!(split_sizes(5, 0.8).unwrap(), (4, 1));
        assert_eq!(split_sizes(2, 0.8).unwrap(), (1, 1));
        assert_eq!(split_sizes(3, 0.99).unwrap(), (2, 1));
        assert!(split_sizes(1, 0.8).is_err());
    }

    #[test]
    fn split_is_seeded_partition() {
        let (a, b) = split_indices(50, 0.8, 3).unwrap();
        let (a2, _) = split_indices(50, 0.8, 3).unwrap();
        let (a3, _) = split_indices(50, 0.8, 4).unwrap();
        assert_eq!(a, a2);
        assert_ne!(a, a3);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn standardizer_zeroes_constant_features() {
        let d = Dataset::new(vec![1.0, 5.0, 3.0, 5.0], 2, vec![0, 1], 2).unwrap();
        let z = Standardizer::fit(&d).transform(&d);
        assert_eq!(z, vec![-1.0, 0.0, 1.0, 0.0]);
    }
}
