use serde::{Deserialize, Serialize};

use super::{Dataset, Standardizer};
use crate::numeric::{argmax, ordered_dot};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            learning_rate: 0.5,
            epochs: 300,
            l2: 1e-4,
        }
    }
}

/// One-vs-rest logistic regressions over standardized inputs.
#[derive(Debug, Clone)]
pub struct LogRegModel {
    scaler: Standardizer,
    weights: Vec<f64>,
    bias: Vec<f64>,
    p: usize,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl LogRegModel {
    /// Probability of each class against the rest.
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.p];
        self.scaler.apply_into(x, &mut z);
        self.bias
            .iter()
            .enumerate()
            .map(|(c, b)| sigmoid(ordered_dot(&z, &self.weights[c * self.p..(c + 1) * self.p]) + b))
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        argmax(&self.probabilities(x)) as u32
    }
}

/// Full-batch gradient descent from zero weights; `seed` is accepted for
/// interface symmetry and unused because the fit is deterministic.
pub fn train_logreg_ovr(train: &Dataset, cfg: &LogRegConfig, _seed: u64) -> LogRegModel {
    let p = train.p;
    let c = train.classes;
    let scaler = Standardizer::fit(train);
    let z = scaler.transform(train);
    let mut model = LogRegModel {
        scaler,
        weights: vec![0.0; c * p],
        bias: vec![0.0; c],
        p,
    };
    let m = train.len();
    if m == 0 {
        return model;
    }
    let mut gw = vec![0.0; c * p];
    let mut gb = vec![0.0; c];
    for _ in 0..cfg.epochs {
        gw.iter_mut().for_each(|g| *g = 0.0);
        gb.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..m {
            let zi = &z[i * p..(i + 1) * p];
            for k in 0..c {
                let w = &model.weights[k * p..(k + 1) * p];
                let target = if train.y[i] as usize == k { 1.0 } else { 0.0 };
                let err = sigmoid(ordered_dot(zi, w) + model.bias[k]) - target;
                gb[k] += err;
                for (g, x) in gw[k * p..(k + 1) * p].iter_mut().zip(zi) {
                    *g += err * x;
                }
            }
        }
        let step = cfg.learning_rate / m as f64;
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= step * g + cfg.learning_rate * cfg.l2 * *w;
        }
        for (b, g) in model.bias.iter_mut().zip(&gb) {
            *b -= step * g;
        }
    }
    model
}
