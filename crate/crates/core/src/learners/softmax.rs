use serde::{Deserialize, Serialize};

use super::{epoch_order, Dataset, Standardizer};
use crate::numeric::{argmax, ordered_dot};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoftmaxConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for SoftmaxConfig {
    fn default() -> Self {
        SoftmaxConfig {
            learning_rate: 0.1,
            epochs: 200,
            batch_size: 32,
        }
    }
}

/// Linear map plus softmax over standardized inputs.
#[derive(Debug, Clone)]
pub struct SoftmaxModel {
    scaler: Standardizer,
    /// `classes × p`, row per class.
    weights: Vec<f64>,
    bias: Vec<f64>,
    p: usize,
}

impl SoftmaxModel {
    fn logits(&self, z: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = ordered_dot(z, &self.weights[c * self.p..(c + 1) * self.p]) + self.bias[c];
        }
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        let mut z = vec![0.0; self.p];
        self.scaler.apply_into(x, &mut z);
        let mut logits = vec![0.0; self.bias.len()];
        self.logits(&z, &mut logits);
        argmax(&logits) as u32
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    v.iter_mut().for_each(|x| *x /= total);
}

/// Mini-batch gradient descent on cross-entropy from zero weights.
pub fn train_linear_softmax(train: &Dataset, cfg: &SoftmaxConfig, seed: u64) -> SoftmaxModel {
    let p = train.p;
    let c = train.classes;
    let scaler = Standardizer::fit(train);
    let z = scaler.transform(train);
    let mut model = SoftmaxModel {
        scaler,
        weights: vec![0.0; c * p],
        bias: vec![0.0; c],
        p,
    };
    let m = train.len();
    if m == 0 {
        return model;
    }
    let batch = cfg.batch_size.max(1);
    let mut rng = seed::rng_from(seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut probs = vec![0.0; c];
    let mut gw = vec![0.0; c * p];
    let mut gb = vec![0.0; c];
    for _ in 0..cfg.epochs {
        epoch_order(&mut rng, &mut order);
        for chunk in order.chunks(batch) {
            gw.iter_mut().for_each(|g| *g = 0.0);
            gb.iter_mut().for_each(|g| *g = 0.0);
            for &i in chunk {
                let zi = &z[i * p..(i + 1) * p];
                model.logits(zi, &mut probs);
                softmax_in_place(&mut probs);
                probs[train.y[i] as usize] -= 1.0;
                for (k, &err) in probs.iter().enumerate() {
                    gb[k] += err;
                    for (g, x) in gw[k * p..(k + 1) * p].iter_mut().zip(zi) {
                        *g += err * x;
                    }
                }
            }
            let step = cfg.learning_rate / chunk.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w -= step * g;
            }
            for (b, g) in model.bias.iter_mut().zip(&gb) {
                *b -= step * g;
            }
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::fixtures::{blobs, noise};
    use crate::learners::{accuracy, split_80_20};

    #[test]
    fn separable_blobs() {
        let d = blobs(400, 3, 1);
        let (tr, te) = split_80_20(&d, 2).unwrap();
        let m = train_linear_softmax(&tr, &SoftmaxConfig::default(), 3);
        assert!(accuracy(|x| m.predict(x), &te) >= 0.99);
    }

    #[test]
    fn noise_is_chance() {
        let d = noise(4000, 4, 4, 5);
        let (tr, te) = split_80_20(&d, 6).unwrap();
        let cfg = SoftmaxConfig {
            epochs: 30,
            ..Default::default()
        };
        let m = train_linear_softmax(&tr, &cfg, 7);
        let acc = accuracy(|x| m.predict(x), &te);
        assert!((acc - 0.25).abs() <= 0.05, "{acc}");
    }

    #[test]
    fn constant_inputs_learn_the_majority() {
        let y = vec![0, 1, 1, 2, 1, 0, 1, 1, 2, 1];
        let d = Dataset::new(vec![4.0; 10], 1, y, 3).unwrap();
        let m = train_linear_softmax(&d, &SoftmaxConfig::default(), 0);
        assert_eq!(accuracy(|x| m.predict(x), &d), 0.6);
    }
}
