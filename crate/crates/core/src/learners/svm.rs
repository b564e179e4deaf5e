use serde::{Deserialize, Serialize};

use super::{epoch_order, Dataset, Standardizer};
use crate::numeric::{argmax, ordered_dot};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 0.03,
            epochs: 200,
        }
    }
}

/// One-vs-rest linear SVMs; the bias is an extra, regularized input fixed at 1.
#[derive(Debug, Clone)]
pub struct SvmModel {
    scaler: Standardizer,
    /// `classes × (p + 1)`, bias last.
    weights: Vec<f64>,
    p: usize,
    classes: usize,
}

impl SvmModel {
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![1.0; self.p + 1];
        self.scaler.apply_into(x, &mut z[..self.p]);
        (0..self.classes)
            .map(|c| ordered_dot(&z, &self.weights[c * (self.p + 1)..(c + 1) * (self.p + 1)]))
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        if self.classes == 1 {
            return 0;
        }
        argmax(&self.margins(x)) as u32
    }
}

/// Pegasos: hinge loss with L2 penalty, step `1/(λt)`, projection onto the
/// ball of radius `1/√λ`. All classes share one visiting order.
pub fn train_linear_svm_ovr(train: &Dataset, cfg: &SvmConfig, seed: u64) -> SvmModel {
    let p = train.p;
    let q = p + 1;
    let classes = train.classes;
    let scaler = Standardizer::fit(train);
    let mut z = Vec::with_capacity(train.len() * q);
    for i in 0..train.len() {
        let start = z.len();
        z.resize(start + q, 1.0);
        scaler.apply_into(train.row(i), &mut z[start..start + p]);
    }
    let mut w = vec![0.0; classes * q];
    // w_c = scale_c · v_c, so the shrink step is O(1)
    let mut scale = vec![1.0f64; classes];
    let mut sq_norm = vec![0.0f64; classes];
    let radius_sq = 1.0 / cfg.lambda;
    let mut rng = seed::rng_from(seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        epoch_order(&mut rng, &mut order);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64);
            let zi = &z[i * q..(i + 1) * q];
            let zz = ordered_dot(zi, zi);
            for c in 0..classes {
                let y = if train.y[i] as usize == c { 1.0 } else { -1.0 };
                let v = &mut w[c * q..(c + 1) * q];
                let margin = y * scale[c] * ordered_dot(zi, v);
                let shrink = 1.0 - eta * cfg.lambda;
                if shrink <= 0.0 {
                    // first step: w is reset to the update alone
                    v.iter_mut().for_each(|x| *x = 0.0);
                    scale[c] = 1.0;
                    sq_norm[c] = 0.0;
                } else {
                    scale[c] *= shrink;
                    sq_norm[c] *= shrink * shrink;
                }
                if margin < 1.0 {
                    let vz = ordered_dot(zi, v);
                    let a = eta * y / scale[c];
                    for (x, zj) in v.iter_mut().zip(zi) {
                        *x += a * zj;
                    }
                    sq_norm[c] += 2.0 * eta * y * scale[c] * vz + eta * eta * zz;
                }
                if sq_norm[c] > radius_sq {
                    scale[c] *= (radius_sq / sq_norm[c]).sqrt();
                    sq_norm[c] = radius_sq;
                }
                if scale[c] < 1e-9 {
                    v.iter_mut().for_each(|x| *x *= scale[c]);
                    scale[c] = 1.0;
                }
            }
        }
    }
    for c in 0..classes {
        let s = scale[c];
        w[c * q..(c + 1) * q].iter_mut().for_each(|x| *x *= s);
    }
    SvmModel {
        scaler,
        weights: w,
        p,
        classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::fixtures::{blobs, ladder, noise};
    use crate::learners::{accuracy, split_80_20};

    // In one dimension a "class vs rest" score is monotone in x, so only the
    // classes at either end of the ladder can be cut off from the rest.
    #[test]
    fn ladder_resolves_outer_classes_only() {
        // weak regularization: the best a 1-D one-vs-rest score can do
        let weak = SvmConfig {
            lambda: 1e-4,
            ..Default::default()
        };
        let d = ladder(2000, 20);
        let (tr, te) = split_80_20(&d, 1).unwrap();
        let m = train_linear_svm_ovr(&tr, &weak, 2);
        assert_eq!(m.predict(&[0.0]), 0);
        assert_eq!(m.predict(&[19.0]), 19);
        let acc = accuracy(|x| m.predict(x), &te);
        assert!(acc < 0.5, "{acc}");
        let three = ladder(600, 3);
        let m3 = train_linear_svm_ovr(&three, &weak, 3);
        assert_eq!(m3.predict(&[0.0]), 0);
        assert_eq!(m3.predict(&[2.0]), 2);
    }

    #[test]
    fn blobs_are_separable() {
        let d = blobs(400, 2, 3);
        let (tr, te) = split_80_20(&d, 4).unwrap();
        let m = train_linear_svm_ovr(&tr, &SvmConfig::default(), 5);
        assert!(accuracy(|x| m.predict(x), &te) >= 0.99);
    }

    #[test]
    fn noise_is_chance() {
        let d = noise(4000, 1, 20, 6);
        let (tr, te) = split_80_20(&d, 7).unwrap();
        let cfg = SvmConfig {
            epochs: 20,
            ..Default::default()
        };
        let m = train_linear_svm_ovr(&tr, &cfg, 8);
        let acc = accuracy(|x| m.predict(x), &te);
        assert!((acc - 0.05).abs() <= 0.03, "{acc}");
    }

    #[test]
    fn single_class_is_trivial() {
        let d = Dataset::new(vec![1.0, 2.0, 3.0], 1, vec![0, 0, 0], 1).unwrap();
        let m = train_linear_svm_ovr(&d, &SvmConfig::default(), 0);
        assert_eq!(accuracy(|x| m.predict(x), &d), 1.0);
    }
}
