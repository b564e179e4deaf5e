use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Dataset;
use crate::numeric::{argmax, ordered_sum};
use crate::seed::{self, Rng};

/// Features examined at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    /// `ceil(p / 2)`
    Half,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, p: usize) -> usize {
        let k = match self {
            MaxFeatures::All => p,
            MaxFeatures::Sqrt => (p as f64).sqrt().ceil() as usize,
            MaxFeatures::Half => p.div_ceil(2),
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub trees: usize,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 10,
            max_features: MaxFeatures::Half,
            min_samples_leaf: 2,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Vec<f64>),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn distribution(&self, x: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(p) => return p,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }
}

/// Bagged CART classifiers with mean-impurity-decrease importances.
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<Tree>,
    classes: usize,
    importances: Vec<f64>,
}

impl RandomForest {
    pub fn predict(&self, x: &[f64]) -> u32 {
        let mut total = vec![0.0; self.classes];
        for t in &self.trees {
            for (acc, p) in total.iter_mut().zip(t.distribution(x)) {
                *acc += p;
            }
        }
        argmax(&total) as u32
    }

    /// Non-negative, sums to 1; uniform when no split reduced impurity.
    pub fn feature_importances(&self) -> &[f64] {
        &self.importances
    }
}

/// Sorts features by a digest of their training column so that feature
/// selection does not depend on column position. Identical columns are
/// ordered by position, which is immaterial since they are interchangeable.
fn canonical_feature_order(data: &Dataset) -> Vec<usize> {
    let keys: Vec<[u8; 32]> = (0..data.p)
        .map(|f| {
            let mut h = Sha256::new();
            for i in 0..data.len() {
                h.update(data.row(i)[f].to_bits().to_le_bytes());
            }
            h.finalize().into()
        })
        .collect();
    let mut order: Vec<usize> = (0..data.p).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    order
}

struct Grower<'a> {
    data: &'a Dataset,
    cfg: &'a ForestConfig,
    features: &'a [usize],
    mtry: usize,
    rng: Rng,
    nodes: Vec<Node>,
    gain: Vec<f64>,
}

/// `n - Σ c²/n`, i.e. n times the Gini impurity.
fn weighted_gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sq: usize = counts.iter().map(|c| c * c).sum();
    n as f64 - sq as f64 / n as f64
}

impl Grower<'_> {
    fn leaf(&mut self, counts: &[usize], n: usize) -> usize {
        let dist = counts.iter().map(|&c| c as f64 / n as f64).collect();
        self.nodes.push(Node::Leaf(dist));
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let classes = self.data.classes;
        let n = rows.len();
        let mut counts = vec![0usize; classes];
        for &r in rows.iter() {
            counts[self.data.y[r] as usize] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = self.cfg.max_depth.is_some_and(|d| depth >= d);
        let min_leaf = self.cfg.min_samples_leaf.max(1);
        if pure || depth_capped || n < 2 * min_leaf {
            return self.leaf(&counts, n);
        }
        let parent = weighted_gini(&counts, n);
        let chosen = index::sample(&mut self.rng, self.features.len(), self.mtry);
        let mut best: Option<(f64, usize, f64)> = None;
        let mut pairs: Vec<(f64, u32)> = Vec::with_capacity(n);
        let mut left = vec![0usize; classes];
        for pick in chosen.iter() {
            let f = self.features[pick];
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.data.row(r)[f], self.data.y[r])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            left.iter_mut().for_each(|c| *c = 0);
            let mut right = counts.clone();
            for k in 0..n - 1 {
                let c = pairs[k].1 as usize;
                left[c] += 1;
                right[c] -= 1;
                let nl = k + 1;
                if pairs[k].0 == pairs[k + 1].0 || nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let g = parent - weighted_gini(&left, nl) - weighted_gini(&right, n - nl);
                if g > 1e-12 && best.is_none_or(|(bg, _, _)| g > bg) {
                    let mid = pairs[k].0 + (pairs[k + 1].0 - pairs[k].0) / 2.0;
                    best = Some((g, f, mid));
                }
            }
        }
        let Some((g, feature, threshold)) = best else {
            return self.leaf(&counts, n);
        };
        self.gain[feature] += g;
        let split = partition(rows, |r| self.data.row(r)[feature] <= threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf(Vec::new()));
        let (lrows, rrows) = rows.split_at_mut(split);
        let l = self.grow(lrows, depth + 1);
        let r = self.grow(rrows, depth + 1);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        at
    }
}

/// Stable partition: rows satisfying `pred` first; returns their count.
fn partition(rows: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (mut yes, no): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&r| pred(r));
    let k = yes.len();
    yes.extend(no);
    rows.copy_from_slice(&yes);
    k
}

pub fn train_random_forest(train: &Dataset, cfg: &ForestConfig, seed: u64) -> RandomForest {
    let features = canonical_feature_order(train);
    let mtry = cfg.max_features.resolve(train.p);
    let m = train.len();
    let mut importances = vec![0.0; train.p];
    let mut trees = Vec::with_capacity(cfg.trees);
    for t in 0..cfg.trees.max(1) {
        let mut rng = seed::derive_rng(seed, "forest-tree", t as u64, 0);
        let mut rows: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
        rows.sort_unstable();
        let mut g = Grower {
            data: train,
            cfg,
            features: &features,
            mtry,
            rng,
            nodes: Vec::new(),
            gain: vec![0.0; train.p],
        };
        if m > 0 {
            g.grow(&mut rows, 0);
        } else {
            g.nodes
                .push(Node::Leaf(vec![1.0 / train.classes as f64; train.classes]));
        }
        let total = ordered_sum(g.gain.iter().copied());
        if total > 0.0 {
            for (acc, v) in importances.iter_mut().zip(&g.gain) {
                *acc += v / total;
            }
        }
        trees.push(Tree { nodes: g.nodes });
    }
    let total = ordered_sum(importances.iter().copied());
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    } else {
        importances.fill(1.0 / train.p as f64);
    }
    RandomForest {
        trees,
        classes: train.classes,
        importances,
    }
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::learners::{accuracy, split_80_20};
    use crate::seed::rng_from;

    fn threshold_fixture(m: usize, seed: u64) -> Dataset {
        let mut rng = rng_from(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..m {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            x.extend([a, b]);
            y.push(u32::from(a > 0.1));
        }
        Dataset::new(x, 2, y, 2).unwrap()
    }

    #[test]
    fn signal_feature_dominates() {
        let d = threshold_fixture(1000, 1);
        let f = train_random_forest(&d, &ForestConfig::default(), 2);
        assert!(
            f.feature_importances()[0] >= 0.9,
            "{:?}",
            f.feature_importances()
        );
        let (tr, te) = split_80_20(&d, 3).unwrap();
        let f = train_random_forest(&tr, &ForestConfig::default(), 4);
        assert!(accuracy(|x| f.predict(x), &te) > 0.95);
    }

    #[test]
    fn identical_features_share_importance() {
        let mut rng = rng_from(5);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            x.extend([a, a, a, a]);
            y.push(u32::from(a > 0.0) + u32::from(a > 0.5));
        }
        let d = Dataset::new(x, 4, y, 3).unwrap();
        let cfg = ForestConfig {
            trees: 50,
            ..Default::default()
        };
        let f = train_random_forest(&d, &cfg, 6);
        for &v in f.feature_importances() {
            assert!((v - 0.25).abs() < 0.1, "{:?}", f.feature_importances());
        }
    }

    #[test]
    fn pure_dataset_gives_uniform_importances() {
        let d = Dataset::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2, vec![1, 1, 1], 2).unwrap();
        let f = train_random_forest(&d, &ForestConfig::default(), 0);
        assert_eq!(f.feature_importances(), &[0.5, 0.5]);
        assert_eq!(f.predict(&[9.0, -9.0]), 1);
    }

    #[test]
    fn column_permutation_permutes_importances() {
        let mut rng = rng_from(7);
        let m = 600;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..m {
            let row: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            y.push(u32::from(row[0] + 0.5 * row[2] > 0.7));
            x.extend(row);
        }
        let d = Dataset::new(x.clone(), 3, y.clone(), 2).unwrap();
        let perm = [2usize, 0, 1];
        let px: Vec<f64> = x
            .chunks(3)
            .flat_map(|r| perm.iter().map(move |&j| r[j]))
            .collect();
        let pd = Dataset::new(px, 3, y, 2).unwrap();
        let a = train_random_forest(&d, &ForestConfig::default(), 8);
        let b = train_random_forest(&pd, &ForestConfig::default(), 8);
        for (k, &j) in perm.iter().enumerate() {
            assert_eq!(a.feature_importances()[j], b.feature_importances()[k]);
        }
    }
}
