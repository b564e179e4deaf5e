use rayon::prelude::*;

use super::{FactorSampler, FactorScore, MetricConfig, MetricResult};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::learners::discrete_mutual_information;
use crate::numeric::{argmax, mean};
use crate::seed;

const NAME: &str = "chen";

/// Per factor: its entropy `H(f)` from the value frequencies and the binned
/// mutual information with every dimension, estimated on `N·p(v)` codes per
/// value drawn under `scope`.
pub fn mutual_information_matrix(
    set: &LabeledReprSet,
    cfg: &MetricConfig,
    scope: &str,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let d = set.dim();
    (0..set.factors().len())
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, scope)?;
            let probs = sampler.probabilities();
            let h = super::entropy_base(&probs, std::f64::consts::E);
            let mut rng = seed::derive_rng(cfg.seed, scope, fi as u64, 0);
            let data = sampler.weighted_sample(cfg.n_samples, &mut rng);
            let mi = (0..d)
                .map(|j| {
                    let col = data.column(j);
                    discrete_mutual_information(&col.x, &col.y, col.classes, cfg.bins).mi
                })
                .collect();
            Ok((h, mi))
        })
        .collect()
}

/// Normalized gap between the two most informative dimensions per factor,
/// averaged over factors with positive entropy.
pub fn chen_mig(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    if set.dim() < 2 {
        return Err(Error::metric(NAME, "needs at least two latent dimensions"));
    }
    let matrix = mutual_information_matrix(set, cfg, NAME)?;
    let mut per_factor = Vec::new();
    for (f, (h, mi)) in set.factors().iter().zip(&matrix) {
        if *h <= 0.0 {
            log::warn!("{NAME}: factor {:?} takes a single value; skipped", f.name);
            continue;
        }
        let norm: Vec<f64> = mi.iter().map(|m| m / h).collect();
        let best = argmax(&norm);
        let runner_up = norm
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != best)
            .map(|(_, &x)| x)
            .fold(f64::NEG_INFINITY, f64::max);
        per_factor.push(FactorScore {
            factor: f.name.clone(),
            score: norm[best] - runner_up,
        });
    }
    if per_factor.is_empty() {
        return Err(Error::metric(NAME, "no factor takes two or more values"));
    }
    let scores: Vec<f64> = per_factor.iter().map(|s| s.score).collect();
    let mut r = MetricResult::single(NAME, mean(&scores));
    r.per_factor = Some(per_factor);
    Ok(r)
}
