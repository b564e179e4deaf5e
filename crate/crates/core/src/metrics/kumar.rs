use rayon::prelude::*;

use super::{FactorSampler, FactorScore, MetricConfig, MetricResult};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::learners::{accuracy, split_indices, train_linear_svm_ovr};
use crate::numeric::{mean, top_two};
use crate::seed;

const NAME: &str = "kumar";

/// Gap between the two best single-dimension linear SVM accuracies per
/// factor, averaged over factors.
pub fn kumar_sap(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    let d = set.dim();
    if d < 2 {
        return Err(Error::metric(NAME, "needs at least two latent dimensions"));
    }
    let fcount = set.factors().len();
    let gaps: Vec<f64> = (0..fcount)
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, NAME)?;
            let mut rng = seed::derive_rng(cfg.seed, NAME, fi as u64, 0);
            let data = sampler.weighted_sample(cfg.n_samples, &mut rng);
            let split_seed = seed::derive_seed(cfg.seed, NAME, fi as u64, 1);
            let (tr, te) = split_indices(data.len(), cfg.train_fraction, split_seed)?;
            let (train, test) = (data.subset(&tr), data.subset(&te));
            // one seed for every dimension keeps the score column-symmetric
            let svm_seed = seed::derive_seed(cfg.seed, NAME, fi as u64, 2);
            let accs: Vec<f64> = (0..d)
                .into_par_iter()
                .map(|j| {
                    let model = train_linear_svm_ovr(&train.column(j), &cfg.svm, svm_seed);
                    accuracy(|x| model.predict(x), &test.column(j))
                })
                .collect();
            let (top, second) = top_two(&accs);
            Ok(top - second)
        })
        .collect::<Result<_>>()?;
    let mut r = MetricResult::single(NAME, mean(&gaps));
    r.per_factor = Some(
        set.factors()
            .iter()
            .zip(&gaps)
            .map(|(f, &score)| FactorScore {
                factor: f.name.clone(),
                score,
            })
            .collect(),
    );
    Ok(r)
}
