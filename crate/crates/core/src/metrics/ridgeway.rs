use rayon::prelude::*;

use super::{mutual_information_matrix, FactorSampler, FactorScore, MetricConfig, MetricResult};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::learners::{roc_auc, split_indices, train_logreg_ovr};
use crate::numeric::{mean, ordered_sum};
use crate::seed;

const MODULARITY: &str = "ridgeway_modularity";
const EXPLICITNESS: &str = "ridgeway_explicitness";

/// How much of each dimension's mutual information goes to its best factor.
/// A dimension sharing no information with any factor counts as modular.
pub fn ridgeway_modularity(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    let fcount = set.factors().len();
    if fcount < 2 {
        return Err(Error::metric(MODULARITY, "needs at least two factors"));
    }
    let matrix = mutual_information_matrix(set, cfg, MODULARITY)?;
    let terms: Vec<f64> = (0..set.dim())
        .map(|j| {
            let mi: Vec<f64> = matrix.iter().map(|(_, m)| m[j]).collect();
            let best = crate::numeric::argmax(&mi);
            let theta = mi[best];
            if theta <= 0.0 {
                return 1.0;
            }
            let off: f64 = mi
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != best)
                .map(|(_, m)| m * m)
                .sum();
            1.0 - off / (theta * theta * (fcount - 1) as f64)
        })
        .collect();
    let score = ordered_sum(terms.iter().copied()) / terms.len() as f64;
    Ok(MetricResult::single(MODULARITY, score))
}

/// Mean one-vs-rest ROC AUC of a logistic regression per factor, scored on
/// the training split.
pub fn ridgeway_explicitness(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    let per_factor: Vec<Vec<f64>> = (0..set.factors().len())
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, EXPLICITNESS)?;
            let mut rng = seed::derive_rng(cfg.seed, EXPLICITNESS, fi as u64, 0);
            let data = sampler.weighted_sample(cfg.n_samples, &mut rng);
            let split_seed = seed::derive_seed(cfg.seed, EXPLICITNESS, fi as u64, 1);
            let (tr, _) = split_indices(data.len(), cfg.train_fraction, split_seed)?;
            let train = data.subset(&tr);
            let model = train_logreg_ovr(&train, &cfg.logreg, 0);
            let probs: Vec<Vec<f64>> = (0..train.len())
                .map(|i| model.probabilities(train.row(i)))
                .collect();
            let mut aucs = Vec::new();
            for v in 0..train.classes {
                let scores: Vec<f64> = probs.iter().map(|p| p[v]).collect();
                match roc_auc(&scores, &train.y, v as u32) {
                    Ok(a) => aucs.push(a),
                    Err(Error::UndefinedAuc) => log::warn!(
                        "{EXPLICITNESS}: value {:?} of factor {:?} lacks positives or negatives; skipped",
                        set.value_label(fi, v),
                        set.factors()[fi].name
                    ),
                    Err(e) => return Err(e),
                }
            }
            Ok(aucs)
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = per_factor.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err(Error::metric(
            EXPLICITNESS,
            "no value has both positive and negative examples",
        ));
    }
    let mut r = MetricResult::single(EXPLICITNESS, mean(&all));
    r.per_factor = Some(
        set.factors()
            .iter()
            .zip(&per_factor)
            .filter(|(_, a)| !a.is_empty())
            .map(|(f, a)| FactorScore {
                factor: f.name.clone(),
                score: mean(a),
            })
            .collect(),
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FactorSpec;
    use crate::metrics::fixtures::{ideal_letters, noise_set};

    fn small_cfg() -> MetricConfig {
        MetricConfig {
            n_samples: 2000,
            logreg: crate::learners::LogRegConfig {
                epochs: 100,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn ideal_codes_are_modular() {
        let r = ridgeway_modularity(&ideal_letters(2, 0), &small_cfg()).unwrap();
        assert!(r.score >= 0.99, "{}", r.score);
    }

    #[test]
    fn constant_codes_are_vacuously_modular() {
        let base = noise_set(200, 1, 2, 3, 1);
        let labels = (0..base.len())
            .flat_map(|r| [base.label(r, 0), base.label(r, 1)])
            .collect();
        let set = LabeledReprSet::new(
            base.factors().to_vec(),
            base.ids().to_vec(),
            vec![1.0; base.len() * 2],
            2,
            labels,
        )
        .unwrap();
        assert_eq!(ridgeway_modularity(&set, &small_cfg()).unwrap().score, 1.0);
    }

    #[test]
    fn single_factor_is_rejected() {
        let set = noise_set(100, 2, 1, 3, 2);
        assert!(matches!(
            ridgeway_modularity(&set, &small_cfg()),
            Err(Error::Metric { .. })
        ));
    }

    #[test]
    fn one_hot_indicators_are_fully_explicit() {
        let spec = FactorSpec::new("a", (0..4).map(|v| format!("v{v}")).collect(), false).unwrap();
        let labels: Vec<Option<u16>> = (0..400).map(|i| Some((i % 4) as u16)).collect();
        let codes = labels
            .iter()
            .flat_map(|l| (0..4).map(move |j| f64::from(u8::from(l.unwrap() as usize == j))))
            .collect();
        let set = LabeledReprSet::new(
            vec![spec],
            (0..400).map(|i| i.to_string()).collect(),
            codes,
            4,
            labels,
        )
        .unwrap();
        let r = ridgeway_explicitness(&set, &small_cfg()).unwrap();
        assert_eq!(r.score, 1.0);
    }

    #[test]
    fn noise_codes_are_near_half() {
        let r = ridgeway_explicitness(&noise_set(3000, 4, 4, 5, 3), &small_cfg()).unwrap();
        assert!((r.score - 0.5).abs() < 0.05, "{}", r.score);
    }
}
