use rayon::prelude::*;

use super::{entropy_base, FactorSampler, FactorScore, MetricConfig, MetricResult};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::learners::{accuracy, split_indices, train_random_forest};
use crate::numeric::{mean, ordered_sum};
use crate::seed;

const NAME: &str = "eastwood";

/// Random-forest importances `r[i][d]` per factor, turned into three scores.
///
/// Names follow the algorithm this crate evaluates: "disentanglement" is
/// `1 - H` of each factor's distribution over dimensions (log base `d`), and
/// "completeness" is `1 - H` of each dimension's distribution over factors
/// (log base `|F|`). The usual literature names are swapped; each result
/// carries the conventional name as its alias.
pub fn eastwood_dci(
    set: &LabeledReprSet,
    cfg: &MetricConfig,
) -> Result<(MetricResult, MetricResult, MetricResult)> {
    let d = set.dim();
    let fcount = set.factors().len();
    if d < 2 || fcount < 2 {
        return Err(Error::metric(
            NAME,
            "needs at least two dimensions and two factors",
        ));
    }
    let fits: Vec<(Vec<f64>, f64)> = (0..fcount)
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, NAME)?;
            let mut rng = seed::derive_rng(cfg.seed, NAME, fi as u64, 0);
            let data = sampler.weighted_sample(cfg.n_samples, &mut rng);
            let split_seed = seed::derive_seed(cfg.seed, NAME, fi as u64, 1);
            let (tr, te) = split_indices(data.len(), cfg.train_fraction, split_seed)?;
            let forest_seed = seed::derive_seed(cfg.seed, NAME, fi as u64, 2);
            let forest = train_random_forest(&data.subset(&tr), &cfg.forest, forest_seed);
            let acc = accuracy(|x| forest.predict(x), &data.subset(&te));
            Ok((forest.feature_importances().to_vec(), acc))
        })
        .collect::<Result<_>>()?;

    let per_factor = |score: &dyn Fn(&[f64]) -> f64| -> Vec<FactorScore> {
        set.factors()
            .iter()
            .zip(&fits)
            .map(|(f, (r, _))| FactorScore {
                factor: f.name.clone(),
                score: score(r),
            })
            .collect()
    };
    let dis = per_factor(&|r| 1.0 - entropy_base(&normalized(r), d as f64));
    let inf: Vec<FactorScore> = set
        .factors()
        .iter()
        .zip(&fits)
        .map(|(f, (_, acc))| FactorScore {
            factor: f.name.clone(),
            score: *acc,
        })
        .collect();
    let com: Vec<f64> = (0..d)
        .map(|j| {
            let col: Vec<f64> = fits.iter().map(|(r, _)| r[j]).collect();
            1.0 - entropy_base(&normalized(&col), fcount as f64)
        })
        .collect();

    let mut disentanglement = MetricResult::single(
        "eastwood_disentanglement",
        mean(&dis.iter().map(|s| s.score).collect::<Vec<_>>()),
    );
    disentanglement.alias = Some("completeness".into());
    disentanglement.per_factor = Some(dis);
    let mut completeness = MetricResult::single(
        "eastwood_completeness",
        ordered_sum(com.iter().copied()) / d as f64,
    );
    completeness.alias = Some("disentanglement".into());
    let mut informativeness = MetricResult::single(
        "eastwood_informativeness",
        mean(&inf.iter().map(|s| s.score).collect::<Vec<_>>()),
    );
    informativeness.per_factor = Some(inf);
    Ok((disentanglement, completeness, informativeness))
}

/// `w / Σw`, or uniform when every weight is zero.
fn normalized(w: &[f64]) -> Vec<f64> {
    let total = ordered_sum(w.iter().copied());
    if total > 0.0 {
        w.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / w.len() as f64; w.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::fixtures::ideal_letters;

    #[test]
    fn one_hot_importances_have_zero_entropy() {
        assert_eq!(1.0 - entropy_base(&normalized(&[0.0, 1.0, 0.0]), 3.0), 1.0);
        assert_eq!(1.0 - entropy_base(&normalized(&[0.0, 0.0]), 2.0), 0.0);
        let h = entropy_base(&normalized(&[2.0, 2.0, 2.0, 2.0]), 4.0);
        assert!((h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ideal_codes_are_informative() {
        let cfg = MetricConfig {
            n_samples: 2000,
            ..Default::default()
        };
        let (dis, com, inf) = eastwood_dci(&ideal_letters(1, 0), &cfg).unwrap();
        assert!(inf.score > 0.9, "{}", inf.score);
        assert_eq!(dis.alias.as_deref(), Some("completeness"));
        assert!((0.0..=1.0).contains(&com.score));
        assert!((0.0..=1.0).contains(&dis.score));
    }
}
