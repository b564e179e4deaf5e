use rayon::prelude::*;

use super::{FactorSampler, MetricConfig, MetricResult};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::learners::{accuracy, split_indices, train_majority_vote, Dataset};
use crate::numeric::variance;
use crate::seed::{self, GLOBAL};

const NAME: &str = "kim";

/// Index of the dimension with the least normalized variance within groups
/// sharing one factor value, classified back to the factor by majority vote.
pub fn kim_score(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    let d = set.dim();
    let sigma: Vec<f64> = (0..d).map(|j| variance(&set.column(j)).sqrt()).collect();
    let active: Vec<usize> = (0..d).filter(|&j| sigma[j] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::Degenerate(
            "every latent dimension is constant".into(),
        ));
    }
    let fcount = set.factors().len();
    let blocks: Vec<Vec<f64>> = (0..fcount)
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, NAME)?;
            let mut rng = seed::derive_rng(cfg.seed, NAME, fi as u64, 0);
            let mut out = Vec::with_capacity(cfg.n_groups);
            let mut group = vec![0.0; cfg.group_size * d];
            let mut col = vec![0.0; cfg.group_size];
            for _ in 0..cfg.n_groups {
                let v = sampler.draw_value(&mut rng);
                for l in 0..cfg.group_size {
                    let row = sampler.draw_row(v, &mut rng);
                    group[l * d..(l + 1) * d].copy_from_slice(set.code(row));
                }
                let mut best = (f64::INFINITY, active[0]);
                for &j in &active {
                    for (l, c) in col.iter_mut().enumerate() {
                        *c = group[l * d + j] / sigma[j];
                    }
                    let var = variance(&col);
                    if var < best.0 {
                        best = (var, j);
                    }
                }
                out.push(best.1 as f64);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let y = (0..fcount)
        .flat_map(|f| std::iter::repeat_n(f as u32, cfg.n_groups))
        .collect();
    let data = Dataset::new(blocks.concat(), 1, y, fcount)?;
    let accs: Vec<f64> = (0..cfg.runs)
        .map(|run| {
            let split_seed = seed::derive_seed(cfg.seed, NAME, GLOBAL, run as u64);
            let (tr, te) = split_indices(data.len(), cfg.train_fraction, split_seed)?;
            let model = train_majority_vote(&data.subset(&tr));
            Ok(accuracy(|x| model.predict(x), &data.subset(&te)))
        })
        .collect::<Result<_>>()?;
    Ok(MetricResult::from_runs(NAME, &accs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FactorSpec;
    use crate::metrics::fixtures::{ideal_letters, noise_set};

    fn small_cfg() -> MetricConfig {
        MetricConfig {
            n_groups: 300,
            runs: 3,
            ..Default::default()
        }
    }

    #[test]
    fn ideal_codes_are_fully_identified() {
        for k in [1, 2] {
            let r = kim_score(&ideal_letters(k, 3), &small_cfg()).unwrap();
            assert_eq!(r.score, 1.0, "k={k}");
        }
    }

    #[test]
    fn noise_codes_are_near_chance() {
        let r = kim_score(&noise_set(4000, 4, 4, 5, 2), &small_cfg()).unwrap();
        assert!((r.score - 0.25).abs() < 0.1, "{}", r.score);
    }

    #[test]
    fn constant_codes_are_degenerate() {
        let f = vec![FactorSpec::new("a", vec!["x".into(), "y".into()], false).unwrap()];
        let set = LabeledReprSet::new(
            f,
            vec!["0".into(), "1".into()],
            vec![1.0, 1.0],
            1,
            vec![Some(0), Some(1)],
        )
        .unwrap();
        assert!(matches!(
            kim_score(&set, &small_cfg()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn one_dimension_scores_the_majority_rate() {
        // every group picks dimension 0, so only the factor frequencies matter
        let set = noise_set(500, 1, 2, 3, 4);
        let r = kim_score(&set, &small_cfg()).unwrap();
        assert!((r.score - 0.5).abs() < 0.1, "{}", r.score);
    }
}
