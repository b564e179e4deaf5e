use rayon::prelude::*;

use super::{FactorSampler, MetricConfig, MetricResult};
use crate::error::Result;
use crate::factor_model::LabeledReprSet;
use crate::learners::{split_indices, train_linear_softmax, Dataset};
use crate::seed::{self, GLOBAL};

const NAME: &str = "higgins";

/// Mean absolute difference of paired codes sharing one factor value,
/// classified back to the factor by a linear softmax.
pub fn higgins_score(set: &LabeledReprSet, cfg: &MetricConfig) -> Result<MetricResult> {
    let d = set.dim();
    let fcount = set.factors().len();
    let blocks: Vec<Vec<f64>> = (0..fcount)
        .into_par_iter()
        .map(|fi| {
            let sampler = FactorSampler::new(set, fi, cfg, NAME)?;
            let mut rng = seed::derive_rng(cfg.seed, NAME, fi as u64, 0);
            let mut out = Vec::with_capacity(cfg.n_groups * d);
            let mut acc = vec![0.0; d];
            for _ in 0..cfg.n_groups {
                let v = sampler.draw_value(&mut rng);
                acc.iter_mut().for_each(|a| *a = 0.0);
                for _ in 0..cfg.group_size {
                    let a = set.code(sampler.draw_row(v, &mut rng));
                    let b = set.code(sampler.draw_row(v, &mut rng));
                    for ((s, x), y) in acc.iter_mut().zip(a).zip(b) {
                        *s += (x - y).abs();
                    }
                }
                out.extend(acc.iter().map(|s| s / cfg.group_size as f64));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let y = (0..fcount)
        .flat_map(|f| std::iter::repeat_n(f as u32, cfg.n_groups))
        .collect();
    let data = Dataset::new(blocks.concat(), d, y, fcount)?;
    let accs: Vec<f64> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let split_seed = seed::derive_seed(cfg.seed, NAME, GLOBAL, 2 * run as u64);
            let (tr, te) = split_indices(data.len(), cfg.train_fraction, split_seed)?;
            let train_seed = seed::derive_seed(cfg.seed, NAME, GLOBAL, 2 * run as u64 + 1);
            let model = train_linear_softmax(&data.subset(&tr), &cfg.softmax, train_seed);
            let test = data.subset(&te);
            Ok(crate::learners::accuracy(|x| model.predict(x), &test))
        })
        .collect::<Result<_>>()?;
    Ok(MetricResult::from_runs(NAME, &accs))
}
