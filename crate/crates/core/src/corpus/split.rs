use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Corpus, SplitTag};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            valid: 0.2,
            test: 0.2,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, valid: f64, test: f64) -> Result<Self> {
        let r = SplitRatios { train, valid, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::validation(format!(
                "split ratios must all be positive, got {parts:?}"
            )));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "split ratios must sum to 1, got {parts:?}"
            )));
        }
        Ok(())
    }

    /// Parse "0.6,0.2,0.2".
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation(format!("bad ratio {p:?}")))
            })
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [a, b, c] => SplitRatios::new(*a, *b, *c),
            _ => Err(Error::validation(format!(
                "expected three ratios, got {s:?}"
            ))),
        }
    }

    /// Sizes of the three parts of a group of `n` records; `None` when some
    /// part would be empty.
    pub fn sizes(&self, n: usize) -> Option<[usize; 3]> {
        let valid = (n as f64 * self.valid).round() as usize;
        let test = (n as f64 * self.test).round() as usize;
        let train = n.checked_sub(valid + test)?;
        if train == 0 || valid == 0 || test == 0 {
            return None;
        }
        Some([train, valid, test])
    }
}

/// Split a corpus into train/valid/test, stratified by structure.
///
/// Each structure's records are shuffled with a structure-specific seed and
/// cut by the ratios, so every structure is represented in every part.
/// Structures too small to populate all three parts go entirely to train.
pub fn split_corpus(
    corpus: &Corpus,
    ratios: SplitRatios,
    seed: u64,
) -> Result<(Corpus, Corpus, Corpus)> {
    ratios.validate()?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); corpus.templates.len()];
    for (i, r) in corpus.records.iter().enumerate() {
        groups[r.structure as usize].push(i);
    }
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (si, mut group) in groups.into_iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let Some([train, valid, _]) = ratios.sizes(group.len()) else {
            log::warn!(
                "structure {} has {} records, too few to split; assigning all to train",
                corpus.templates[si].id,
                group.len()
            );
            parts[0].extend(group);
            continue;
        };
        let mut rng = seed::derive_rng(seed, "split", si as u64, 0);
        group.shuffle(&mut rng);
        parts[0].extend_from_slice(&group[..train]);
        parts[1].extend_from_slice(&group[train..train + valid]);
        parts[2].extend_from_slice(&group[train + valid..]);
    }
    let [train, valid, test] = parts.map(|mut idx| {
        idx.sort_unstable();
        idx
    });
    let take = |idx: Vec<usize>, tag: SplitTag| {
        corpus.with_records(
            idx.into_iter().map(|i| corpus.records[i].clone()).collect(),
            tag,
        )
    };
    Ok((
        take(train, SplitTag::Train),
        take(valid, SplitTag::Valid),
        take(test, SplitTag::Test),
    ))
}
