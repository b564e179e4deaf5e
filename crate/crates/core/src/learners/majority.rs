use std::collections::BTreeMap;

use super::Dataset;
use crate::numeric::argmax;

/// Lookup from a single discrete input to its most frequent class.
#[derive(Debug, Clone)]
pub struct MajorityVote {
    table: BTreeMap<u64, u32>,
    fallback: u32,
}

impl MajorityVote {
    pub fn predict(&self, x: &[f64]) -> u32 {
        self.table.get(&key(x[0])).copied().unwrap_or(self.fallback)
    }
}

fn key(x: f64) -> u64 {
    // -0.0 and 0.0 are the same input
    (x + 0.0).to_bits()
}

/// Uses only the first input column.
pub fn train_majority_vote(train: &Dataset) -> MajorityVote {
    let mut counts: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for i in 0..train.len() {
        let c = counts
            .entry(key(train.row(i)[0]))
            .or_insert_with(|| vec![0.0; train.classes]);
        c[train.y[i] as usize] += 1.0;
    }
    MajorityVote {
        table: counts
            .into_iter()
            .map(|(k, c)| (k, argmax(&c) as u32))
            .collect(),
        fallback: train.majority_class(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_tie_and_fallback() {
        // 0 -> A x3, 0 -> B x1; 1 -> B, 1 -> C (tie); 2 -> B x2
        let d = Dataset::new(
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0],
            1,
            vec![0, 0, 0, 1, 2, 1, 1, 1],
            3,
        )
        .unwrap();
        let m = train_majority_vote(&d);
        assert_eq!(m.predict(&[0.0]), 0);
        assert_eq!(m.predict(&[1.0]), 1);
        assert_eq!(m.predict(&[7.0]), 1);
    }
}
