use crate::numeric::entropy_from_counts;

/// Histogram estimate of the mutual information between one latent
/// dimension and a discrete factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    /// `H(z_d) - H(z_d | f)`, nats.
    pub mi: f64,
    /// Entropy of the label sample, nats.
    pub label_entropy: f64,
    /// Entropy of the binned values, nats.
    pub value_entropy: f64,
}

/// Uniform bins over `[min, max]` of `values`. The max lands in the last bin;
/// a constant input puts everything in bin 0.
pub fn bin_indices(values: &[f64], bins: usize) -> Vec<usize> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if values.is_empty() || hi <= lo {
        return vec![0; values.len()];
    }
    let width = hi - lo;
    values
        .iter()
        .map(|&x| (((x - lo) / width * bins as f64) as usize).min(bins - 1))
        .collect()
}

/// `labels` are class ids below `classes`; `bins >= 2`.
pub fn discrete_mutual_information(
    values: &[f64],
    labels: &[u32],
    classes: usize,
    bins: usize,
) -> MutualInformation {
    assert_eq!(values.len(), labels.len());
    assert!(bins >= 2, "need at least two bins");
    let idx = bin_indices(values, bins);
    let mut joint = vec![0usize; classes * bins];
    let mut marginal = vec![0usize; bins];
    let mut label_counts = vec![0usize; classes];
    for (&b, &l) in idx.iter().zip(labels) {
        joint[l as usize * bins + b] += 1;
        marginal[b] += 1;
        label_counts[l as usize] += 1;
    }
    let n = values.len() as f64;
    let value_entropy = entropy_from_counts(&marginal);
    let conditional: f64 = label_counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(j, &c)| c as f64 / n * entropy_from_counts(&joint[j * bins..(j + 1) * bins]))
        .sum();
    MutualInformation {
        mi: (value_entropy - conditional).max(0.0),
        label_entropy: entropy_from_counts(&label_counts),
        value_entropy,
    }
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::seed::rng_from;

    #[test]
    fn injective_map_recovers_label_entropy() {
        let labels: Vec<u32> = (0..2000).map(|i| i % 20).collect();
        let values: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let r = discrete_mutual_information(&values, &labels, 20, 20);
        assert!((r.mi - 20f64.ln()).abs() < 1e-12);
        assert!((r.label_entropy - 20f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn independent_values_carry_no_information() {
        let mut rng = rng_from(9);
        let labels: Vec<u32> = (0..10_000).map(|_| rng.gen_range(0..4)).collect();
        let values: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
        let r = discrete_mutual_information(&values, &labels, 4, 20);
        assert!(r.mi < 0.01, "{}", r.mi);
    }

    #[test]
    fn constant_values_carry_no_information() {
        let r = discrete_mutual_information(&[2.0; 10], &[0, 1, 0, 1, 2, 0, 1, 2, 0, 1], 3, 20);
        assert_eq!(r.mi, 0.0);
    }

    #[test]
    fn max_edge_goes_to_last_bin() {
        assert_eq!(bin_indices(&[0.0, 0.5, 1.0], 2), vec![0, 1, 1]);
        assert_eq!(bin_indices(&[0.0, 0.25, 1.0], 4), vec![0, 1, 3]);
    }
}
