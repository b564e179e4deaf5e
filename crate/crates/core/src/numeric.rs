//! Small numeric helpers shared by the learners and metrics.

/// Sum that does not depend on the order of its terms.
///
/// Terms are sorted before accumulation, so any permutation of the input
/// produces the same bits. Metrics use this for reductions over latent
/// dimensions to stay exactly invariant under column permutations.
pub fn ordered_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut v: Vec<f64> = terms.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Dot product with order-independent accumulation.
pub fn ordered_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut terms = [0.0f64; 16];
    if a.len() <= terms.len() {
        let terms = &mut terms[..a.len()];
        for (t, (x, y)) in terms.iter_mut().zip(a.iter().zip(b)) {
            *t = x * y;
        }
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    } else {
        ordered_sum(a.iter().zip(b).map(|(x, y)| x * y))
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by n).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Index of the largest value; lowest index wins ties.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Largest and second-largest entries of a slice of length >= 2.
pub fn top_two(xs: &[f64]) -> (f64, f64) {
    let best = argmax(xs);
    let runner_up = xs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &x)| x)
        .fold(f64::NEG_INFINITY, f64::max);
    (xs[best], runner_up)
}

/// Shannon entropy (nats) of a count vector; 0·log 0 = 0.
pub fn entropy_from_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * p.ln()
        })
        .sum::<f64>()
}
