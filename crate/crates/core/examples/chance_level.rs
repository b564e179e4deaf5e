//! Metrics on codes that ignore the factors entirely: Gaussian noise labelled
//! with four independent factors. Classifier-based scores should sit at
//! chance and the information-based ones near zero.
//!
//! Run: cargo run --release --example chance_level -- [seed]

use factorbench::corpus::FactorSpec;
use factorbench::factor_model::LabeledReprSet;
use factorbench::metrics::{evaluate_all, MetricConfig, MetricId};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> factorbench::Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let (n, d, factors, values) = (20_000, 8, 4, 10);
    let mut rng = factorbench::seed::rng_from(seed);
    let specs = (0..factors)
        .map(|f| {
            FactorSpec::new(
                format!("f{f}"),
                (0..values).map(|v| format!("f{f}v{v}")).collect(),
                false,
            )
        })
        .collect::<factorbench::Result<Vec<_>>>()?;
    let codes = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    let labels = (0..n * factors)
        .map(|_| Some(rng.gen_range(0..values as u16)))
        .collect();
    let set = LabeledReprSet::new(
        specs,
        (0..n).map(|i| i.to_string()).collect(),
        codes,
        d,
        labels,
    )?;

    let cfg = MetricConfig {
        seed,
        ..Default::default()
    };
    let selection = [
        MetricId::Higgins,
        MetricId::Kim,
        MetricId::Chen,
        MetricId::RidgewayExplicitness,
    ];
    let report = evaluate_all(&set, &cfg, &selection)?;
    println!(
        "chance for {factors} factors: {:.2}",
        100.0 / factors as f64
    );
    for r in &report.results {
        println!("{:<24} {:>7}", r.name, r.score_percent);
    }
    Ok(())
}
