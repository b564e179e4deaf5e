//! Score the two ideal letters representations with every metric.
//!
//! Ex.1 gives each of the four letter factors one latent dimension, Ex.2
//! gives each two. Both are perfectly disentangled by construction, yet the
//! metrics disagree about them.
//!
//! Run: cargo run --example ideal_table1 -- [seed]

use factorbench::corpus::generate_letters;
use factorbench::ideal::build_ideal;
use factorbench::metrics::{evaluate_all, MetricConfig, MetricId};

fn main() -> factorbench::Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let corpus = generate_letters()?;
    let cfg = MetricConfig {
        seed,
        ..Default::default()
    };

    let mut columns = Vec::new();
    for k in [1, 2] {
        let (_, set) = build_ideal(&corpus, k, seed, false)?;
        let report = evaluate_all(&set, &cfg, &MetricId::ALL)?;
        columns.push(report);
    }

    println!("{:<28} {:>8} {:>8}", "metric", "Ex.1", "Ex.2");
    for (a, b) in columns[0].results.iter().zip(&columns[1].results) {
        println!(
            "{:<28} {:>8} {:>8}",
            a.name, a.score_percent, b.score_percent
        );
    }
    Ok(())
}
