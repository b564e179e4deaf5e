//! Build an observation table from a handful of synthetic "runs" (ideal codes
//! blended with noise), then correlate the measures and tally top-3 places.
//!
//! Run: cargo run --release --example correlation_top3

use factorbench::corpus::generate_letters;
use factorbench::factor_model::LabeledReprSet;
use factorbench::ideal::build_ideal;
use factorbench::metrics::{evaluate_all, MetricConfig, MetricId};
use factorbench::stats::{
    active_units, hoyer_dataset, pearson_matrix, top3_tally, ObservationTable,
};
use rand::Rng;

fn main() -> factorbench::Result<()> {
    let (_, ideal) = build_ideal(&generate_letters()?, 2, 0, false)?;
    let cfg = MetricConfig {
        n_samples: 4000,
        n_groups: 300,
        ..Default::default()
    };
    let selection = [MetricId::Chen, MetricId::Kim, MetricId::RidgewayModularity];
    let columns = ["chen", "kim", "ridgeway_modularity", "hoyer", "mean_var"];

    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (i, noise) in [0.0, 0.1, 0.3, 0.6, 1.0].into_iter().enumerate() {
        let set = blend(&ideal, noise, i as u64)?;
        let report = evaluate_all(&set, &cfg, &selection)?;
        for name in &columns[..3] {
            values.push(report.get(name).map_or(f64::NAN, |e| e.score));
        }
        values.push(hoyer_dataset(&set)?);
        let au = active_units(&set, 0.01)?;
        values.push(au.variances.iter().sum::<f64>() / au.variances.len() as f64);
        rows.push(format!("noise{noise}"));
    }
    let table = ObservationTable::new(
        rows,
        columns.iter().map(|c| c.to_string()).collect(),
        values,
    )?;

    match pearson_matrix(&table) {
        Ok(corr) => {
            for (name, row) in corr.columns.iter().zip(&corr.matrix) {
                let cells: Vec<String> = row.iter().map(|r| format!("{r:6.2}")).collect();
                println!("{name:<20} {}", cells.join(" "));
            }
        }
        Err(e) => println!("correlation skipped: {e}"),
    }
    for (row, n) in top3_tally(&table, &columns[..3])? {
        println!("{row:<10} top-3 on {n} metric(s)");
    }
    Ok(())
}

/// Every code entry replaced by `(1-w)·x + w·u`, `u` uniform on [-1, 1].
fn blend(set: &LabeledReprSet, w: f64, seed: u64) -> factorbench::Result<LabeledReprSet> {
    let mut rng = factorbench::seed::rng_from(seed);
    let codes = set
        .codes()
        .iter()
        .map(|x| (1.0 - w) * x + w * rng.gen_range(-1.0..1.0))
        .collect();
    let labels = (0..set.len())
        .flat_map(|r| (0..set.factors().len()).map(move |f| set.label(r, f)))
        .collect();
    LabeledReprSet::new(
        set.factors().to_vec(),
        set.ids().to_vec(),
        codes,
        set.dim(),
        labels,
    )
}
