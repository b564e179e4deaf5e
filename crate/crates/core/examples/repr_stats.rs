//! Hoyer sparsity and active units for the ideal letters codes and for a
//! one-hot-per-row code where each row fires a single dimension.
//!
//! Run: cargo run --release --example repr_stats

use factorbench::corpus::{generate_letters, FactorSpec};
use factorbench::factor_model::LabeledReprSet;
use factorbench::ideal::build_ideal;
use factorbench::stats::{active_units, hoyer_dataset, hoyer_vector, DEFAULT_AU_THRESHOLD};

fn main() -> factorbench::Result<()> {
    println!("hoyer (3, 4)        = {:.4}", hoyer_vector(&[3.0, 4.0])?);
    println!(
        "hoyer (1, 0, 0, 0)  = {:.4}",
        hoyer_vector(&[1.0, 0.0, 0.0, 0.0])?
    );

    let letters = generate_letters()?;
    for k in [1, 2] {
        let (_, set) = build_ideal(&letters, k, 0, false)?;
        let au = active_units(&set, DEFAULT_AU_THRESHOLD)?;
        println!(
            "ideal k={k}: hoyer {:.4}, active units {}/{}",
            hoyer_dataset(&set)?,
            au.count,
            set.dim()
        );
    }

    let d = 6;
    let n = 600;
    let codes = (0..n)
        .flat_map(|i| (0..d).map(move |j| f64::from(u8::from(i % d == j))))
        .collect();
    let spec = FactorSpec::new("slot", (0..d).map(|j| format!("s{j}")).collect(), false)?;
    let labels = (0..n).map(|i| Some((i % d) as u16)).collect();
    let one_hot = LabeledReprSet::new(
        vec![spec],
        (0..n).map(|i| i.to_string()).collect(),
        codes,
        d,
        labels,
    )?;
    println!("one-hot rows: hoyer {:.4}", hoyer_dataset(&one_hot)?);
    Ok(())
}
