//! Dimension-wise homotopy between two letters sentences on the ideal Ex.1
//! codes, decoded with the nearest-codebook decoder. Each stage changes only
//! its own letter.
//!
//! Run: cargo run --release --example homotopy_ideal -- [from-id] [to-id]

use factorbench::corpus::generate_letters;
use factorbench::homotopy::{dimensionwise_path, linear_path, nearest_codebook_sentence, Stage};
use factorbench::ideal::build_ideal;

fn main() -> factorbench::Result<()> {
    let mut args = std::env::args().skip(1);
    let from = args.next().unwrap_or_else(|| "0".into());
    let to = args.next().unwrap_or_else(|| "112542".into());
    let (book, set) = build_ideal(&generate_letters()?, 1, 0, false)?;
    let code = |id: &str| {
        set.row_of(id)
            .map(|r| set.code(r).to_vec())
            .ok_or_else(|| factorbench::Error::validation(format!("no row {id}")))
    };
    let (z1, z2) = (code(&from)?, code(&to)?);

    println!("linear");
    for s in &linear_path(&z1, &z2, 4)?.steps {
        println!("  {}", nearest_codebook_sentence(&book, &s.code)?);
    }
    println!("dimension-wise");
    for s in &dimensionwise_path(&z1, &z2, 4)?.steps {
        let Stage::Dim { dim, t } = s.stage else {
            unreachable!()
        };
        println!(
            "  z{dim} t={t:.1}  {}",
            nearest_codebook_sentence(&book, &s.code)?
        );
    }
    Ok(())
}
