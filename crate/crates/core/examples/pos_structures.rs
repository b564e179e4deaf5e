//! List the simple POS structures with their uncapped sentence counts, and
//! summarize the complex structures built from them.
//!
//! Run: cargo run --example pos_structures

use factorbench::corpus::{
    enumerate_pos_structures, structure_sentence_count, PosVocab, Rule, StructureKind,
};

fn main() -> factorbench::Result<()> {
    let vocab = PosVocab::default();
    let all = enumerate_pos_structures();
    for s in all.iter().filter(|s| s.kind == StructureKind::Simple) {
        println!(
            "{:<6} {:>8}  {s}",
            s.id,
            structure_sentence_count(s, &vocab)?
        );
    }
    let complex: Vec<_> = all
        .iter()
        .filter(|s| s.kind == StructureKind::Complex)
        .collect();
    println!("{} complex structures", complex.len());
    for rule in Rule::ALL {
        let n = complex.iter().filter(|s| s.rule == Some(rule)).count();
        println!("  rule {rule:?}: {n}");
    }
    Ok(())
}
