//! Generate the three corpora, print their split sizes and a few sentences,
//! and optionally write one of them to disk in the `gen` layout.
//!
//! Run: cargo run --release --example generate_corpora -- [out-dir]

use factorbench::corpus::{
    generate_letters, generate_pos, generate_ynoc, split_corpus, write_corpus_dir, Corpus,
    PosVocab, SplitRatios, YnocVocab, DEFAULT_POS_CAP,
};

fn show(name: &str, corpus: &Corpus) -> factorbench::Result<()> {
    let (train, valid, test) = split_corpus(corpus, SplitRatios::default(), 0)?;
    println!(
        "{name:<8} {:>9} sentences  split {} / {} / {}",
        corpus.len(),
        train.len(),
        valid.len(),
        test.len()
    );
    for r in corpus.records.iter().step_by(corpus.len() / 3).take(3) {
        println!("           {}", corpus.sentence(r));
    }
    Ok(())
}

fn main() -> factorbench::Result<()> {
    let ynoc = generate_ynoc(&YnocVocab::default())?;
    show("ynoc", &ynoc)?;
    show("letters", &generate_letters()?)?;
    let pos = generate_pos(&PosVocab::default(), DEFAULT_POS_CAP, 0)?;
    show("pos", &pos)?;

    if let Some(dir) = std::env::args().nth(1) {
        let (train, valid, test) = split_corpus(&ynoc, SplitRatios::default(), 0)?;
        let m = write_corpus_dir(
            dir.as_ref(),
            [&train, &valid, &test],
            0,
            None,
            SplitRatios::default(),
        )?;
        println!("wrote {} sentences to {dir}", m.counts.total);
    }
    Ok(())
}
