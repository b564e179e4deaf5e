//! The four-letter toy set: every sequence "Ai Bj Ck Dl" with indices 1..=20.

use std::sync::Arc;

use super::{Corpus, CorpusKind, FactorSpec, SentenceRecord, SplitTag, Template, TemplatePart};
use crate::error::Result;

pub const LETTERS: [&str; 4] = ["A", "B", "C", "D"];
pub const VALUES_PER_LETTER: usize = 20;

pub fn generate_letters() -> Result<Corpus> {
    let factors = LETTERS
        .iter()
        .map(|l| {
            let values = (1..=VALUES_PER_LETTER).map(|i| format!("{l}{i}")).collect();
            FactorSpec::new(*l, values, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let template = Template {
        id: "letters".into(),
        parts: (0..LETTERS.len()).map(TemplatePart::Slot).collect(),
    };
    let n = VALUES_PER_LETTER;
    let mut records = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    records.push(SentenceRecord {
                        id: records.len() as u32,
                        structure: 0,
                        fill: vec![a as u16, b as u16, c as u16, d as u16].into(),
                    });
                }
            }
        }
    }
    Corpus::new(
        CorpusKind::Letters,
        factors,
        Arc::new(vec![template]),
        records,
        SplitTag::All,
    )
}
