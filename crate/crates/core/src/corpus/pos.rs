//! Part-of-speech grammar corpus.
//!
//! Simple structures follow `(adj.) n. (adv.) v. (prep.) (adj.) n. end-punc.`;
//! complex structures join two simple clauses with one of three conjunction
//! rules. Within a sentence no word is used twice, so a tag with `k` slots
//! and `m` words contributes `m·(m-1)···(m-k+1)` choices. Sentences of a
//! structure are addressed by a mixed-radix index over those choices, which
//! lets a capped structure be subsampled without enumerating it.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_unique, Corpus, CorpusKind, FactorSpec, SentenceRecord, SplitTag, Template, TemplatePart,
};
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_POS_CAP: usize = 10_000;

/// Clause length limit for complex structures (tags of S1 plus S2, end-punc. excluded).
pub const MAX_COMPLEX_TAGS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PosTag {
    #[serde(rename = "n.")]
    Noun,
    #[serde(rename = "v.")]
    Verb,
    #[serde(rename = "adj.")]
    Adj,
    #[serde(rename = "adv.")]
    Adv,
    #[serde(rename = "prep.")]
    Prep,
    #[serde(rename = "conj1.")]
    Conj1,
    #[serde(rename = "conj2.")]
    Conj2,
    #[serde(rename = "comma")]
    Comma,
    #[serde(rename = "end-punc.")]
    EndPunc,
}

impl PosTag {
    pub const ALL: [PosTag; 9] = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Adv,
        PosTag::Prep,
        PosTag::Conj1,
        PosTag::Conj2,
        PosTag::Comma,
        PosTag::EndPunc,
    ];

    /// Tags that act as generative factors. The comma has a single word and
    /// carries no choice, so it is a fixed token.
    pub const FACTORS: [PosTag; 8] = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Adv,
        PosTag::Prep,
        PosTag::Conj1,
        PosTag::Conj2,
        PosTag::EndPunc,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PosTag::Noun => "n.",
            PosTag::Verb => "v.",
            PosTag::Adj => "adj.",
            PosTag::Adv => "adv.",
            PosTag::Prep => "prep.",
            PosTag::Conj1 => "conj1.",
            PosTag::Conj2 => "conj2.",
            PosTag::Comma => "comma",
            PosTag::EndPunc => "end-punc.",
        }
    }

    /// Whether a sentence may lack this tag.
    pub fn optional(self) -> bool {
        !matches!(self, PosTag::Noun | PosTag::Verb | PosTag::EndPunc)
    }

    fn factor_index(self) -> Option<usize> {
        PosTag::FACTORS.iter().position(|&t| t == self)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosVocab {
    pub words: BTreeMap<PosTag, Vec<String>>,
}

impl Default for PosVocab {
    fn default() -> Self {
        let table: [(PosTag, &[&str]); 9] = [
            (PosTag::Noun, &["dogs", "cats", "foxes", "horses", "tigers"]),
            (PosTag::Verb, &["want", "need", "have", "get", "require"]),
            (
                PosTag::Adv,
                &[
                    "really",
                    "recently",
                    "gradually",
                    "frequently",
                    "eventually",
                ],
            ),
            (
                PosTag::Adj,
                &["happy", "big", "small", "beautiful", "fantastic"],
            ),
            (PosTag::Prep, &["on", "in", "for", "to", "of"]),
            (
                PosTag::Conj1,
                &["although", "because", "when", "where", "whereas"],
            ),
            (PosTag::Conj2, &["and", "or"]),
            (PosTag::Comma, &[","]),
            (PosTag::EndPunc, &[".", "!"]),
        ];
        PosVocab {
            words: table
                .iter()
                .map(|(t, ws)| (*t, ws.iter().map(|w| w.to_string()).collect()))
                .collect(),
        }
    }
}

impl PosVocab {
    pub fn words(&self, tag: PosTag) -> &[String] {
        self.words.get(&tag).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = HashSet::new();
        for tag in PosTag::ALL {
            let words = self.words(tag);
            check_unique(tag.label(), words)?;
            for w in words {
                if !all.insert(w.as_str()) {
                    return Err(Error::DuplicateValue {
                        list: "POS vocabulary".into(),
                        value: w.clone(),
                    });
                }
            }
        }
        if self.words(PosTag::Comma).len() != 1 {
            return Err(Error::validation(
                "comma vocabulary must hold exactly one token",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Simple,
    Complex,
}

/// Conjunction rule joining two simple clauses S1 and S2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// conj1. S1 comma S2 end-punc.
    I,
    /// S1 conj1. S2 end-punc.
    II,
    /// S1 comma conj2. S2 end-punc.
    III,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::I, Rule::II, Rule::III];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosStructure {
    pub id: String,
    pub kind: StructureKind,
    /// Full tag sequence, ending with end-punc.
    pub tags: Vec<PosTag>,
    pub rule: Option<Rule>,
    /// Indices of the two simple structures a complex structure joins.
    pub components: Option<(usize, usize)>,
}

impl PosStructure {
    /// Tags excluding the final end-punc.
    pub fn clause(&self) -> &[PosTag] {
        &self.tags[..self.tags.len() - 1]
    }

    fn template(&self, vocab: &PosVocab) -> Template {
        let parts = self
            .tags
            .iter()
            .map(|&t| match t.factor_index() {
                Some(f) => TemplatePart::Slot(f),
                None => TemplatePart::Word(vocab.words(t)[0].clone()),
            })
            .collect();
        Template {
            id: self.id.clone(),
            parts,
        }
    }
}

impl fmt::Display for PosStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.tags.iter().map(|t| t.label()).collect();
        f.write_str(&labels.join(" "))
    }
}

fn simple_tags(mask: usize) -> Vec<PosTag> {
    // bit 3: leading adj., bit 1: adv., bit 2: prep., bit 0: adj. before the object
    let mut tags = Vec::with_capacity(8);
    if mask & 0b1000 != 0 {
        tags.push(PosTag::Adj);
    }
    tags.push(PosTag::Noun);
    if mask & 0b0010 != 0 {
        tags.push(PosTag::Adv);
    }
    tags.push(PosTag::Verb);
    if mask & 0b0100 != 0 {
        tags.push(PosTag::Prep);
    }
    if mask & 0b0001 != 0 {
        tags.push(PosTag::Adj);
    }
    tags.push(PosTag::Noun);
    tags
}

/// The 16 simple structures (in table order) followed by the 279 complex ones.
pub fn enumerate_pos_structures() -> Vec<PosStructure> {
    let clauses: Vec<Vec<PosTag>> = (0..16).map(simple_tags).collect();
    let mut out: Vec<PosStructure> = clauses
        .iter()
        .enumerate()
        .map(|(i, clause)| {
            let mut tags = clause.clone();
            tags.push(PosTag::EndPunc);
            PosStructure {
                id: format!("s{i:02}"),
                kind: StructureKind::Simple,
                tags,
                rule: None,
                components: None,
            }
        })
        .collect();

    let mut n = 0;
    for rule in Rule::ALL {
        for (i, s1) in clauses.iter().enumerate() {
            for (j, s2) in clauses.iter().enumerate() {
                if s1.len() + s2.len() > MAX_COMPLEX_TAGS {
                    continue;
                }
                let mut tags = Vec::with_capacity(s1.len() + s2.len() + 3);
                match rule {
                    Rule::I => {
                        tags.push(PosTag::Conj1);
                        tags.extend_from_slice(s1);
                        tags.push(PosTag::Comma);
                    }
                    Rule::II => {
                        tags.extend_from_slice(s1);
                        tags.push(PosTag::Conj1);
                    }
                    Rule::III => {
                        tags.extend_from_slice(s1);
                        tags.push(PosTag::Comma);
                        tags.push(PosTag::Conj2);
                    }
                }
                tags.extend_from_slice(s2);
                tags.push(PosTag::EndPunc);
                out.push(PosStructure {
                    id: format!("c{n:03}"),
                    kind: StructureKind::Complex,
                    tags,
                    rule: Some(rule),
                    components: Some((i, j)),
                });
                n += 1;
            }
        }
    }
    out
}

/// Per-factor slot layout of a structure: for each factor tag present, the
/// slot positions it fills and the number of words available.
struct SlotPlan {
    groups: Vec<(Vec<usize>, usize)>,
    slot_count: usize,
    total: u64,
}

impl SlotPlan {
    fn new(structure: &PosStructure, vocab: &PosVocab) -> Result<Self> {
        let mut positions: BTreeMap<PosTag, Vec<usize>> = BTreeMap::new();
        let mut slot = 0;
        for &t in &structure.tags {
            if t.factor_index().is_some() {
                positions.entry(t).or_default().push(slot);
                slot += 1;
            }
        }
        let mut total: u64 = 1;
        let mut groups = Vec::new();
        for (tag, pos) in positions {
            let m = vocab.words(tag).len();
            if pos.len() > m {
                return Err(Error::Generation {
                    structure: format!("{} ({structure})", structure.id),
                    reason: format!(
                        "needs {} distinct {} words but the vocabulary has {m}",
                        pos.len(),
                        tag.label()
                    ),
                });
            }
            total *= falling_factorial(m as u64, pos.len() as u64);
            groups.push((pos, m));
        }
        Ok(SlotPlan {
            groups,
            slot_count: slot,
            total,
        })
    }

    /// Decode a sentence index in `0..total` into word ids per slot.
    fn unrank(&self, mut index: u64) -> Box<[u16]> {
        let mut fill = vec![0u16; self.slot_count];
        let mut remaining: Vec<u16> = Vec::new();
        for (positions, m) in &self.groups {
            remaining.clear();
            remaining.extend(0..*m as u16);
            for &p in positions {
                let base = remaining.len() as u64;
                let digit = (index % base) as usize;
                index /= base;
                fill[p] = remaining.remove(digit);
            }
        }
        fill.into_boxed_slice()
    }
}

fn falling_factorial(m: u64, k: u64) -> u64 {
    (0..k).map(|i| m - i).product()
}

/// Number of sentences a structure yields before capping.
pub fn structure_sentence_count(structure: &PosStructure, vocab: &PosVocab) -> Result<u64> {
    Ok(SlotPlan::new(structure, vocab)?.total)
}

/// Generate every structure's sentences, uniformly subsampling structures
/// with more than `cap` sentences.
pub fn generate_pos(vocab: &PosVocab, cap: usize, seed: u64) -> Result<Corpus> {
    vocab.validate()?;
    if cap == 0 {
        return Err(Error::validation("cap must be positive"));
    }
    let structures = enumerate_pos_structures();
    let factors = PosTag::FACTORS
        .iter()
        .map(|&t| FactorSpec::new(t.label(), vocab.words(t).to_vec(), t.optional()))
        .collect::<Result<Vec<_>>>()?;
    let templates: Vec<Template> = structures.iter().map(|s| s.template(vocab)).collect();

    let fills: Vec<Vec<Box<[u16]>>> = structures
        .par_iter()
        .enumerate()
        .map(|(si, structure)| {
            let plan = SlotPlan::new(structure, vocab)?;
            let total = plan.total as usize;
            let fills = if total > cap {
                let mut rng = seed::derive_rng(seed, "pos-cap", si as u64, 0);
                let mut picked = index::sample(&mut rng, total, cap).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|i| plan.unrank(i as u64)).collect()
            } else {
                (0..plan.total).map(|i| plan.unrank(i)).collect()
            };
            Ok(fills)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(fills.iter().map(Vec::len).sum());
    for (si, structure_fills) in fills.into_iter().enumerate() {
        for fill in structure_fills {
            records.push(SentenceRecord {
                id: records.len() as u32,
                structure: si as u32,
                fill,
            });
        }
    }
    Corpus::new(
        CorpusKind::Pos,
        factors,
        Arc::new(templates),
        records,
        SplitTag::All,
    )
}
