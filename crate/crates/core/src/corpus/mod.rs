//! Synthetic corpora with exact generative-factor annotations.
//!
//! A corpus is a set of templates (one per sentence structure) plus records
//! that fill each template's slots with value ids. Tokens are never stored:
//! they are rebuilt from `(structure, fill)`, which keeps the multi-million
//! sentence POS corpus compact and makes every record reproducible from its
//! annotation alone.

mod io;
mod letters;
mod pos;
mod split;
mod ynoc;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_corpus_dir, write_corpus_dir, CorpusManifest, SplitCounts};
pub use letters::generate_letters;
pub use pos::{
    enumerate_pos_structures, generate_pos, structure_sentence_count, PosStructure, PosTag,
    PosVocab, Rule, StructureKind, DEFAULT_POS_CAP,
};
pub use split::{split_corpus, SplitRatios};
pub use ynoc::{generate_ynoc, YnocVocab};

/// Annotation marker for a factor that does not occur in a sentence.
pub const ABSENT: &str = "-";

/// One generative factor and its ordered value labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub values: Vec<String>,
    #[serde(default)]
    pub allow_absent: bool,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, values: Vec<String>, allow_absent: bool) -> Result<Self> {
        let spec = FactorSpec {
            name: name.into(),
            values,
            allow_absent,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::validation("factor name is empty"));
        }
        if self.values.is_empty() {
            return Err(Error::validation(format!(
                "factor {:?} has no values",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for v in &self.values {
            if v == ABSENT {
                return Err(Error::validation(format!(
                    "factor {:?}: {ABSENT:?} is reserved for absent values",
                    self.name
                )));
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateValue {
                    list: self.name.clone(),
                    value: v.clone(),
                });
            }
        }
        if self.values.len() >= u16::MAX as usize {
            return Err(Error::validation(format!(
                "factor {:?} has too many values",
                self.name
            )));
        }
        Ok(())
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// One piece of a sentence template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplatePart {
    /// A fixed token.
    Word(String),
    /// A token chosen from the values of the factor at this index.
    Slot(usize),
    /// "a" or "an", agreeing with the value of the given factor's slot.
    Article(usize),
}

/// A sentence structure: fixed words interleaved with factor slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub parts: Vec<TemplatePart>,
}

impl Template {
    /// Factor index of every slot, in sentence order.
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.parts.iter().filter_map(|p| match p {
            TemplatePart::Slot(f) => Some(*f),
            _ => None,
        })
    }

    pub fn slot_count(&self) -> usize {
        self.slots().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Valid,
    Test,
    All,
}

impl SplitTag {
    pub const PARTS: [SplitTag; 3] = [SplitTag::Train, SplitTag::Valid, SplitTag::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Valid => "valid",
            SplitTag::Test => "test",
            SplitTag::All => "all",
        }
    }
}

impl fmt::Display for SplitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitTag::Train),
            "valid" => Ok(SplitTag::Valid),
            "test" => Ok(SplitTag::Test),
            "all" => Ok(SplitTag::All),
            other => Err(Error::validation(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Ynoc,
    Pos,
    Letters,
}

impl CorpusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorpusKind::Ynoc => "ynoc",
            CorpusKind::Pos => "pos",
            CorpusKind::Letters => "letters",
        }
    }
}

/// A generated sentence: its template and the value id chosen for each slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    /// Position in the unsplit corpus; stable across splits.
    pub id: u32,
    /// Index into the corpus template table.
    pub structure: u32,
    /// One value id per template slot, in sentence order.
    pub fill: Box<[u16]>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub kind: CorpusKind,
    pub factors: Vec<FactorSpec>,
    pub templates: Arc<Vec<Template>>,
    pub records: Vec<SentenceRecord>,
    pub split: SplitTag,
}

impl Corpus {
    pub fn new(
        kind: CorpusKind,
        factors: Vec<FactorSpec>,
        templates: Arc<Vec<Template>>,
        records: Vec<SentenceRecord>,
        split: SplitTag,
    ) -> Result<Self> {
        let corpus = Corpus {
            kind,
            factors,
            templates,
            records,
            split,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    fn validate(&self) -> Result<()> {
        for f in &self.factors {
            f.validate()?;
        }
        let mut names = HashSet::new();
        for f in &self.factors {
            if !names.insert(f.name.as_str()) {
                return Err(Error::validation(format!("duplicate factor {:?}", f.name)));
            }
        }
        for t in self.templates.iter() {
            for part in &t.parts {
                if let TemplatePart::Slot(f) | TemplatePart::Article(f) = part {
                    if *f >= self.factors.len() {
                        return Err(Error::validation(format!(
                            "template {} refers to factor #{f}",
                            t.id
                        )));
                    }
                }
            }
            for (fi, f) in self.factors.iter().enumerate() {
                if !f.allow_absent && !t.slots().any(|s| s == fi) {
                    return Err(Error::validation(format!(
                        "template {} lacks required factor {:?}",
                        t.id, f.name
                    )));
                }
            }
        }
        for r in &self.records {
            let t = self.templates.get(r.structure as usize).ok_or_else(|| {
                Error::validation(format!("record {} has unknown structure", r.id))
            })?;
            if t.slot_count() != r.fill.len() {
                return Err(Error::validation(format!(
                    "record {} fills {} slots of a {}-slot template",
                    r.id,
                    r.fill.len(),
                    t.slot_count()
                )));
            }
            for (f, &v) in t.slots().zip(r.fill.iter()) {
                if v as usize >= self.factors[f].values.len() {
                    return Err(Error::validation(format!(
                        "record {} uses value #{v} of factor {:?}",
                        r.id, self.factors[f].name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn template(&self, record: &SentenceRecord) -> &Template {
        &self.templates[record.structure as usize]
    }

    pub fn structure_id(&self, record: &SentenceRecord) -> &str {
        &self.template(record).id
    }

    pub fn tokens<'a>(&'a self, record: &SentenceRecord) -> Vec<&'a str> {
        let template = self.template(record);
        let mut fill = record.fill.iter();
        let mut out = Vec::with_capacity(template.parts.len());
        for part in &template.parts {
            match part {
                TemplatePart::Word(w) => out.push(w.as_str()),
                TemplatePart::Slot(f) => {
                    let v = *fill.next().expect("fill length checked at construction");
                    out.push(self.factors[*f].values[v as usize].as_str());
                }
                TemplatePart::Article(f) => {
                    let word = self.first_slot_value(template, record, *f);
                    out.push(indefinite_article(word));
                }
            }
        }
        out
    }

    fn first_slot_value(
        &self,
        template: &Template,
        record: &SentenceRecord,
        factor: usize,
    ) -> &str {
        template
            .slots()
            .zip(record.fill.iter())
            .find(|(f, _)| *f == factor)
            .map(|(_, &v)| self.factors[factor].values[v as usize].as_str())
            .unwrap_or("")
    }

    pub fn sentence(&self, record: &SentenceRecord) -> String {
        self.tokens(record).join(" ")
    }

    /// Canonical factor values: the first slot of each factor, `None` if absent.
    pub fn assignment(&self, record: &SentenceRecord) -> Vec<Option<u16>> {
        let mut out = vec![None; self.factors.len()];
        for (f, &v) in self.template(record).slots().zip(record.fill.iter()) {
            if out[f].is_none() {
                out[f] = Some(v);
            }
        }
        out
    }

    /// Every slot value per factor, in sentence order.
    pub fn slot_assignment(&self, record: &SentenceRecord) -> Vec<Vec<u16>> {
        let mut out = vec![Vec::new(); self.factors.len()];
        for (f, &v) in self.template(record).slots().zip(record.fill.iter()) {
            out[f].push(v);
        }
        out
    }

    /// Largest number of slots any template gives each factor.
    pub fn max_slots(&self) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for t in self.templates.iter() {
            let mut counts = vec![0; self.factors.len()];
            for f in t.slots() {
                counts[f] += 1;
            }
            for (o, c) in out.iter_mut().zip(counts) {
                *o = (*o).max(c);
            }
        }
        out
    }

    /// A corpus sharing this one's factors and templates with other records.
    pub fn with_records(&self, records: Vec<SentenceRecord>, split: SplitTag) -> Corpus {
        Corpus {
            kind: self.kind,
            factors: self.factors.clone(),
            templates: Arc::clone(&self.templates),
            records,
            split,
        }
    }
}

pub(crate) fn indefinite_article(word: &str) -> &'static str {
    match word.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

pub(crate) fn check_unique(list: &str, values: &[String]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::validation(format!("{list} list is empty")));
    }
    let mut seen = HashSet::new();
    for v in values {
        if v.is_empty() || v.chars().any(char::is_whitespace) {
            return Err(Error::validation(format!(
                "{list} entry {v:?} must be a single non-empty token"
            )));
        }
        if !seen.insert(v.as_str()) {
            return Err(Error::DuplicateValue {
                list: list.to_string(),
                value: v.clone(),
            });
        }
    }
    Ok(())
}
