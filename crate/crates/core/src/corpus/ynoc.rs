//! Year / Name / Occupation / City sentences from three templates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    check_unique, Corpus, CorpusKind, FactorSpec, SentenceRecord, SplitTag, Template, TemplatePart,
};
use crate::error::Result;

const YEAR: usize = 0;
const NAME: usize = 1;
const OCCUPATION: usize = 2;
const CITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YnocVocab {
    pub years: Vec<String>,
    pub names: Vec<String>,
    pub occupations: Vec<String>,
    pub cities: Vec<String>,
}

impl Default for YnocVocab {
    /// Built-in lists of 10 years, 40 names, 20 occupations and 30 cities.
    fn default() -> Self {
        fn owned(words: &[&str]) -> Vec<String> {
            words.iter().map(|w| w.to_string()).collect()
        }
        YnocVocab {
            years: owned(&[
                "1990", "1991", "1992", "1993", "1994", "1995", "1996", "1997", "1998", "1999",
            ]),
            names: owned(&[
                "alice", "bob", "carol", "david", "emma", "frank", "grace", "henry", "isabel",
                "jack", "kate", "liam", "mia", "noah", "olivia", "peter", "quinn", "rachel", "sam",
                "tina", "uma", "victor", "wendy", "xavier", "yara", "zack", "amber", "brian",
                "chloe", "daniel", "ella", "felix", "gina", "harry", "ivy", "james", "karen",
                "leo", "maria", "nathan",
            ]),
            occupations: owned(&[
                "engineer",
                "teacher",
                "doctor",
                "artist",
                "lawyer",
                "nurse",
                "actor",
                "farmer",
                "writer",
                "officer",
                "pilot",
                "architect",
                "baker",
                "editor",
                "dentist",
                "singer",
                "accountant",
                "chef",
                "musician",
                "scientist",
            ]),
            cities: owned(&[
                "london",
                "paris",
                "berlin",
                "madrid",
                "rome",
                "vienna",
                "prague",
                "dublin",
                "lisbon",
                "athens",
                "oslo",
                "stockholm",
                "helsinki",
                "warsaw",
                "budapest",
                "amsterdam",
                "brussels",
                "copenhagen",
                "zurich",
                "geneva",
                "milan",
                "munich",
                "barcelona",
                "edinburgh",
                "manchester",
                "tokyo",
                "seoul",
                "sydney",
                "toronto",
                "chicago",
            ]),
        }
    }
}

impl YnocVocab {
    pub fn validate(&self) -> Result<()> {
        check_unique("years", &self.years)?;
        check_unique("names", &self.names)?;
        check_unique("occupations", &self.occupations)?;
        check_unique("cities", &self.cities)
    }

    pub fn sentence_count(&self) -> usize {
        3 * self.years.len() * self.names.len() * self.occupations.len() * self.cities.len()
    }
}

fn templates() -> Vec<Template> {
    use TemplatePart::{Article, Slot, Word};
    let w = |s: &str| Word(s.to_string());
    vec![
        // in Y , N was a/an O in C .
        Template {
            id: "I".into(),
            parts: vec![
                w("in"),
                Slot(YEAR),
                w(","),
                Slot(NAME),
                w("was"),
                Article(OCCUPATION),
                Slot(OCCUPATION),
                w("in"),
                Slot(CITY),
                w("."),
            ],
        },
        // in Y 's C , N was a/an O .
        Template {
            id: "II".into(),
            parts: vec![
                w("in"),
                Slot(YEAR),
                w("'s"),
                Slot(CITY),
                w(","),
                Slot(NAME),
                w("was"),
                Article(OCCUPATION),
                Slot(OCCUPATION),
                w("."),
            ],
        },
        // N was a/an O in C in Y .
        Template {
            id: "III".into(),
            parts: vec![
                Slot(NAME),
                w("was"),
                Article(OCCUPATION),
                Slot(OCCUPATION),
                w("in"),
                Slot(CITY),
                w("in"),
                Slot(YEAR),
                w("."),
            ],
        },
    ]
}

/// Every (template, year, name, occupation, city) combination, template-major.
pub fn generate_ynoc(vocab: &YnocVocab) -> Result<Corpus> {
    vocab.validate()?;
    let factors = vec![
        FactorSpec::new("year", vocab.years.clone(), false)?,
        FactorSpec::new("name", vocab.names.clone(), false)?,
        FactorSpec::new("occupation", vocab.occupations.clone(), false)?,
        FactorSpec::new("city", vocab.cities.clone(), false)?,
    ];
    let templates = templates();
    let sizes = [
        vocab.years.len(),
        vocab.names.len(),
        vocab.occupations.len(),
        vocab.cities.len(),
    ];
    let mut records = Vec::with_capacity(vocab.sentence_count());
    for (ti, template) in templates.iter().enumerate() {
        for y in 0..sizes[YEAR] {
            for n in 0..sizes[NAME] {
                for o in 0..sizes[OCCUPATION] {
                    for c in 0..sizes[CITY] {
                        let value = [y as u16, n as u16, o as u16, c as u16];
                        let fill: Box<[u16]> = template.slots().map(|f| value[f]).collect();
                        records.push(SentenceRecord {
                            id: records.len() as u32,
                            structure: ti as u32,
                            fill,
                        });
                    }
                }
            }
        }
    }
    Corpus::new(
        CorpusKind::Ynoc,
        factors,
        Arc::new(templates),
        records,
        SplitTag::All,
    )
}
