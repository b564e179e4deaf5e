//! On-disk corpus layout: `{train,valid,test}.txt`, matching `.ann.tsv`
//! annotation files, and a `manifest.json` holding factor specs, templates
//! and counts.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    Corpus, CorpusKind, FactorSpec, SentenceRecord, SplitRatios, SplitTag, Template, TemplatePart,
    ABSENT,
};
use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PartRecord {
    Word(String),
    Slot(String),
    Article(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TemplateRecord {
    id: String,
    parts: Vec<PartRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub format_version: u32,
    pub kind: CorpusKind,
    pub seed: u64,
    pub cap: Option<usize>,
    pub ratios: SplitRatios,
    pub counts: SplitCounts,
    pub factors: Vec<FactorSpec>,
    pub annotation_columns: Vec<String>,
    templates: Vec<TemplateRecord>,
}

impl CorpusManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn templates(&self) -> Result<Vec<Template>> {
        let index: HashMap<&str, usize> = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.as_str(), i))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownFactor(name.to_string()))
        };
        self.templates
            .iter()
            .map(|t| {
                let parts = t
                    .parts
                    .iter()
                    .map(|p| {
                        Ok(match p {
                            PartRecord::Word(w) => TemplatePart::Word(w.clone()),
                            PartRecord::Slot(f) => TemplatePart::Slot(lookup(f)?),
                            PartRecord::Article(f) => TemplatePart::Article(lookup(f)?),
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Template {
                    id: t.id.clone(),
                    parts,
                })
            })
            .collect()
    }
}

/// Column headers `factor:<name>` (single-slot factors) or
/// `factor:<name><k>` for each slot k of a multi-slot factor.
fn annotation_columns(factors: &[FactorSpec], max_slots: &[usize]) -> Vec<(usize, usize, String)> {
    let mut cols = Vec::new();
    for (f, (spec, &m)) in factors.iter().zip(max_slots).enumerate() {
        if m <= 1 {
            cols.push((f, 0, format!("factor:{}", spec.name)));
        } else {
            for k in 0..m {
                cols.push((f, k, format!("factor:{}{}", spec.name, k + 1)));
            }
        }
    }
    cols
}

pub fn write_corpus_dir(
    dir: &Path,
    parts: [&Corpus; 3],
    seed: u64,
    cap: Option<usize>,
    ratios: SplitRatios,
) -> Result<CorpusManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let first = parts[0];
    let max_slots = first.max_slots();
    let columns = annotation_columns(&first.factors, &max_slots);

    for part in parts {
        let name = part.split.as_str();
        let txt_path = dir.join(format!("{name}.txt"));
        let ann_path = dir.join(format!("{name}.ann.tsv"));
        let mut txt = BufWriter::new(File::create(&txt_path).map_err(|e| Error::io(&txt_path, e))?);
        let mut ann = BufWriter::new(File::create(&ann_path).map_err(|e| Error::io(&ann_path, e))?);
        let header: Vec<&str> = ["id", "structure"]
            .into_iter()
            .chain(columns.iter().map(|(_, _, c)| c.as_str()))
            .collect();
        let io_err = |p: &Path| {
            let p = p.to_path_buf();
            move |e| Error::io(p, e)
        };
        writeln!(ann, "{}", header.join("\t")).map_err(io_err(&ann_path))?;
        let mut line = String::new();
        for r in &part.records {
            writeln!(txt, "{}", part.sentence(r)).map_err(io_err(&txt_path))?;
            let slots = part.slot_assignment(r);
            line.clear();
            line.push_str(&r.id.to_string());
            line.push('\t');
            line.push_str(part.structure_id(r));
            for (f, k, _) in &columns {
                line.push('\t');
                match slots[*f].get(*k) {
                    Some(&v) => line.push_str(&part.factors[*f].values[v as usize]),
                    None => line.push_str(ABSENT),
                }
            }
            writeln!(ann, "{line}").map_err(io_err(&ann_path))?;
        }
        txt.flush().map_err(io_err(&txt_path))?;
        ann.flush().map_err(io_err(&ann_path))?;
    }

    let templates = first
        .templates
        .iter()
        .map(|t| TemplateRecord {
            id: t.id.clone(),
            parts: t
                .parts
                .iter()
                .map(|p| match p {
                    TemplatePart::Word(w) => PartRecord::Word(w.clone()),
                    TemplatePart::Slot(f) => PartRecord::Slot(first.factors[*f].name.clone()),
                    TemplatePart::Article(f) => PartRecord::Article(first.factors[*f].name.clone()),
                })
                .collect(),
        })
        .collect();
    let counts = SplitCounts {
        train: parts[0].len(),
        valid: parts[1].len(),
        test: parts[2].len(),
        total: parts.iter().map(|p| p.len()).sum(),
    };
    let manifest = CorpusManifest {
        format_version: FORMAT_VERSION,
        kind: first.kind,
        seed,
        cap,
        ratios,
        counts,
        factors: first.factors.clone(),
        annotation_columns: columns.into_iter().map(|(_, _, c)| c).collect(),
        templates,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Rebuild a corpus from a directory written by [`write_corpus_dir`].
///
/// `SplitTag::All` concatenates the three parts and restores the original
/// record order. Every rebuilt sentence is checked against the sentence file.
pub fn read_corpus_dir(dir: &Path, split: SplitTag) -> Result<Corpus> {
    let manifest = CorpusManifest::read(&dir.join("manifest.json"))?;
    let templates = manifest.templates()?;
    let template_index: HashMap<&str, usize> = templates
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), i))
        .collect();
    let probe = Corpus::new(
        manifest.kind,
        manifest.factors.clone(),
        Arc::new(templates.clone()),
        Vec::new(),
        split,
    )?;
    let columns = annotation_columns(&probe.factors, &probe.max_slots());

    let parts: Vec<SplitTag> = match split {
        SplitTag::All => SplitTag::PARTS.to_vec(),
        one => vec![one],
    };
    let mut records = Vec::new();
    for part in parts {
        let ann_path = dir.join(format!("{part}.ann.tsv"));
        let txt_path = dir.join(format!("{part}.txt"));
        let ann = BufReader::new(File::open(&ann_path).map_err(|e| Error::io(&ann_path, e))?);
        let txt = BufReader::new(File::open(&txt_path).map_err(|e| Error::io(&txt_path, e))?);
        let mut sentences = txt.lines();
        let path_str = ann_path.display().to_string();
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path_str.clone(),
            line,
            message,
        };
        let mut lines = ann.lines().enumerate();
        let header = match lines.next() {
            Some((_, h)) => h.map_err(|e| Error::io(&ann_path, e))?,
            None => return Err(parse_err(1, "missing header".into())),
        };
        let expected: Vec<&str> = ["id", "structure"]
            .into_iter()
            .chain(columns.iter().map(|(_, _, c)| c.as_str()))
            .collect();
        if header.split('\t').collect::<Vec<_>>() != expected {
            return Err(parse_err(1, "header does not match manifest".into()));
        }
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::io(&ann_path, e))?;
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != expected.len() {
                return Err(parse_err(
                    lineno,
                    format!("expected {} cells, found {}", expected.len(), cells.len()),
                ));
            }
            let id: u32 = cells[0]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad id {:?}", cells[0])))?;
            let si = *template_index
                .get(cells[1])
                .ok_or_else(|| parse_err(lineno, format!("unknown structure {:?}", cells[1])))?;
            let mut per_factor: Vec<Vec<u16>> = vec![Vec::new(); probe.factors.len()];
            for ((f, _, _), cell) in columns.iter().zip(&cells[2..]) {
                if *cell == ABSENT {
                    continue;
                }
                let spec = &probe.factors[*f];
                let v = spec.value_index(cell).ok_or_else(|| {
                    parse_err(
                        lineno,
                        format!("unknown value {cell:?} for factor {:?}", spec.name),
                    )
                })?;
                per_factor[*f].push(v as u16);
            }
            let mut cursor = vec![0usize; probe.factors.len()];
            let mut fill = Vec::with_capacity(templates[si].slot_count());
            for f in templates[si].slots() {
                let v = per_factor[f].get(cursor[f]).copied().ok_or_else(|| {
                    parse_err(
                        lineno,
                        format!("missing value for factor {:?}", probe.factors[f].name),
                    )
                })?;
                cursor[f] += 1;
                fill.push(v);
            }
            let record = SentenceRecord {
                id,
                structure: si as u32,
                fill: fill.into(),
            };
            let sentence = sentences
                .next()
                .ok_or_else(|| parse_err(lineno, format!("{} ended early", txt_path.display())))?
                .map_err(|e| Error::io(&txt_path, e))?;
            if probe.sentence(&record) != sentence {
                return Err(parse_err(
                    lineno,
                    "annotation does not reproduce the sentence".into(),
                ));
            }
            records.push(record);
        }
    }
    if split == SplitTag::All {
        records.sort_by_key(|r| r.id);
    }
    Corpus::new(
        manifest.kind,
        manifest.factors,
        Arc::new(templates),
        records,
        split,
    )
}
