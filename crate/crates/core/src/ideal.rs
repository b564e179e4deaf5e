//! Perfectly disentangled reference codes.
//!
//! Each factor owns a contiguous block of `k` dimensions. Every value of the
//! factor gets one coordinate per block dimension in `[-1, 1]`, distinct
//! within the dimension, and a sentence's code is the concatenation of its
//! factors' value coordinates.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FactorSpec, ABSENT};
use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::seed;
use crate::FORMAT_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookBlock {
    pub factor: String,
    pub offset: usize,
    /// Value labels in id order; absence (when allowed) is last, as `-`.
    pub values: Vec<String>,
    /// `coords[v]` is the k-vector of value `v`.
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealCodebook {
    pub format_version: u32,
    pub dims_per_factor: usize,
    pub seed: u64,
    pub grid: bool,
    pub blocks: Vec<CodebookBlock>,
}

impl IdealCodebook {
    /// Draws coordinates i.i.d. uniform on `[-1, 1]`, or, with `grid`, takes
    /// evenly spaced points in a seeded order per dimension.
    pub fn build(factors: &[FactorSpec], k: usize, seed: u64, grid: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::validation("dims-per-factor must be at least 1"));
        }
        let blocks = factors
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let mut values = f.values.clone();
                if f.allow_absent {
                    values.push(ABSENT.to_string());
                }
                let m = values.len();
                let columns: Vec<Vec<f64>> = (0..k)
                    .map(|j| {
                        let mut rng = seed::derive_rng(seed, "ideal", fi as u64, j as u64);
                        if grid {
                            grid_column(m, &mut rng)
                        } else {
                            random_column(m, &mut rng)
                        }
                    })
                    .collect();
                let coords = (0..m)
                    .map(|v| columns.iter().map(|c| c[v]).collect())
                    .collect();
                CodebookBlock {
                    factor: f.name.clone(),
                    offset: fi * k,
                    values,
                    coords,
                }
            })
            .collect();
        Ok(IdealCodebook {
            format_version: FORMAT_VERSION,
            dims_per_factor: k,
            seed,
            grid,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.blocks.len() * self.dims_per_factor
    }

    /// `assignment[f]` is a value id, or `None` for absence.
    pub fn encode(&self, assignment: &[Option<u16>]) -> Result<Vec<f64>> {
        if assignment.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(
                assignment.len(),
                self.blocks.len(),
            ));
        }
        let mut code = Vec::with_capacity(self.dim());
        for (b, a) in self.blocks.iter().zip(assignment) {
            let v = match a {
                Some(v) => *v as usize,
                None if b.values.last().map(String::as_str) == Some(ABSENT) => b.values.len() - 1,
                None => {
                    return Err(Error::validation(format!(
                        "factor {:?} may not be absent",
                        b.factor
                    )))
                }
            };
            let coords = b.coords.get(v).ok_or_else(|| Error::UnknownValue {
                factor: b.factor.clone(),
                value: format!("#{v}"),
            })?;
            code.extend_from_slice(coords);
        }
        Ok(code)
    }

    /// Label of the nearest codebook value (Euclidean within each block);
    /// lowest value id wins ties.
    pub fn decode_nearest(&self, code: &[f64]) -> Result<Vec<&str>> {
        if code.len() != self.dim() {
            return Err(Error::DimensionMismatch(code.len(), self.dim()));
        }
        let k = self.dims_per_factor;
        Ok(self
            .blocks
            .iter()
            .map(|b| {
                let part = &code[b.offset..b.offset + k];
                let mut best = (f64::INFINITY, 0);
                for (v, c) in b.coords.iter().enumerate() {
                    let d: f64 = c.iter().zip(part).map(|(a, x)| (a - x) * (a - x)).sum();
                    if d < best.0 {
                        best = (d, v);
                    }
                }
                b.values[best.1].as_str()
            })
            .collect())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn random_column(m: usize, rng: &mut seed::Rng) -> Vec<f64> {
    let mut col: Vec<f64> = Vec::with_capacity(m);
    while col.len() < m {
        let x = rng.gen_range(-1.0..=1.0);
        if !col.contains(&x) {
            col.push(x);
        }
    }
    col
}

fn grid_column(m: usize, rng: &mut seed::Rng) -> Vec<f64> {
    let mut col: Vec<f64> = if m == 1 {
        vec![0.0]
    } else {
        (0..m)
            .map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64)
            .collect()
    };
    col.shuffle(rng);
    col
}

/// Ideal codes for every record of `corpus`, with record ids as row ids.
pub fn build_ideal(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    grid: bool,
) -> Result<(IdealCodebook, LabeledReprSet)> {
    let book = IdealCodebook::build(&corpus.factors, k, seed, grid)?;
    let fcount = corpus.factors.len();
    let mut seen: Vec<Vec<bool>> = corpus
        .factors
        .iter()
        .map(|f| vec![false; f.values.len()])
        .collect();
    let mut ids = Vec::with_capacity(corpus.len());
    let mut codes = Vec::with_capacity(corpus.len() * book.dim());
    let mut labels = Vec::with_capacity(corpus.len() * fcount);
    for r in &corpus.records {
        let a = corpus.assignment(r);
        for (f, v) in a.iter().enumerate() {
            if let Some(v) = v {
                seen[f][*v as usize] = true;
            }
        }
        codes.extend(book.encode(&a)?);
        labels.extend(a);
        ids.push(r.id.to_string());
    }
    for (f, s) in corpus.factors.iter().zip(&seen) {
        if let Some(v) = s.iter().position(|x| !x) {
            return Err(Error::EmptySampleSpace {
                factor: f.name.clone(),
                value: f.values[v].clone(),
            });
        }
    }
    let set = LabeledReprSet::new(corpus.factors.clone(), ids, codes, book.dim(), labels)?;
    Ok((book, set))
}
