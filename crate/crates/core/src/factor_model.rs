//! Latent codes annotated with generative-factor values.
//!
//! A [`LabeledReprSet`] is the input to every metric: an `n × d` matrix of
//! latent means plus, per row, the value of every factor. Rows sharing a
//! value of one factor form that value's sample space. When a factor may be
//! absent from an observation, absence is one more value of that factor
//! (placed after the declared values) unless the caller asks to drop it.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{FactorSpec, ABSENT};
use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

const ABSENT_ID: u16 = u16::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledReprSet {
    factors: Vec<FactorSpec>,
    ids: Vec<String>,
    codes: Vec<f64>,
    dim: usize,
    labels: Vec<u16>,
}

/// Factor specs stored next to a representation file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReprManifest {
    pub format_version: u32,
    pub factors: Vec<FactorSpec>,
}

impl ReprManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Rows of a set sharing one value of one factor.
#[derive(Debug, Clone)]
pub struct SampleView<'a> {
    pub parent: &'a LabeledReprSet,
    pub rows: Vec<usize>,
}

impl SampleView<'_> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.rows.iter().map(|&r| self.parent.code(r))
    }
}

/// Sample spaces of every value of one factor, as metrics consume them.
#[derive(Debug, Clone)]
pub struct FactorSpaces {
    pub factor: usize,
    /// Row indices per value id; absence (if allowed) is the last entry.
    pub spaces: Vec<Vec<usize>>,
}

impl FactorSpaces {
    pub fn class_count(&self) -> usize {
        self.spaces.len()
    }

    pub fn total(&self) -> usize {
        self.spaces.iter().map(Vec::len).sum()
    }

    /// Value of each covered row, indexed by row.
    pub fn value_of_rows(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (v, rows) in self.spaces.iter().enumerate() {
            for &r in rows {
                out[r] = Some(v);
            }
        }
        out
    }
}

impl LabeledReprSet {
    /// `codes` is row-major `n × dim`; `labels` is row-major `n × factors.len()`.
    pub fn new(
        factors: Vec<FactorSpec>,
        ids: Vec<String>,
        codes: Vec<f64>,
        dim: usize,
        labels: Vec<Option<u16>>,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 || dim == 0 {
            return Err(Error::validation(
                "representation set needs n >= 1 and d >= 1",
            ));
        }
        if factors.is_empty() {
            return Err(Error::validation("representation set has no factors"));
        }
        for f in &factors {
            f.validate()?;
        }
        if codes.len() != n * dim {
            return Err(Error::validation(format!(
                "{} code values for {n} rows of dimension {dim}",
                codes.len()
            )));
        }
        if labels.len() != n * factors.len() {
            return Err(Error::validation(
                "label table does not match rows × factors",
            ));
        }
        if let Some(pos) = codes.iter().position(|x| !x.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite latent value in row {}",
                pos / dim
            )));
        }
        let fcount = factors.len();
        let mut packed = Vec::with_capacity(labels.len());
        for (i, l) in labels.into_iter().enumerate() {
            let f = &factors[i % fcount];
            packed.push(match l {
                Some(v) if (v as usize) < f.values.len() => v,
                Some(v) => {
                    return Err(Error::validation(format!(
                        "row {}: value #{v} out of range for factor {:?}",
                        i / fcount,
                        f.name
                    )))
                }
                None if f.allow_absent => ABSENT_ID,
                None => {
                    return Err(Error::validation(format!(
                        "row {}: factor {:?} may not be absent",
                        i / fcount,
                        f.name
                    )))
                }
            });
        }
        Ok(LabeledReprSet {
            factors,
            ids,
            codes,
            dim,
            labels: packed,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn codes(&self) -> &[f64] {
        &self.codes
    }

    pub fn code(&self, row: usize) -> &[f64] {
        &self.codes[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        self.codes
            .iter()
            .skip(d)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn label(&self, row: usize, factor: usize) -> Option<u16> {
        match self.labels[row * self.factors.len() + factor] {
            ABSENT_ID => None,
            v => Some(v),
        }
    }

    pub fn row_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn factor_index(&self, name: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| Error::UnknownFactor(name.to_string()))
    }

    /// Number of values a factor takes, counting absence when allowed.
    pub fn value_count(&self, factor: usize) -> usize {
        let f = &self.factors[factor];
        f.values.len() + usize::from(f.allow_absent)
    }

    /// Label of value id `v` (absence is the id after the declared values).
    pub fn value_label(&self, factor: usize, v: usize) -> &str {
        self.factors[factor]
            .values
            .get(v)
            .map(String::as_str)
            .unwrap_or(ABSENT)
    }

    fn value_id(&self, factor: usize, label: &str) -> Result<usize> {
        let f = &self.factors[factor];
        if label == ABSENT && f.allow_absent {
            return Ok(f.values.len());
        }
        f.value_index(label).ok_or_else(|| Error::UnknownValue {
            factor: f.name.clone(),
            value: label.to_string(),
        })
    }

    fn row_value(&self, row: usize, factor: usize) -> usize {
        self.label(row, factor)
            .map(usize::from)
            .unwrap_or(self.factors[factor].values.len())
    }

    /// Rows holding `value` (or [`ABSENT`]) on `factor`, in row order.
    pub fn sample_space(&self, factor: &str, value: &str) -> Result<SampleView<'_>> {
        let f = self.factor_index(factor)?;
        let v = self.value_id(f, value)?;
        let rows: Vec<usize> = (0..self.len())
            .filter(|&r| self.row_value(r, f) == v)
            .collect();
        if rows.is_empty() {
            return Err(Error::EmptySampleSpace {
                factor: factor.to_string(),
                value: value.to_string(),
            });
        }
        Ok(SampleView { parent: self, rows })
    }

    /// Empirical probability of each value of `factor`, in value-id order.
    pub fn value_frequencies(&self, factor: &str) -> Result<Vec<(String, f64)>> {
        let f = self.factor_index(factor)?;
        let spaces = self.factor_spaces(f, false);
        let n = self.len() as f64;
        Ok(spaces
            .spaces
            .iter()
            .enumerate()
            .map(|(v, rows)| (self.value_label(f, v).to_string(), rows.len() as f64 / n))
            .collect())
    }

    /// All sample spaces of one factor. With `drop_absent`, rows lacking the
    /// factor are left out and absence is not a value.
    pub fn factor_spaces(&self, factor: usize, drop_absent: bool) -> FactorSpaces {
        let spec = &self.factors[factor];
        let classes = if spec.allow_absent && !drop_absent {
            spec.values.len() + 1
        } else {
            spec.values.len()
        };
        let mut spaces = vec![Vec::new(); classes];
        for r in 0..self.len() {
            let v = self.row_value(r, factor);
            if v < classes {
                spaces[v].push(r);
            }
        }
        FactorSpaces { factor, spaces }
    }

    /// SHA-256 over factor specs, ids, labels and code bits, as hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for f in &self.factors {
            h.update(f.name.as_bytes());
            h.update([0u8, u8::from(f.allow_absent)]);
            for v in &f.values {
                h.update(v.as_bytes());
                h.update([0u8]);
            }
        }
        for id in &self.ids {
            h.update(id.as_bytes());
            h.update([0u8]);
        }
        for l in &self.labels {
            h.update(l.to_le_bytes());
        }
        h.update((self.dim as u64).to_le_bytes());
        for x in &self.codes {
            h.update(x.to_bits().to_le_bytes());
        }
        let mut out = String::with_capacity(64);
        for b in h.finalize().iter() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }

    pub fn manifest(&self) -> ReprManifest {
        ReprManifest {
            format_version: FORMAT_VERSION,
            factors: self.factors.clone(),
        }
    }

    /// Write the representation TSV.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut line = String::from("id");
        for f in &self.factors {
            let _ = write!(line, "\tfactor:{}", f.name);
        }
        for d in 0..self.dim {
            let _ = write!(line, "\tz{d}");
        }
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
        for r in 0..self.len() {
            line.clear();
            line.push_str(&self.ids[r]);
            for f in 0..self.factors.len() {
                line.push('\t');
                line.push_str(self.value_label(f, self.row_value(r, f)));
            }
            for x in self.code(r) {
                let _ = write!(line, "\t{x}");
            }
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn save_manifest(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.manifest())?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Read a representation TSV. Factor specs come from `manifest` when given;
/// otherwise values are collected in order of first appearance and a factor
/// allows absence iff some row marks it absent.
pub fn load_representations(
    path: &Path,
    manifest: Option<&ReprManifest>,
) -> Result<LabeledReprSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let path_str = path.display().to_string();
    let err = |line: usize, message: String| Error::Parse {
        path: path_str.clone(),
        line,
        message,
    };

    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Err(err(1, "empty file".into())),
    };
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.first() != Some(&"id") {
        return Err(err(1, "first column must be `id`".into()));
    }
    let factor_names: Vec<String> = cols[1..]
        .iter()
        .take_while(|c| c.starts_with("factor:"))
        .map(|c| c["factor:".len()..].to_string())
        .collect();
    let fcount = factor_names.len();
    let dim = cols.len() - 1 - fcount;
    if fcount == 0 {
        return Err(err(1, "no factor columns".into()));
    }
    if dim == 0 {
        return Err(err(1, "no latent columns".into()));
    }
    for (d, c) in cols[1 + fcount..].iter().enumerate() {
        if *c != format!("z{d}") {
            return Err(err(1, format!("expected column z{d}, found {c:?}")));
        }
    }

    let declared: Option<Vec<FactorSpec>> = match manifest {
        Some(m) => {
            let by_name: HashMap<&str, &FactorSpec> =
                m.factors.iter().map(|f| (f.name.as_str(), f)).collect();
            let specs = factor_names
                .iter()
                .map(|n| {
                    by_name
                        .get(n.as_str())
                        .map(|f| (*f).clone())
                        .ok_or_else(|| err(1, format!("factor {n:?} not in manifest")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(specs)
        }
        None => None,
    };
    let mut observed: Vec<(Vec<String>, HashMap<String, u16>, bool)> =
        vec![(Vec::new(), HashMap::new(), false); fcount];

    let mut ids = Vec::new();
    let mut codes = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != cols.len() {
            return Err(err(
                lineno,
                format!("expected {} cells, found {}", cols.len(), cells.len()),
            ));
        }
        ids.push(cells[0].to_string());
        for (f, cell) in cells[1..=fcount].iter().enumerate() {
            let label = match &declared {
                Some(specs) => {
                    let spec = &specs[f];
                    if *cell == ABSENT {
                        if !spec.allow_absent {
                            return Err(err(
                                lineno,
                                format!("factor {:?} may not be absent", spec.name),
                            ));
                        }
                        None
                    } else {
                        let v = spec.value_index(cell).ok_or_else(|| {
                            err(
                                lineno,
                                format!("unknown value {cell:?} for factor {:?}", spec.name),
                            )
                        })?;
                        Some(v as u16)
                    }
                }
                None => {
                    let (values, index, absent) = &mut observed[f];
                    if *cell == ABSENT {
                        *absent = true;
                        None
                    } else if let Some(&v) = index.get(*cell) {
                        Some(v)
                    } else {
                        let v = values.len() as u16;
                        values.push(cell.to_string());
                        index.insert(cell.to_string(), v);
                        Some(v)
                    }
                }
            };
            labels.push(label);
        }
        for cell in &cells[1 + fcount..] {
            let x: f64 = cell
                .parse()
                .map_err(|_| err(lineno, format!("non-numeric latent value {cell:?}")))?;
            if !x.is_finite() {
                return Err(err(lineno, format!("non-finite latent value {cell:?}")));
            }
            codes.push(x);
        }
    }
    if ids.is_empty() {
        return Err(err(2, "no rows".into()));
    }
    let factors = match declared {
        Some(specs) => specs,
        None => factor_names
            .into_iter()
            .zip(observed)
            .map(|(name, (values, _, absent))| {
                if values.is_empty() {
                    return Err(Error::validation(format!(
                        "factor {name:?} has no observed values"
                    )));
                }
                FactorSpec::new(name, values, absent)
            })
            .collect::<Result<_>>()?,
    };
    LabeledReprSet::new(factors, ids, codes, dim, labels)
}
