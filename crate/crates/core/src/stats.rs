//! Representation-level statistics: Hoyer sparsity, active units, Pearson
//! correlation over an observation table, and top-3 tallies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_model::LabeledReprSet;
use crate::numeric::{mean, variance};

pub const DEFAULT_AU_THRESHOLD: f64 = 0.01;

/// `(√d − ‖v‖₁/‖v‖₂) / (√d − 1)`, clamped to [0, 1] against rounding.
///
/// An all-zero vector has no defined ratio and scores 0 with a warning.
pub fn hoyer_vector(v: &[f64]) -> Result<f64> {
    let d = v.len();
    if d < 2 {
        return Err(Error::validation(format!(
            "Hoyer sparsity needs at least 2 entries, got {d}"
        )));
    }
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    // scale by the largest magnitude first so tiny or huge inputs do not
    // underflow or overflow the squares
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        log::warn!("Hoyer sparsity of an all-zero vector is taken as 0");
        return Ok(0.0);
    }
    let l2 = peak
        * v.iter()
            .map(|x| (x / peak) * (x / peak))
            .sum::<f64>()
            .sqrt();
    let root = (d as f64).sqrt();
    Ok(((root - l1 / l2) / (root - 1.0)).clamp(0.0, 1.0))
}

/// Mean Hoyer sparsity over rows after dividing every dimension by its
/// population standard deviation. Dimensions with zero spread are dropped.
pub fn hoyer_dataset(set: &LabeledReprSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::validation("Hoyer sparsity needs at least 2 rows"));
    }
    let sigma: Vec<f64> = (0..set.dim())
        .map(|j| variance(&set.column(j)).sqrt())
        .collect();
    let kept: Vec<usize> = (0..set.dim()).filter(|&j| sigma[j] > 0.0).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate("every dimension is constant".into()));
    }
    if kept.len() < set.dim() {
        log::warn!(
            "Hoyer: dropping {} constant dimension(s) of {}",
            set.dim() - kept.len(),
            set.dim()
        );
    }
    if kept.len() < 2 {
        return Err(Error::Degenerate(format!(
            "only {} non-constant dimension(s); Hoyer sparsity needs 2",
            kept.len()
        )));
    }
    let mut buf = vec![0.0; kept.len()];
    let mut scores = Vec::with_capacity(set.len());
    for r in 0..set.len() {
        let code = set.code(r);
        for (b, &j) in buf.iter_mut().zip(&kept) {
            *b = code[j] / sigma[j];
        }
        scores.push(hoyer_vector(&buf)?);
    }
    Ok(mean(&scores))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveUnits {
    pub threshold: f64,
    pub count: usize,
    pub active: Vec<bool>,
    /// Population variance of each dimension over rows.
    pub variances: Vec<f64>,
}

/// A dimension is active when its variance strictly exceeds `threshold`.
pub fn active_units(set: &LabeledReprSet, threshold: f64) -> Result<ActiveUnits> {
    if set.len() < 2 {
        return Err(Error::validation("active units need at least 2 rows"));
    }
    let variances: Vec<f64> = (0..set.dim()).map(|j| variance(&set.column(j))).collect();
    let active: Vec<bool> = variances.iter().map(|&v| v > threshold).collect();
    Ok(ActiveUnits {
        threshold,
        count: active.iter().filter(|&&a| a).count(),
        active,
        variances,
    })
}

/// Measures (columns) recorded for a set of model runs (rows).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable {
    rows: Vec<String>,
    columns: Vec<String>,
    values: Vec<f64>,
}

impl ObservationTable {
    pub fn new(rows: Vec<String>, columns: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows.len() * columns.len() {
            return Err(Error::validation(format!(
                "table has {} cells, expected {} rows x {} columns",
                values.len(),
                rows.len(),
                columns.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::DuplicateValue {
                list: "table columns".into(),
                value: dup.clone(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite value in row {:?}, column {:?}",
                rows[i / columns.len()],
                columns[i % columns.len()]
            )));
        }
        Ok(Self {
            rows,
            columns,
            values,
        })
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.columns.len() + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows.len()).map(|r| self.get(r, col)).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::validation(format!("unknown table column {name:?}")))
    }

    /// Tab-separated: a header of `<row label>\t<col>...`, then one line per row.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty table".into()))?;
        let columns: Vec<String> = header
            .split('\t')
            .skip(1)
            .map(|s| s.trim().to_string())
            .collect();
        if columns.is_empty() {
            return Err(parse_err(1, "header names no columns".into()));
        }
        let (mut rows, mut values) = (Vec::new(), Vec::new());
        for (i, line) in lines {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != columns.len() + 1 {
                return Err(parse_err(
                    i + 1,
                    format!(
                        "expected {} cells, found {}",
                        columns.len() + 1,
                        cells.len()
                    ),
                ));
            }
            rows.push(cells[0].trim().to_string());
            for c in &cells[1..] {
                let v: f64 = c
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i + 1, format!("not a number: {c:?}")))?;
                if !v.is_finite() {
                    return Err(parse_err(i + 1, format!("non-finite value {c:?}")));
                }
                values.push(v);
            }
        }
        Self::new(rows, columns, values)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::from("run");
        for c in &self.columns {
            write!(out, "\t{c}").unwrap();
        }
        out.push('\n');
        for (r, name) in self.rows.iter().enumerate() {
            out.push_str(name);
            for c in 0..self.columns.len() {
                write!(out, "\t{}", self.get(r, c)).unwrap();
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub format_version: u32,
    pub columns: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

/// Pearson r for every pair of columns. The diagonal is exactly 1.
pub fn pearson_matrix(table: &ObservationTable) -> Result<CorrelationMatrix> {
    let n = table.rows().len();
    if n < 2 {
        return Err(Error::validation("correlation needs at least 2 rows"));
    }
    let centered: Vec<Vec<f64>> = (0..table.columns().len())
        .map(|c| {
            let col = table.column(c);
            let m = mean(&col);
            col.iter().map(|x| x - m).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(c) = norms.iter().position(|&s| s == 0.0) {
        return Err(Error::validation(format!(
            "column {:?} has zero variance; correlation undefined",
            table.columns()[c]
        )));
    }
    let k = centered.len();
    let mut matrix = vec![vec![1.0; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let dot: f64 = centered[a]
                .iter()
                .zip(&centered[b])
                .map(|(x, y)| x * y)
                .sum();
            let r = (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0);
            matrix[a][b] = r;
            matrix[b][a] = r;
        }
    }
    Ok(CorrelationMatrix {
        format_version: crate::FORMAT_VERSION,
        columns: table.columns().to_vec(),
        matrix,
    })
}

/// For each metric column, every row scoring at least the third-highest value
/// gains one tally. Returns totals keyed by row label, in table order.
pub fn top3_tally(table: &ObservationTable, metrics: &[&str]) -> Result<Vec<(String, usize)>> {
    if table.rows().len() < 3 {
        return Err(Error::validation("top-3 tally needs at least 3 rows"));
    }
    let mut tally = vec![0usize; table.rows().len()];
    for name in metrics {
        let col = table.column(table.column_index(name)?);
        let mut sorted = col.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let cut = sorted[2];
        for (t, &v) in tally.iter_mut().zip(&col) {
            if v >= cut {
                *t += 1;
            }
        }
    }
    Ok(table.rows().iter().cloned().zip(tally).collect())
}

/// Statistics written by the `stats` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReprStats {
    pub format_version: u32,
    pub dataset_digest: String,
    pub rows: usize,
    pub dim: usize,
    pub hoyer: Option<f64>,
    pub active_units: ActiveUnits,
}

pub fn repr_stats(set: &LabeledReprSet, threshold: f64) -> Result<ReprStats> {
    let hoyer = match hoyer_dataset(set) {
        Ok(h) => Some(h),
        Err(Error::Degenerate(msg)) => {
            log::warn!("Hoyer sparsity skipped: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    Ok(ReprStats {
        format_version: crate::FORMAT_VERSION,
        dataset_digest: set.digest(),
        rows: set.len(),
        dim: set.dim(),
        hoyer,
        active_units: active_units(set, threshold)?,
    })
}

/// Row label to tally, ordered by label; convenient for JSON output.
pub fn tally_map(tally: &[(String, usize)]) -> BTreeMap<String, usize> {
    tally.iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FactorSpec;
    use crate::metrics::fixtures::ideal_letters;
    use rand::Rng as _;

    fn set_from(codes: Vec<f64>, dim: usize) -> LabeledReprSet {
        let n = codes.len() / dim;
        let f = vec![FactorSpec::new("a", vec!["x".into()], false).unwrap()];
        LabeledReprSet::new(
            f,
            (0..n).map(|i| i.to_string()).collect(),
            codes,
            dim,
            vec![Some(0); n],
        )
        .unwrap()
    }

    fn table(cols: &[&str], rows: &[&[f64]]) -> ObservationTable {
        ObservationTable::new(
            (0..rows.len()).map(|i| format!("m{i}")).collect(),
            cols.iter().map(|s| s.to_string()).collect(),
            rows.iter().flat_map(|r| r.iter().copied()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn hoyer_extremes_and_formula() {
        assert_eq!(hoyer_vector(&[-2.5, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert!(hoyer_vector(&[3.0, 3.0, 3.0, 3.0]).unwrap().abs() < 1e-15);
        let expected = (2f64.sqrt() - 7.0 / 5.0) / (2f64.sqrt() - 1.0);
        assert!((hoyer_vector(&[3.0, 4.0]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.0343).abs() < 1e-4);
        assert_eq!(hoyer_vector(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(hoyer_vector(&[1.0]).is_err());
    }

    #[test]
    fn hoyer_survives_extreme_magnitudes() {
        let a = hoyer_vector(&[1e-300, 2e-300, 0.0]).unwrap();
        let b = hoyer_vector(&[1e300, 2e300, 0.0]).unwrap();
        let c = hoyer_vector(&[1.0, 2.0, 0.0]).unwrap();
        assert!((a - c).abs() < 1e-12 && (b - c).abs() < 1e-12);
    }

    #[test]
    fn one_hot_rows_on_shared_dims() {
        // dims 0 and 1 vary, dim 2 is constant and dropped
        let set = set_from(
            vec![1.0, 0.0, 5.0, 0.0, 1.0, 5.0, 2.0, 0.0, 5.0, 0.0, 3.0, 5.0],
            3,
        );
        assert_eq!(hoyer_dataset(&set).unwrap(), 1.0);
        let same = set_from(vec![1.0, 0.0, 1.0, 0.0], 2);
        assert!(matches!(hoyer_dataset(&same), Err(Error::Degenerate(_))));
        let flat = set_from(vec![1.0, 1.0, 1.0, 1.0], 2);
        assert!(matches!(hoyer_dataset(&flat), Err(Error::Degenerate(_))));
    }

    #[test]
    fn duplicated_rows_keep_the_score() {
        let mut rng = crate::seed::rng_from(5);
        let codes: Vec<f64> = (0..300).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let twice: Vec<f64> = codes.iter().chain(&codes).copied().collect();
        let a = hoyer_dataset(&set_from(codes, 3)).unwrap();
        let b = hoyer_dataset(&set_from(twice, 3)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gaussian_rows_fall_in_the_reference_band() {
        // band from a separate numpy run over five seeds: 0.2721..0.2739
        let mut rng = crate::seed::rng_from(17);
        let codes: Vec<f64> = (0..40_000)
            .flat_map(|_| {
                let (u1, u2): (f64, f64) = (1.0 - rng.gen::<f64>(), rng.gen());
                let r = (-2.0 * u1.ln()).sqrt();
                let a = std::f64::consts::TAU * u2;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let h = hoyer_dataset(&set_from(codes, 8)).unwrap();
        assert!((0.268..=0.278).contains(&h), "{h}");
    }

    #[test]
    fn active_units_threshold() {
        let set = set_from(vec![1.0, 4.0, -1.0, 4.0, 1.0, 4.0, -1.0, 4.0], 2);
        let au = active_units(&set, DEFAULT_AU_THRESHOLD).unwrap();
        assert_eq!(au.active, vec![true, false]);
        assert_eq!(au.variances, vec![1.0, 0.0]);
        // strict comparison at the boundary
        assert_eq!(active_units(&set, 1.0).unwrap().count, 0);
        assert_eq!(
            active_units(&ideal_letters(1, 0), DEFAULT_AU_THRESHOLD)
                .unwrap()
                .count,
            4
        );
    }

    #[test]
    fn pearson_fixture_and_signs() {
        let t = table(
            &["a", "b", "neg"],
            &[
                &[1.0, 1.0, -1.0],
                &[2.0, 3.0, -2.0],
                &[3.0, 2.0, -3.0],
                &[4.0, 4.0, -4.0],
            ],
        );
        let m = pearson_matrix(&t).unwrap().matrix;
        assert!((m[0][1] - 0.8).abs() < 1e-15);
        assert_eq!(m[0][0], 1.0);
        assert!((m[0][2] + 1.0).abs() < 1e-15);
        assert_eq!(m[1][0], m[0][1]);
    }

    #[test]
    fn pearson_names_the_constant_column() {
        let t = table(&["a", "flat"], &[&[1.0, 2.0], &[2.0, 2.0], &[3.0, 2.0]]);
        let err = pearson_matrix(&t).unwrap_err().to_string();
        assert!(err.contains("\"flat\""), "{err}");
    }

    #[test]
    fn top3_admits_ties_at_the_cut() {
        let t = table(
            &["x", "y"],
            &[
                &[5.0, 1.0],
                &[4.0, 2.0],
                &[3.0, 3.0],
                &[3.0, 4.0],
                &[1.0, 5.0],
            ],
        );
        let tally = top3_tally(&t, &["x", "y"]).unwrap();
        let counts: Vec<usize> = tally.iter().map(|(_, c)| *c).collect();
        assert_eq!(counts, vec![1, 1, 2, 2, 1]);
        assert!(top3_tally(&t, &["z"]).is_err());
    }

    #[test]
    fn three_rows_tally_once_per_metric() {
        let t = table(
            &["x", "y", "z"],
            &[&[1.0, 0.0, 9.0], &[2.0, 7.0, 1.0], &[0.5, 3.0, 2.0]],
        );
        assert!(top3_tally(&t, &["x", "y", "z"])
            .unwrap()
            .iter()
            .all(|(_, c)| *c == 3));
    }

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = table(&["kim", "AU"], &[&[0.25, 3.0], &[1.0 / 3.0, 4.0]]);
        let p = dir.path().join("obs.tsv");
        t.write(&p).unwrap();
        assert_eq!(ObservationTable::read(&p).unwrap(), t);
        std::fs::write(&p, "run\ta\tb\nm0\t1\n").unwrap();
        assert!(matches!(
            ObservationTable::read(&p),
            Err(Error::Parse { line: 2, .. })
        ));
        std::fs::write(&p, "run\ta\ta\nm0\t1\t2\n").unwrap();
        assert!(matches!(
            ObservationTable::read(&p),
            Err(Error::DuplicateValue { .. })
        ));
    }
}
