//! The six disentanglement metrics.
//!
//! Every metric reads a [`LabeledReprSet`] and a [`MetricConfig`] and returns
//! scores on `[0, 1]`. Randomness comes from generators derived from
//! `(seed, metric, factor, run)`, so any subset of metrics, evaluated in any
//! order or thread count, reproduces the same numbers.

mod chen;
mod eastwood;
mod higgins;
mod kim;
mod kumar;
mod ridgeway;

pub use chen::{chen_mig, mutual_information_matrix};
pub use eastwood::eastwood_dci;
pub use higgins::higgins_score;
pub use kim::kim_score;
pub use kumar::kumar_sap;
pub use ridgeway::{ridgeway_explicitness, ridgeway_modularity};

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_model::{FactorSpaces, LabeledReprSet};
use crate::learners::{Dataset, ForestConfig, LogRegConfig, SoftmaxConfig, SvmConfig};
use crate::numeric::{mean, variance};
use crate::seed::Rng;
use crate::FORMAT_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub seed: u64,
    /// Groups per factor for the Higgins and Kim metrics.
    pub n_groups: usize,
    /// Codes per group for the Higgins and Kim metrics.
    pub group_size: usize,
    /// Codes sampled per factor for the other metrics.
    pub n_samples: usize,
    pub bins: usize,
    /// Classifier repetitions for the Higgins and Kim metrics.
    pub runs: usize,
    pub train_fraction: f64,
    /// Leave rows lacking a factor out of that factor's sample spaces.
    pub drop_absent: bool,
    /// Fail when a declared value has no rows instead of ignoring it.
    pub strict: bool,
    pub softmax: SoftmaxConfig,
    pub svm: SvmConfig,
    pub logreg: LogRegConfig,
    pub forest: ForestConfig,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            seed: 0,
            n_groups: 1000,
            group_size: 64,
            n_samples: 10_000,
            bins: 20,
            runs: 10,
            train_fraction: 0.8,
            drop_absent: false,
            strict: false,
            softmax: SoftmaxConfig::default(),
            svm: SvmConfig::default(),
            logreg: LogRegConfig::default(),
            forest: ForestConfig::default(),
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::validation(m.to_string()));
        if self.n_groups == 0 || self.group_size == 0 || self.n_samples == 0 {
            return bad("sample sizes must be positive");
        }
        if self.bins < 2 {
            return bad("need at least two bins");
        }
        if self.runs == 0 {
            return bad("need at least one run");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train fraction must lie in (0, 1)");
        }
        if self.forest.trees == 0 {
            return bad("forest needs at least one tree");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorScore {
    pub factor: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    pub score: f64,
    pub variance: f64,
    pub runs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_factor: Option<Vec<FactorScore>>,
}

impl MetricResult {
    fn single(name: &str, score: f64) -> Self {
        MetricResult {
            name: name.to_string(),
            alias: None,
            score,
            variance: 0.0,
            runs: 1,
            per_factor: None,
        }
    }

    fn from_runs(name: &str, accs: &[f64]) -> Self {
        MetricResult {
            name: name.to_string(),
            alias: None,
            score: mean(accs),
            variance: variance(accs),
            runs: accs.len(),
            per_factor: None,
        }
    }

    /// Score ×100 with two decimals, as reported.
    pub fn percent(&self) -> String {
        format_percent(self.score)
    }
}

pub fn format_percent(score: f64) -> String {
    format!("{:.2}", score * 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Higgins,
    Kim,
    Kumar,
    Chen,
    RidgewayModularity,
    RidgewayExplicitness,
    Eastwood,
}

impl MetricId {
    pub const ALL: [MetricId; 7] = [
        MetricId::Higgins,
        MetricId::Kim,
        MetricId::Kumar,
        MetricId::Chen,
        MetricId::RidgewayModularity,
        MetricId::RidgewayExplicitness,
        MetricId::Eastwood,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Higgins => "higgins",
            MetricId::Kim => "kim",
            MetricId::Kumar => "kumar",
            MetricId::Chen => "chen",
            MetricId::RidgewayModularity => "ridgeway_modularity",
            MetricId::RidgewayExplicitness => "ridgeway_explicitness",
            MetricId::Eastwood => "eastwood",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "higgins" => MetricId::Higgins,
            "kim" => MetricId::Kim,
            "kumar" | "sap" => MetricId::Kumar,
            "chen" | "mig" => MetricId::Chen,
            "ridgeway_modularity" | "modularity" => MetricId::RidgewayModularity,
            "ridgeway_explicitness" | "explicitness" => MetricId::RidgewayExplicitness,
            "eastwood" | "dci" => MetricId::Eastwood,
            other => return Err(Error::validation(format!("unknown metric {other:?}"))),
        })
    }
}

/// Parses `all` or a comma-separated list; duplicates collapse, order follows
/// [`MetricId::ALL`].
pub fn parse_selection(s: &str) -> Result<Vec<MetricId>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "all" => out.extend(MetricId::ALL),
            "ridgeway" => {
                out.extend([MetricId::RidgewayModularity, MetricId::RidgewayExplicitness])
            }
            _ => out.push(part.parse()?),
        }
    }
    if out.is_empty() {
        return Err(Error::validation("no metrics selected"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    pub score_percent: String,
    pub score: f64,
    pub variance: f64,
    pub runs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_factor: Option<Vec<FactorScore>>,
}

impl From<&MetricResult> for ReportEntry {
    fn from(r: &MetricResult) -> Self {
        ReportEntry {
            name: r.name.clone(),
            alias: r.alias.clone(),
            score_percent: r.percent(),
            score: r.score,
            variance: r.variance,
            runs: r.runs,
            per_factor: r.per_factor.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub format_version: u32,
    pub metrics: Vec<MetricId>,
    pub config: MetricConfig,
    pub dataset_digest: String,
    pub results: Vec<ReportEntry>,
}

impl MetricReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn get(&self, name: &str) -> Option<&ReportEntry> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Runs one metric; Eastwood yields three results.
pub fn evaluate(
    set: &LabeledReprSet,
    cfg: &MetricConfig,
    id: MetricId,
) -> Result<Vec<MetricResult>> {
    cfg.validate()?;
    Ok(match id {
        MetricId::Higgins => vec![higgins_score(set, cfg)?],
        MetricId::Kim => vec![kim_score(set, cfg)?],
        MetricId::Kumar => vec![kumar_sap(set, cfg)?],
        MetricId::Chen => vec![chen_mig(set, cfg)?],
        MetricId::RidgewayModularity => vec![ridgeway_modularity(set, cfg)?],
        MetricId::RidgewayExplicitness => vec![ridgeway_explicitness(set, cfg)?],
        MetricId::Eastwood => {
            let (d, c, i) = eastwood_dci(set, cfg)?;
            vec![d, c, i]
        }
    })
}

pub fn evaluate_all(
    set: &LabeledReprSet,
    cfg: &MetricConfig,
    selection: &[MetricId],
) -> Result<MetricReport> {
    cfg.validate()?;
    if selection.is_empty() {
        return Err(Error::validation("no metrics selected"));
    }
    let mut results = Vec::new();
    for &id in selection {
        log::info!("evaluating {id}");
        for r in evaluate(set, cfg, id)? {
            results.push(ReportEntry::from(&r));
        }
    }
    Ok(MetricReport {
        format_version: FORMAT_VERSION,
        metrics: selection.to_vec(),
        config: cfg.clone(),
        dataset_digest: set.digest(),
        results,
    })
}

/// Sample spaces of one factor plus the row union they cover.
pub(crate) struct FactorSampler<'a> {
    pub set: &'a LabeledReprSet,
    pub spaces: FactorSpaces,
    union: Vec<(usize, u32)>,
}

impl<'a> FactorSampler<'a> {
    pub fn new(
        set: &'a LabeledReprSet,
        factor: usize,
        cfg: &MetricConfig,
        metric: &str,
    ) -> Result<Self> {
        let spaces = set.factor_spaces(factor, cfg.drop_absent);
        if cfg.strict {
            if let Some(v) = spaces.spaces.iter().position(Vec::is_empty) {
                return Err(Error::metric(
                    metric,
                    format!(
                        "empty sample space for factor {:?}, value {:?}",
                        set.factors()[factor].name,
                        set.value_label(factor, v)
                    ),
                ));
            }
        }
        let mut union: Vec<(usize, u32)> = spaces
            .spaces
            .iter()
            .enumerate()
            .flat_map(|(v, rows)| rows.iter().map(move |&r| (r, v as u32)))
            .collect();
        if union.is_empty() {
            return Err(Error::metric(
                metric,
                format!(
                    "factor {:?} has no observations",
                    set.factors()[factor].name
                ),
            ));
        }
        union.sort_unstable();
        Ok(FactorSampler { set, spaces, union })
    }

    pub fn classes(&self) -> usize {
        self.spaces.class_count()
    }

    /// Value of an observation drawn uniformly from all rows of the factor.
    pub fn draw_value(&self, rng: &mut Rng) -> usize {
        self.union[rng.gen_range(0..self.union.len())].1 as usize
    }

    /// A row drawn uniformly (with replacement) from value `v`'s space.
    pub fn draw_row(&self, v: usize, rng: &mut Rng) -> usize {
        let rows = &self.spaces.spaces[v];
        rows[rng.gen_range(0..rows.len())]
    }

    /// `p(v)` over the covered rows.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.spaces.total() as f64;
        self.spaces
            .spaces
            .iter()
            .map(|r| r.len() as f64 / total)
            .collect()
    }

    /// `N_v = round(N · p(v))` codes per value, with their value ids.
    pub fn weighted_sample(&self, n: usize, rng: &mut Rng) -> Dataset {
        let dim = self.set.dim();
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (v, p) in self.probabilities().into_iter().enumerate() {
            let nv = (n as f64 * p).round() as usize;
            if self.spaces.spaces[v].is_empty() {
                continue;
            }
            for _ in 0..nv {
                x.extend_from_slice(self.set.code(self.draw_row(v, rng)));
                y.push(v as u32);
            }
        }
        Dataset {
            x,
            p: dim,
            y,
            classes: self.classes(),
        }
    }
}

/// Shannon entropy of a distribution in base `base`; terms are summed in
/// sorted order.
pub(crate) fn entropy_base(p: &[f64], base: f64) -> f64 {
    let h = crate::numeric::ordered_sum(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()));
    h / base.ln()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use rand::Rng as _;

    use crate::corpus::{generate_letters, FactorSpec};
    use crate::factor_model::LabeledReprSet;
    use crate::ideal::build_ideal;
    use crate::seed::rng_from;

    pub fn ideal_letters(k: usize, seed: u64) -> LabeledReprSet {
        build_ideal(&generate_letters().unwrap(), k, seed, false)
            .unwrap()
            .1
    }

    /// `factors` factors with `values` values each; codes uniform noise.
    pub fn noise_set(
        n: usize,
        d: usize,
        factors: usize,
        values: usize,
        seed: u64,
    ) -> LabeledReprSet {
        let mut rng = rng_from(seed);
        let specs = (0..factors)
            .map(|f| {
                FactorSpec::new(
                    format!("f{f}"),
                    (0..values).map(|v| format!("v{v}")).collect(),
                    false,
                )
                .unwrap()
            })
            .collect();
        let codes = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let labels = (0..n * factors)
            .map(|_| Some(rng.gen_range(0..values as u16)))
            .collect();
        LabeledReprSet::new(
            specs,
            (0..n).map(|i| i.to_string()).collect(),
            codes,
            d,
            labels,
        )
        .unwrap()
    }

    /// Applies `f(dim, x)` to every code entry and permutes columns by `perm`
    /// (new column k is old column `perm[k]`).
    pub fn remap(
        set: &LabeledReprSet,
        perm: &[usize],
        f: impl Fn(usize, f64) -> f64,
    ) -> LabeledReprSet {
        let d = set.dim();
        let mut codes = Vec::with_capacity(set.codes().len());
        for r in 0..set.len() {
            let row = set.code(r);
            codes.extend(perm.iter().map(|&j| f(j, row[j])));
        }
        let labels = (0..set.len())
            .flat_map(|r| (0..set.factors().len()).map(move |f| set.label(r, f)))
            .collect();
        LabeledReprSet::new(set.factors().to_vec(), set.ids().to_vec(), codes, d, labels).unwrap()
    }
}
