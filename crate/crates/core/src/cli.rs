//! Command-line front end. `run` never exits the process; it returns the exit
//! code so tests can drive it in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::corpus::{
    generate_letters, generate_pos, generate_ynoc, read_corpus_dir, split_corpus, write_corpus_dir,
    PosVocab, SplitRatios, SplitTag, YnocVocab, DEFAULT_POS_CAP,
};
use crate::error::{Error, Result};
use crate::factor_model::{load_representations, LabeledReprSet, ReprManifest};
use crate::homotopy::{self, Decoder, HomotopyPath, Stage};
use crate::ideal::{build_ideal, IdealCodebook};
use crate::metrics::{evaluate_all, parse_selection, MetricConfig};
use crate::stats::{
    pearson_matrix, repr_stats, tally_map, top3_tally, ObservationTable, DEFAULT_AU_THRESHOLD,
};
use crate::FORMAT_VERSION;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format version 1)");

/// Name of the in-process reference decoder accepted by `homotopy --decoder`.
pub const NEAREST_CODEBOOK: &str = "nearest-codebook";

#[derive(Debug, Parser)]
#[command(name = "factorbench", version = VERSION, about = "Factored corpora, ideal codes and disentanglement metrics")]
struct Cli {
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a corpus with annotations and train/valid/test splits
    Gen(GenArgs),
    /// Build ideal representations for a generated corpus
    Ideal(IdealArgs),
    /// Evaluate disentanglement metrics on a representation file
    Eval(EvalArgs),
    /// Hoyer sparsity and active units of a representation file
    Stats(StatsArgs),
    /// Pearson correlations between the columns of an observation table
    Corr(CorrArgs),
    /// Count top-3 appearances per row over metric columns
    Top3(Top3Args),
    /// Interpolate between two codes and optionally decode the path
    Homotopy(HomotopyArgs),
    /// Reference decoder: snap codes on stdin to a codebook, one sentence per line
    #[command(hide = true)]
    DecodeNearest(DecodeNearestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Ynoc,
    Pos,
    Letters,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: Kind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sentences sampled per POS structure
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value = "0.6,0.2,0.2")]
    ratios: String,
}

#[derive(Debug, Args)]
struct IdealArgs {
    /// Directory written by `gen`
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long = "dims-per-factor", short = 'k', default_value_t = 1)]
    dims_per_factor: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evenly spaced coordinates instead of uniform draws
    #[arg(long)]
    grid: bool,
    /// Representation TSV; the codebook and manifest are written beside it
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReprInput {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

impl ReprInput {
    fn load(&self) -> Result<LabeledReprSet> {
        let manifest = self
            .manifest
            .as_deref()
            .map(ReprManifest::read)
            .transpose()?;
        load_representations(&self.input, manifest.as_ref())
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    repr: ReprInput,
    #[arg(long, default_value = "all")]
    metrics: String,
    /// JSON or key=value file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Codes sampled per factor
    #[arg(long)]
    n: Option<usize>,
    /// Codes per group (Higgins, Kim)
    #[arg(long)]
    l: Option<usize>,
    /// Groups per factor (Higgins, Kim)
    #[arg(long)]
    groups: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long = "svm-lambda")]
    svm_lambda: Option<f64>,
    #[arg(long = "drop-absent")]
    drop_absent: bool,
    #[arg(long)]
    strict: bool,
    /// Report path; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    repr: ReprInput,
    #[arg(long, default_value_t = DEFAULT_AU_THRESHOLD)]
    threshold: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorrArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Top3Args {
    #[arg(long)]
    table: PathBuf,
    /// Comma-separated metric columns
    #[arg(long, value_delimiter = ',', required = true)]
    metrics: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Linear,
    Dimwise,
}

#[derive(Debug, Args)]
struct HomotopyArgs {
    #[command(flatten)]
    repr: ReprInput,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, value_enum, default_value_t = Mode::Linear)]
    mode: Mode,
    /// Intermediate codes (linear) or steps per dimension (dimwise)
    #[arg(long, default_value_t = homotopy::DEFAULT_PER_DIM)]
    steps: usize,
    /// Shell command speaking the line protocol, or `nearest-codebook`
    #[arg(long)]
    decoder: Option<String>,
    /// Codebook JSON for the `nearest-codebook` decoder
    #[arg(long)]
    codebook: Option<PathBuf>,
    /// Seconds to wait for the external decoder
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecodeNearestArgs {
    #[arg(long)]
    codebook: PathBuf,
}

/// Parses `args` (program name first) and runs the subcommand.
///
/// Exit codes: 0 on success, 1 for usage and validation errors, 2 for I/O and
/// decoder transport failures. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Transport { partial, .. } = &e {
                if !partial.is_empty() {
                    eprintln!("decoder answered {} line(s) before failing", partial.len());
                }
            }
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    if cli.jobs == 0 {
        return Err(Error::validation("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::validation(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Gen(a) => gen(a),
        Command::Ideal(a) => ideal(a),
        Command::Eval(a) => eval(a),
        Command::Stats(a) => stats(a),
        Command::Corr(a) => corr(a),
        Command::Top3(a) => top3(a),
        Command::Homotopy(a) => homotopy_cmd(a),
        Command::DecodeNearest(a) => {
            let book = IdealCodebook::read(&a.codebook)?;
            let stdin = std::io::stdin();
            homotopy::serve_nearest_codebook(&book, stdin.lock(), std::io::stdout().lock())
        }
    })
}

fn gen(a: GenArgs) -> Result<()> {
    let ratios = SplitRatios::parse(&a.ratios)?;
    if a.cap.is_some() && !matches!(a.kind, Kind::Pos) {
        return Err(Error::validation("--cap only applies to the pos corpus"));
    }
    let corpus = match a.kind {
        Kind::Ynoc => generate_ynoc(&YnocVocab::default())?,
        Kind::Pos => generate_pos(
            &PosVocab::default(),
            a.cap.unwrap_or(DEFAULT_POS_CAP),
            a.seed,
        )?,
        Kind::Letters => generate_letters()?,
    };
    let (train, valid, test) = split_corpus(&corpus, ratios, a.seed)?;
    let cap = matches!(a.kind, Kind::Pos).then(|| a.cap.unwrap_or(DEFAULT_POS_CAP));
    let m = write_corpus_dir(&a.out, [&train, &valid, &test], a.seed, cap, ratios)?;
    log::info!(
        "{}: {} sentences ({} / {} / {})",
        a.out.display(),
        m.counts.total,
        m.counts.train,
        m.counts.valid,
        m.counts.test
    );
    Ok(())
}

/// `reps.tsv` gets `reps.codebook.json` and `reps.manifest.json` beside it.
pub fn sidecar(out: &Path, what: &str) -> PathBuf {
    out.with_extension(format!("{what}.json"))
}

fn ideal(a: IdealArgs) -> Result<()> {
    let corpus = read_corpus_dir(&a.corpus, SplitTag::All)?;
    let (book, set) = build_ideal(&corpus, a.dims_per_factor, a.seed, a.grid)?;
    set.save(&a.out)?;
    set.save_manifest(&sidecar(&a.out, "manifest"))?;
    book.write(&sidecar(&a.out, "codebook"))
}

/// Merges `patch` into `base`, refusing keys `base` does not have.
fn merge(base: &mut Value, patch: Value, path: &str) -> Result<()> {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                let here = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                let slot = b
                    .get_mut(&k)
                    .ok_or_else(|| Error::validation(format!("unknown config key {here:?}")))?;
                merge(slot, v, &here)?;
            }
            Ok(())
        }
        (b, p) => {
            *b = p;
            Ok(())
        }
    }
}

/// `key=value` lines with dotted keys for nested settings; values are read as
/// JSON when they parse, else as strings.
fn parse_key_values(text: &str, path: &Path) -> Result<Value> {
    let mut root = Map::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: format!("expected key=value, found {line:?}"),
        })?;
        let value = value.trim();
        let parsed =
            serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        let mut keys: Vec<&str> = key.trim().split('.').collect();
        let last = keys.pop().unwrap_or_default();
        let mut node = &mut root;
        for k in keys {
            node = node
                .entry(k)
                .or_insert_with(|| Value::Object(Map::new()))
                .as_object_mut()
                .ok_or_else(|| {
                    Error::validation(format!("config key {key:?} nests under a value"))
                })?;
        }
        node.insert(last.to_string(), parsed);
    }
    Ok(Value::Object(root))
}

fn metric_config(a: &EvalArgs) -> Result<MetricConfig> {
    let mut value = serde_json::to_value(MetricConfig::default())?;
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let patch = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text)?
        } else {
            parse_key_values(&text, path)?
        };
        merge(&mut value, patch, "")?;
    }
    let mut cfg: MetricConfig = serde_json::from_value(value)?;
    macro_rules! flag {
        ($src:expr => $dst:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    flag!(a.seed => cfg.seed);
    flag!(a.n => cfg.n_samples);
    flag!(a.l => cfg.group_size);
    flag!(a.groups => cfg.n_groups);
    flag!(a.bins => cfg.bins);
    flag!(a.runs => cfg.runs);
    flag!(a.trees => cfg.forest.trees);
    flag!(a.svm_lambda => cfg.svm.lambda);
    cfg.drop_absent |= a.drop_absent;
    cfg.strict |= a.strict;
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, json).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .lock()
            .write_all(json.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = metric_config(&a)?;
    let selection = parse_selection(&a.metrics)?;
    let set = a.repr.load()?;
    let report = evaluate_all(&set, &cfg, &selection)?;
    write_json(&report, a.out.as_deref())
}

fn stats(a: StatsArgs) -> Result<()> {
    let set = a.repr.load()?;
    write_json(&repr_stats(&set, a.threshold)?, a.out.as_deref())
}

fn corr(a: CorrArgs) -> Result<()> {
    let table = ObservationTable::read(&a.table)?;
    write_json(&pearson_matrix(&table)?, a.out.as_deref())
}

#[derive(Serialize)]
struct Top3Report {
    format_version: u32,
    metrics: Vec<String>,
    tally: std::collections::BTreeMap<String, usize>,
}

fn top3(a: Top3Args) -> Result<()> {
    let table = ObservationTable::read(&a.table)?;
    let names: Vec<&str> = a.metrics.iter().map(String::as_str).collect();
    let tally = top3_tally(&table, &names)?;
    let report = Top3Report {
        format_version: FORMAT_VERSION,
        metrics: a.metrics.clone(),
        tally: tally_map(&tally),
    };
    write_json(&report, a.out.as_deref())
}

fn homotopy_cmd(a: HomotopyArgs) -> Result<()> {
    let set = a.repr.load()?;
    let code_of = |id: &str| {
        set.row_of(id).map(|r| set.code(r).to_vec()).ok_or_else(|| {
            Error::validation(format!(
                "no row with id {id:?} in {}",
                a.repr.input.display()
            ))
        })
    };
    let (z1, z2) = (code_of(&a.from)?, code_of(&a.to)?);
    let path = match a.mode {
        Mode::Linear => homotopy::linear_path(&z1, &z2, a.steps)?,
        Mode::Dimwise => homotopy::dimensionwise_path(&z1, &z2, a.steps)?,
    };
    let sentences = match a.decoder.as_deref() {
        None => None,
        Some(NEAREST_CODEBOOK) => {
            let cb = a.codebook.as_deref().ok_or_else(|| {
                Error::validation("the nearest-codebook decoder needs --codebook")
            })?;
            let book = IdealCodebook::read(cb)?;
            Some(
                path.steps
                    .iter()
                    .map(|s| homotopy::nearest_codebook_sentence(&book, &s.code))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        Some(cmd) => {
            let dec = Decoder {
                command: cmd.to_string(),
                timeout: Duration::from_secs(a.timeout),
            };
            Some(
                homotopy::decode_path(&path, &dec)?
                    .into_iter()
                    .map(|d| d.sentence)
                    .collect(),
            )
        }
    };
    write_path(&path, sentences.as_deref(), &a.out)
}

fn write_path(path: &HomotopyPath, sentences: Option<&[String]>, out: &Path) -> Result<()> {
    let rows: Vec<(Stage, &[f64], Option<&str>)> = path
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| (s.stage, s.code.as_slice(), sentences.map(|t| t[i].as_str())))
        .collect();
    fs::write(out, homotopy::path_table(&rows)).map_err(|e| Error::io(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_names_the_format() {
        assert!(VERSION.ends_with(&format!("(format version {FORMAT_VERSION})")));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["factorbench", "frobnicate"]), 1);
        assert_eq!(run(["factorbench", "eval", "--bogus"]), 1);
        assert_eq!(run(["factorbench", "--version"]), 0);
    }

    #[test]
    fn key_value_config_nests_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg.txt");
        fs::write(
            &p,
            "# sweep\nseed = 9\nbins=30\nforest.max_features = sqrt\nsvm.lambda=0.5\n",
        )
        .unwrap();
        let cli = Cli::try_parse_from([
            "factorbench",
            "eval",
            "--input",
            "x",
            "--config",
            p.to_str().unwrap(),
            "--bins",
            "12",
        ])
        .unwrap();
        let Command::Eval(a) = cli.command else {
            panic!()
        };
        let cfg = metric_config(&a).unwrap();
        assert_eq!((cfg.seed, cfg.bins, cfg.svm.lambda), (9, 12, 0.5));
        assert_eq!(cfg.forest.max_features, crate::learners::MaxFeatures::Sqrt);

        fs::write(&p, "{\"runs\": 3, \"nope\": 1}").unwrap();
        let cli = Cli::try_parse_from([
            "factorbench",
            "eval",
            "--input",
            "x",
            "--config",
            p.to_str().unwrap(),
        ])
        .unwrap();
        let Command::Eval(a) = cli.command else {
            panic!()
        };
        let err = metric_config(&a).unwrap_err().to_string();
        assert!(err.contains("nope"), "{err}");
    }

    #[test]
    fn sidecars_sit_beside_the_output() {
        assert_eq!(
            sidecar(Path::new("d/reps.tsv"), "codebook"),
            PathBuf::from("d/reps.codebook.json")
        );
    }
}
