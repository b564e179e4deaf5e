//! Interpolation paths between two latent codes, and decoding them through an
//! external line-protocol process.
//!
//! Protocol: one code per line on the decoder's stdin, as space-separated
//! decimal floats; the decoder answers with exactly one sentence per line on
//! stdout. Closing stdin marks the end of input.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::IdealCodebook;

pub const DEFAULT_PER_DIM: usize = 4;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stage {
    // listed first: untagged decoding tries variants in order
    Dim { dim: usize, t: f64 },
    Linear { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub code: Vec<f64>,
    pub stage: Stage,
}

/// Ordered codes from `from` to `to`. The first step is `from` and the last is
/// `to`, bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyPath {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub steps: Vec<PathStep>,
}

impl HomotopyPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Point `k/n` of the way from `a` to `b`.
///
/// Written as `((n-k)·a + k·b)/n` so that swapping the endpoints and `k` for
/// `n-k` gives the same bits; equal endpoints stay put.
fn lerp(a: f64, b: f64, k: usize, n: usize) -> f64 {
    if a == b || k == 0 {
        a
    } else if k == n {
        b
    } else {
        ((n - k) as f64 * a + k as f64 * b) / n as f64
    }
}

fn check_dims(z1: &[f64], z2: &[f64]) -> Result<()> {
    if z1.len() != z2.len() {
        return Err(Error::DimensionMismatch(z1.len(), z2.len()));
    }
    if z1.is_empty() {
        return Err(Error::validation("homotopy endpoints are empty"));
    }
    Ok(())
}

/// `intermediate + 2` codes evenly spaced on the segment, endpoints included.
pub fn linear_path(z1: &[f64], z2: &[f64], intermediate: usize) -> Result<HomotopyPath> {
    check_dims(z1, z2)?;
    let n = intermediate + 1;
    let steps = (0..=n)
        .map(|k| PathStep {
            code: z1.iter().zip(z2).map(|(&a, &b)| lerp(a, b, k, n)).collect(),
            stage: Stage::Linear {
                t: k as f64 / n as f64,
            },
        })
        .collect();
    Ok(HomotopyPath {
        from: z1.to_vec(),
        to: z2.to_vec(),
        steps,
    })
}

/// Moves one coordinate at a time, in order. Stage `i` starts with dimensions
/// `< i` already at `z2` and the rest at `z1`, then walks dimension `i` to
/// `z2[i]` in `per_dim + 1` steps. Total length is `d·(per_dim+1) + 1`.
pub fn dimensionwise_path(z1: &[f64], z2: &[f64], per_dim: usize) -> Result<HomotopyPath> {
    check_dims(z1, z2)?;
    if per_dim == 0 {
        return Err(Error::validation(
            "per-dimension step count must be at least 1",
        ));
    }
    let n = per_dim + 1;
    let mut current = z1.to_vec();
    let mut steps = vec![PathStep {
        code: current.clone(),
        stage: Stage::Dim { dim: 0, t: 0.0 },
    }];
    for dim in 0..z1.len() {
        for k in 1..=n {
            current[dim] = lerp(z1[dim], z2[dim], k, n);
            steps.push(PathStep {
                code: current.clone(),
                stage: Stage::Dim {
                    dim,
                    t: k as f64 / n as f64,
                },
            });
        }
    }
    Ok(HomotopyPath {
        from: z1.to_vec(),
        to: z2.to_vec(),
        steps,
    })
}

/// Shortest round-trip decimal form, space separated.
pub fn format_code(code: &[f64]) -> String {
    code.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_code(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::validation(format!("not a finite number: {t:?}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedStep {
    pub stage: Stage,
    pub code: Vec<f64>,
    pub sentence: String,
}

/// External decoder: a shell command speaking the line protocol.
#[derive(Debug, Clone)]
pub struct Decoder {
    pub command: String,
    pub timeout: Duration,
}

impl Decoder {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

fn transport(position: usize, message: impl Into<String>, partial: &[String]) -> Error {
    Error::Transport {
        position,
        message: message.into(),
        partial: partial.to_vec(),
    }
}

/// Streams every code of `path` through `decoder` and pairs each with its
/// sentence. Any protocol violation aborts with the 0-based position of the
/// first step without a valid answer and the sentences received so far.
pub fn decode_path(path: &HomotopyPath, decoder: &Decoder) -> Result<Vec<DecodedStep>> {
    let lines = decode_lines(
        path.steps.iter().map(|s| format_code(&s.code)).collect(),
        decoder,
    )?;
    Ok(path
        .steps
        .iter()
        .zip(lines)
        .map(|(s, sentence)| DecodedStep {
            stage: s.stage,
            code: s.code.clone(),
            sentence,
        })
        .collect())
}

fn decode_lines(input: Vec<String>, decoder: &Decoder) -> Result<Vec<String>> {
    let expected = input.len();
    let mut child = shell(&decoder.command)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| {
            transport(
                0,
                format!("cannot launch decoder {:?}: {e}", decoder.command),
                &[],
            )
        })?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");

    // a decoder that stops reading must not block us; write from a thread
    let writer = std::thread::spawn(move || {
        for line in input {
            if writeln!(stdin, "{line}").is_err() {
                break;
            }
        }
    });
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            if tx.send(line).is_err() {
                break;
            }
        }
    });

    let deadline = Instant::now() + decoder.timeout;
    let mut out: Vec<String> = Vec::with_capacity(expected);
    let fail = |child: &mut std::process::Child, pos: usize, msg: String, out: &[String]| {
        let _ = child.kill();
        let _ = child.wait();
        transport(pos, msg, out)
    };
    while out.len() < expected {
        let left = deadline.saturating_duration_since(Instant::now());
        match rx.recv_timeout(left) {
            Ok(Ok(line)) => out.push(line),
            Ok(Err(e)) => {
                return Err(fail(
                    &mut child,
                    out.len(),
                    format!("unreadable output: {e}"),
                    &out,
                ))
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                let msg = format!("timed out after {:?}", decoder.timeout);
                return Err(fail(&mut child, out.len(), msg, &out));
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                let msg = format!(
                    "decoder produced {} line(s) for {expected} code(s)",
                    out.len()
                );
                return Err(fail(&mut child, out.len(), msg, &out));
            }
        }
    }
    let _ = writer.join();
    // the decoder must close its output without saying more
    let left = deadline.saturating_duration_since(Instant::now());
    match rx.recv_timeout(left) {
        Err(mpsc::RecvTimeoutError::Disconnected) => {}
        Ok(_) => {
            let msg = format!("decoder produced more than {expected} line(s)");
            return Err(fail(&mut child, expected, msg, &out));
        }
        Err(mpsc::RecvTimeoutError::Timeout) => {
            let msg = format!(
                "decoder did not close its output within {:?}",
                decoder.timeout
            );
            return Err(fail(&mut child, expected, msg, &out));
        }
    }
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break s,
            Ok(None) if Instant::now() >= deadline => {
                let msg = format!("decoder did not exit within {:?}", decoder.timeout);
                return Err(fail(&mut child, expected, msg, &out));
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => {
                return Err(fail(
                    &mut child,
                    expected,
                    format!("wait failed: {e}"),
                    &out,
                ))
            }
        }
    };
    if !status.success() {
        return Err(transport(
            expected,
            format!("decoder exited with {status}"),
            &out,
        ));
    }
    Ok(out)
}

#[cfg(unix)]
fn shell(cmd: &str) -> Command {
    let mut c = Command::new("sh");
    c.arg("-c").arg(cmd);
    c
}

#[cfg(not(unix))]
fn shell(cmd: &str) -> Command {
    let mut c = Command::new("cmd");
    c.arg("/C").arg(cmd);
    c
}

/// Nearest codebook value per factor, rendered as a sentence of value labels
/// with absent slots left out.
pub fn nearest_codebook_sentence(codebook: &IdealCodebook, code: &[f64]) -> Result<String> {
    let labels = codebook.decode_nearest(code)?;
    Ok(labels
        .into_iter()
        .filter(|l| *l != crate::corpus::ABSENT)
        .collect::<Vec<_>>()
        .join(" "))
}

/// Runs the reference decoder over a line stream until EOF.
pub fn serve_nearest_codebook(
    codebook: &IdealCodebook,
    input: impl BufRead,
    mut output: impl Write,
) -> Result<()> {
    let io_err = |e| Error::io("<stdio>", e);
    for line in input.lines() {
        let code = parse_code(&line.map_err(io_err)?)?;
        writeln!(output, "{}", nearest_codebook_sentence(codebook, &code)?).map_err(io_err)?;
    }
    output.flush().map_err(io_err)
}

/// Writes a path as TSV: `step`, `stage` annotation, optional `sentence`, then
/// the code coordinates.
pub fn path_table(steps: &[(Stage, &[f64], Option<&str>)]) -> String {
    let dim = steps.first().map_or(0, |s| s.1.len());
    let with_text = steps.iter().any(|s| s.2.is_some());
    let mut out = String::from("step\tdim\tt");
    if with_text {
        out.push_str("\tsentence");
    }
    for j in 0..dim {
        out.push_str(&format!("\tz{j}"));
    }
    out.push('\n');
    for (i, (stage, code, text)) in steps.iter().enumerate() {
        let (dim, t) = match *stage {
            Stage::Linear { t } => ("-".to_string(), t),
            Stage::Dim { dim, t } => (dim.to_string(), t),
        };
        out.push_str(&format!("{i}\t{dim}\t{t}"));
        if with_text {
            out.push('\t');
            out.push_str(text.unwrap_or(""));
        }
        for x in code.iter() {
            out.push_str(&format!("\t{x}"));
        }
        out.push('\n');
    }
    out
}
