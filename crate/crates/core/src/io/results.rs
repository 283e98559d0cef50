//! Writers and readers for training records, histograms, diagnostic series
//! and trained-parameter files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value reads back bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cheb::{AxisTransform, DomainBox};
use crate::diagnostics::{DiagnosticSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::model::{
    AdamConfig, BranchOutcome, BranchStatus, Init, ModelSpec, QcpmParams, TrainConfig, TrainRecord,
};
use crate::sampler::HistogramRow;

use super::{header_entry, parse_pair};

fn write_file(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

struct Lines<'a> {
    path: &'a Path,
}

impl Lines<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn num<T: FromStr>(&self, line: usize, s: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| self.err(line, format!("cannot parse `{s}`")))
    }

    fn opt_num(&self, line: usize, s: &str) -> Result<Option<f64>> {
        match s.trim() {
            "" | "none" => Ok(None),
            t => self.num(line, t).map(Some),
        }
    }

    fn list(&self, line: usize, s: &str) -> Result<Vec<f64>> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',').map(|x| self.num(line, x)).collect()
    }
}

/// A trained model as stored for the `sample` and `diagnose` commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub label: String,
    pub model: ModelSpec,
    pub domain: DomainBox,
    pub params: QcpmParams,
    pub scale: f64,
    pub learning_rate: f64,
    pub final_r2: Option<f64>,
}

impl TrainedModel {
    pub fn from_record(record: &TrainRecord, domain: DomainBox) -> Self {
        Self {
            label: record.label.clone(),
            model: record.config.model,
            domain,
            params: record.params.clone(),
            scale: record.scale,
            learning_rate: record.best_learning_rate,
            final_r2: record.final_r2(),
        }
    }
}

pub fn write_params(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(model)?;
    text.push('\n');
    write_file(path.as_ref(), text)
}

pub fn read_params(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let model: TrainedModel = serde_json::from_str(&read_file(path)?)?;
    model.params.check(&model.model)?;
    model.domain.validate()?;
    Ok(model)
}

/// Header block, one `epoch,loss,r2,nonpurity` line per epoch, then a
/// `# summary` block.
pub fn write_record(record: &TrainRecord, path: impl AsRef<Path>) -> Result<()> {
    let c = &record.config;
    let m = &c.model;
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "# qcpm train record").unwrap();
    writeln!(w, "# label: {}", record.label).unwrap();
    writeln!(w, "# n_qubits: {}", m.n_qubits).unwrap();
    writeln!(w, "# depth: {}", m.depth).unwrap();
    writeln!(w, "# use_correlation: {}", m.use_correlation).unwrap();
    writeln!(w, "# entangler: {}", m.entangler).unwrap();
    writeln!(w, "# epochs: {}", c.epochs).unwrap();
    writeln!(w, "# learning_rates: {}", join(&c.learning_rates)).unwrap();
    writeln!(
        w,
        "# adam: {},{},{}",
        c.adam.beta1, c.adam.beta2, c.adam.epsilon
    )
    .unwrap();
    writeln!(w, "# seed: {}", c.seed).unwrap();
    writeln!(
        w,
        "# diagnostics_cadence: {}",
        c.diagnostics_cadence
            .map_or("none".to_string(), |k| k.to_string())
    )
    .unwrap();
    writeln!(w, "# refit_affine: {}", c.refit_affine).unwrap();
    writeln!(w, "# init: {}", c.init).unwrap();
    writeln!(
        w,
        "# note: initialization and alpha/beta treatment are choices of this tool (init={}, alpha_beta={})",
        c.init,
        if c.refit_affine { "least-squares refit" } else { "adam" }
    )
    .unwrap();
    writeln!(w, "epoch,loss,r2,nonpurity").unwrap();
    for (e, loss) in record.losses.iter().enumerate() {
        let cval = record.nonpurity[e].map_or(String::new(), |x| x.to_string());
        writeln!(w, "{},{},{},{}", e + 1, loss, record.r2[e], cval).unwrap();
    }
    writeln!(w, "# summary").unwrap();
    writeln!(w, "# best_learning_rate: {}", record.best_learning_rate).unwrap();
    writeln!(w, "# final_loss: {}", record.final_loss()).unwrap();
    writeln!(
        w,
        "# final_r2: {}",
        record
            .final_r2()
            .map_or("degenerate".into(), |r| r.to_string())
    )
    .unwrap();
    writeln!(w, "# initial_nonpurity: {}", opt(record.initial_nonpurity)).unwrap();
    writeln!(w, "# degenerate: {}", record.degenerate).unwrap();
    writeln!(w, "# scale: {}", record.scale).unwrap();
    writeln!(w, "# alpha: {}", record.params.alpha).unwrap();
    writeln!(w, "# beta: {}", record.params.beta).unwrap();
    writeln!(w, "# theta: {}", join(&record.params.theta)).unwrap();
    writeln!(w, "# vartheta: {}", join(&record.params.vartheta)).unwrap();
    for b in &record.branches {
        let status = match b.status {
            BranchStatus::Completed => "completed".to_string(),
            BranchStatus::Diverged { epoch } => format!("diverged@{epoch}"),
        };
        writeln!(
            w,
            "# branch: {},{},{},{}",
            b.learning_rate,
            status,
            b.final_loss,
            opt(b.final_r2)
        )
        .unwrap();
    }
    write_file(path.as_ref(), s)
}

pub fn read_record(path: impl AsRef<Path>) -> Result<TrainRecord> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let p = Lines { path };
    let mut config = TrainConfig::default();
    let mut label = String::new();
    let mut losses = Vec::new();
    let mut r2 = Vec::new();
    let mut nonpurity = Vec::new();
    let mut params = QcpmParams {
        theta: Vec::new(),
        vartheta: Vec::new(),
        alpha: 1.0,
        beta: 0.0,
    };
    let mut best_lr = None;
    let mut initial_nonpurity = None;
    let mut degenerate = false;
    let mut scale = 1.0;
    let mut branches = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line == "epoch,loss,r2,nonpurity" {
            continue;
        }
        if line.starts_with('#') {
            let Some((k, v)) = header_entry(line) else {
                continue;
            };
            match k {
                "label" => label = v.to_string(),
                "n_qubits" => config.model.n_qubits = p.num(ln, v)?,
                "depth" => config.model.depth = p.num(ln, v)?,
                "use_correlation" => config.model.use_correlation = p.num(ln, v)?,
                "entangler" => config.model.entangler = v.parse()?,
                "epochs" => config.epochs = p.num(ln, v)?,
                "learning_rates" => config.learning_rates = p.list(ln, v)?,
                "adam" => {
                    let a = p.list(ln, v)?;
                    if a.len() != 3 {
                        return Err(p.err(ln, "adam needs beta1,beta2,epsilon"));
                    }
                    config.adam = AdamConfig {
                        beta1: a[0],
                        beta2: a[1],
                        epsilon: a[2],
                    };
                }
                "seed" => config.seed = p.num(ln, v)?,
                "diagnostics_cadence" => {
                    config.diagnostics_cadence = match v {
                        "none" => None,
                        _ => Some(p.num(ln, v)?),
                    }
                }
                "refit_affine" => config.refit_affine = p.num(ln, v)?,
                "init" => config.init = v.parse::<Init>()?,
                "best_learning_rate" => best_lr = Some(p.num(ln, v)?),
                "initial_nonpurity" => initial_nonpurity = p.opt_num(ln, v)?,
                "degenerate" => degenerate = p.num(ln, v)?,
                "scale" => scale = p.num(ln, v)?,
                "alpha" => params.alpha = p.num(ln, v)?,
                "beta" => params.beta = p.num(ln, v)?,
                "theta" => params.theta = p.list(ln, v)?,
                "vartheta" => params.vartheta = p.list(ln, v)?,
                "branch" => {
                    let f: Vec<&str> = v.split(',').collect();
                    if f.len() != 4 {
                        return Err(p.err(ln, "branch needs lr,status,loss,r2"));
                    }
                    let status = match f[1] {
                        "completed" => BranchStatus::Completed,
                        s => match s.strip_prefix("diverged@") {
                            Some(e) => BranchStatus::Diverged {
                                epoch: p.num(ln, e)?,
                            },
                            None => return Err(p.err(ln, format!("bad status `{s}`"))),
                        },
                    };
                    branches.push(BranchOutcome {
                        learning_rate: p.num(ln, f[0])?,
                        status,
                        final_loss: p.num(ln, f[2])?,
                        final_r2: p.opt_num(ln, f[3])?,
                    });
                }
                _ => {}
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(p.err(ln, "expected epoch,loss,r2,nonpurity"));
        }
        let epoch: usize = p.num(ln, f[0])?;
        if epoch != losses.len() + 1 {
            return Err(p.err(ln, format!("epoch {epoch} out of sequence")));
        }
        losses.push(p.num(ln, f[1])?);
        r2.push(p.num(ln, f[2])?);
        nonpurity.push(p.opt_num(ln, f[3])?);
    }
    if losses.is_empty() {
        return Err(p.err(text.lines().count(), "no epoch rows"));
    }
    params.check(&config.model)?;
    let best_learning_rate =
        best_lr.ok_or_else(|| p.err(text.lines().count(), "missing best_learning_rate"))?;
    Ok(TrainRecord {
        label,
        config,
        losses,
        r2,
        nonpurity,
        initial_nonpurity,
        params,
        best_learning_rate,
        branches,
        scale,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramMode {
    Sampled,
    Exact,
}

/// Parsed histogram export.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramFile {
    pub n_qubits: usize,
    pub extension: usize,
    pub shots: u64,
    pub mode: HistogramMode,
    pub domain: DomainBox,
    pub rows: Vec<HistogramRow>,
}

pub fn write_histogram(hist: &HistogramFile, path: impl AsRef<Path>) -> Result<()> {
    let b = &hist.domain;
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "# n_qubits: {}", hist.n_qubits).unwrap();
    writeln!(w, "# s: {}", hist.extension).unwrap();
    writeln!(w, "# shots: {}", hist.shots).unwrap();
    writeln!(
        w,
        "# mode: {}",
        match hist.mode {
            HistogramMode::Sampled => "sampled",
            HistogramMode::Exact => "exact",
        }
    )
    .unwrap();
    writeln!(w, "# z_range: {},{}", b.x_lo, b.x_hi).unwrap();
    writeln!(w, "# q_range: {},{}", b.y_lo, b.y_hi).unwrap();
    writeln!(w, "# z_axis: {}", b.x_axis).unwrap();
    writeln!(w, "# q_axis: {}", b.y_axis).unwrap();
    writeln!(w, "z,Q,count,probability").unwrap();
    for r in &hist.rows {
        writeln!(w, "{},{},{},{}", r.z, r.q, r.count, r.probability).unwrap();
    }
    write_file(path.as_ref(), s)
}

pub fn read_histogram(path: impl AsRef<Path>) -> Result<HistogramFile> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let p = Lines { path };
    let mut n_qubits = None;
    let mut extension = 0;
    let mut shots = 0;
    let mut mode = HistogramMode::Sampled;
    let mut z_range = None;
    let mut q_range = None;
    let mut z_axis = AxisTransform::Linear;
    let mut q_axis = AxisTransform::Linear;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line == "z,Q,count,probability" {
            continue;
        }
        if line.starts_with('#') {
            let Some((k, v)) = header_entry(line) else {
                continue;
            };
            match k {
                "n_qubits" => n_qubits = Some(p.num(ln, v)?),
                "s" => extension = p.num(ln, v)?,
                "shots" => shots = p.num(ln, v)?,
                "mode" => {
                    mode = match v {
                        "sampled" => HistogramMode::Sampled,
                        "exact" => HistogramMode::Exact,
                        _ => return Err(p.err(ln, format!("bad mode `{v}`"))),
                    }
                }
                "z_range" => z_range = parse_pair(v),
                "q_range" => q_range = parse_pair(v),
                "z_axis" => z_axis = v.parse()?,
                "q_axis" => q_axis = v.parse()?,
                _ => {}
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(p.err(ln, "expected z,Q,count,probability"));
        }
        rows.push(HistogramRow {
            z: p.num(ln, f[0])?,
            q: p.num(ln, f[1])?,
            count: p.num(ln, f[2])?,
            probability: p.num(ln, f[3])?,
        });
    }
    let last = text.lines().count();
    let (z_range, q_range) = z_range
        .zip(q_range)
        .ok_or_else(|| p.err(last, "missing z_range/q_range"))?;
    Ok(HistogramFile {
        n_qubits: n_qubits.ok_or_else(|| p.err(last, "missing n_qubits"))?,
        extension,
        shots,
        mode,
        domain: DomainBox::new(z_range, q_range, z_axis, q_axis)?,
        rows,
    })
}

pub fn write_series(series: &DiagnosticSeries, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::new();
    let w = &mut s;
    writeln!(w, "# kind: {}", series.kind).unwrap();
    for (k, v) in &series.metadata {
        writeln!(w, "# {k}: {v}").unwrap();
    }
    writeln!(w, "kind,abscissa,ordinate").unwrap();
    for (x, y) in series.abscissa.iter().zip(&series.ordinate) {
        writeln!(w, "{},{},{}", series.kind, x, y).unwrap();
    }
    write_file(path.as_ref(), s)
}

pub fn read_series(path: impl AsRef<Path>) -> Result<DiagnosticSeries> {
    let path = path.as_ref();
    let text = read_file(path)?;
    let p = Lines { path };
    let mut kind: Option<SeriesKind> = None;
    let mut metadata = Vec::new();
    let mut abscissa = Vec::new();
    let mut ordinate = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line == "kind,abscissa,ordinate" {
            continue;
        }
        if line.starts_with('#') {
            if let Some((k, v)) = header_entry(line) {
                if k == "kind" {
                    kind = Some(v.parse()?);
                } else {
                    metadata.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(p.err(ln, "expected kind,abscissa,ordinate"));
        }
        abscissa.push(p.num(ln, f[1])?);
        ordinate.push(p.num(ln, f[2])?);
    }
    Ok(DiagnosticSeries {
        kind: kind.ok_or_else(|| p.err(1, "missing kind header"))?,
        abscissa,
        ordinate,
        metadata,
    })
}
