use std::fmt;
use std::str::FromStr;

use log::{debug, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::nonpurity_of;
use crate::error::{Error, Result};
use crate::io::TargetGrid;

use super::objective::Objective;
use super::{Adam, AdamConfig, ModelSpec, QcpmParams};

/// Starting point of every sweep branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// All angles uniform in `[-pi, pi]`.
    #[default]
    Uniform,
    /// Z-register angles zero, Q-register angles uniform: the coefficient
    /// state starts as a product across registers even with the
    /// correlation layer present.
    ProductStart,
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Init::Uniform => "uniform",
            Init::ProductStart => "product-start",
        })
    }
}

impl FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(Init::Uniform),
            "product-start" => Ok(Init::ProductStart),
            other => Err(Error::Config(format!("unknown init `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelSpec,
    pub epochs: usize,
    pub learning_rates: Vec<f64>,
    pub adam: AdamConfig,
    pub seed: u64,
    /// Record the nonpurity every this many epochs; `None` disables it.
    pub diagnostics_cadence: Option<usize>,
    /// Replace `(alpha, beta)` after each step by their least-squares fit.
    pub refit_affine: bool,
    pub init: Init,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            epochs: 10_000,
            learning_rates: default_learning_rates(),
            adam: AdamConfig::default(),
            seed: 0,
            diagnostics_cadence: None,
            refit_affine: false,
            init: Init::Uniform,
        }
    }
}

/// `0.1, 0.2, ..., 1.0`.
pub fn default_learning_rates() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.learning_rates.is_empty() {
            return Err(Error::Config("learning-rate list is empty".into()));
        }
        if let Some(lr) = self
            .learning_rates
            .iter()
            .find(|&&lr| !(lr > 0.0 && lr <= 1.0))
        {
            return Err(Error::Config(format!("learning rate {lr} outside (0, 1]")));
        }
        if self.diagnostics_cadence == Some(0) {
            return Err(Error::Config("diagnostics cadence must be positive".into()));
        }
        Ok(())
    }

    pub fn initial_params(&self) -> QcpmParams {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut p = QcpmParams::random(&self.model, &mut rng);
        if self.init == Init::ProductStart {
            p.theta.iter_mut().for_each(|t| *t = 0.0);
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchStatus {
    Completed,
    Diverged { epoch: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub learning_rate: f64,
    pub status: BranchStatus,
    pub final_loss: f64,
    /// `None` when the targets have zero variance or the branch diverged.
    pub final_r2: Option<f64>,
}

/// History of the selected learning-rate branch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub label: String,
    pub config: TrainConfig,
    /// Entry `e` is measured after `e + 1` optimizer steps.
    pub losses: Vec<f64>,
    /// `NaN` throughout when the targets have zero variance.
    pub r2: Vec<f64>,
    pub nonpurity: Vec<Option<f64>>,
    /// Nonpurity of the starting parameters, when diagnostics are enabled.
    pub initial_nonpurity: Option<f64>,
    pub params: QcpmParams,
    pub best_learning_rate: f64,
    pub branches: Vec<BranchOutcome>,
    /// Factor that maps normalized targets back to data units.
    pub scale: f64,
    pub degenerate: bool,
}

impl TrainRecord {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("at least one epoch")
    }

    pub fn final_r2(&self) -> Option<f64> {
        self.r2.last().copied().filter(|r| !r.is_nan())
    }
}

struct BranchRun {
    losses: Vec<f64>,
    r2: Vec<f64>,
    nonpurity: Vec<Option<f64>>,
    params: QcpmParams,
    status: BranchStatus,
}

fn refit_affine(params: &mut QcpmParams, amps: &[f64], targets: &[f64]) {
    let n = amps.len() as f64;
    let feats: Vec<f64> = amps.iter().map(|a| a * a).collect();
    let fm = feats.iter().sum::<f64>() / n;
    let tm = targets.iter().sum::<f64>() / n;
    let var: f64 = feats.iter().map(|f| (f - fm) * (f - fm)).sum();
    if var <= f64::EPSILON * n {
        return;
    }
    let cov: f64 = feats
        .iter()
        .zip(targets)
        .map(|(f, t)| (f - fm) * (t - tm))
        .sum();
    params.alpha = cov / var;
    params.beta = tm - params.alpha * fm;
}

fn run_branch(
    obj: &Objective,
    config: &TrainConfig,
    start: &QcpmParams,
    lr: f64,
    ss_tot: f64,
) -> Result<BranchRun> {
    let spec = config.model;
    let n = obj.len() as f64;
    let mut params = start.clone();
    let mut flat = params.to_flat();
    let mut adam = Adam::new(flat.len(), config.adam);
    let mut losses = Vec::with_capacity(config.epochs);
    let mut r2 = Vec::with_capacity(config.epochs);
    let mut nonpurity = Vec::with_capacity(config.epochs);

    let mut eval = obj.evaluate(&params)?;
    for epoch in 1..=config.epochs {
        adam.step(&mut flat, &eval.gradient, lr);
        params = QcpmParams::from_flat(&spec, &flat)?;
        if config.refit_affine {
            let amps = obj.amplitudes(&params)?;
            refit_affine(&mut params, &amps, obj.targets());
            flat = params.to_flat();
        }
        eval = obj.evaluate(&params)?;
        if !eval.loss.is_finite() || !params.alpha.is_finite() {
            warn!(
                "lr {lr}: loss became {} at epoch {epoch}; abandoning branch",
                eval.loss
            );
            return Ok(BranchRun {
                losses,
                r2,
                nonpurity,
                params,
                status: BranchStatus::Diverged { epoch },
            });
        }
        losses.push(eval.loss);
        r2.push(if ss_tot > 0.0 {
            1.0 - eval.loss * n / ss_tot
        } else {
            f64::NAN
        });
        let c = match config.diagnostics_cadence {
            Some(k) if epoch % k == 0 => Some(nonpurity_of(obj.circuit(), &params)?),
            _ => None,
        };
        nonpurity.push(c);
    }
    debug!(
        "lr {lr}: final loss {:.3e}, R2 {:?}",
        losses.last().unwrap(),
        r2.last()
    );
    Ok(BranchRun {
        losses,
        r2,
        nonpurity,
        params,
        status: BranchStatus::Completed,
    })
}

/// Trains on explicit Chebyshev-domain points and (already normalized)
/// targets.
pub fn train_points(
    config: &TrainConfig,
    points: &[(f64, f64)],
    targets: &[f64],
) -> Result<TrainRecord> {
    config.validate()?;
    let obj = Objective::new(config.model, points, targets)?;
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean) * (t - mean)).sum();
    let start = config.initial_params();
    let initial_nonpurity = match config.diagnostics_cadence {
        Some(_) => Some(nonpurity_of(obj.circuit(), &start)?),
        None => None,
    };

    let runs: Vec<Result<BranchRun>> = config
        .learning_rates
        .par_iter()
        .map(|&lr| run_branch(&obj, config, &start, lr, ss_tot))
        .collect();

    let mut branches = Vec::with_capacity(runs.len());
    let mut best: Option<(usize, BranchRun)> = None;
    for (i, run) in runs.into_iter().enumerate() {
        let run = run?;
        let lr = config.learning_rates[i];
        let completed = run.status == BranchStatus::Completed;
        let final_loss = run.losses.last().copied().unwrap_or(f64::NAN);
        let final_r2 = run.r2.last().copied().filter(|r| completed && !r.is_nan());
        branches.push(BranchOutcome {
            learning_rate: lr,
            status: run.status,
            final_loss,
            final_r2,
        });
        if !completed {
            continue;
        }
        let better = match &best {
            None => true,
            Some((j, _)) => {
                let prev = &branches[*j];
                match (final_r2, prev.final_r2) {
                    (Some(a), Some(b)) => a > b,
                    _ => final_loss < prev.final_loss,
                }
            }
        };
        if better {
            best = Some((i, run));
        }
    }

    let (idx, run) = best.ok_or(Error::AllBranchesDiverged)?;
    Ok(TrainRecord {
        label: String::new(),
        config: config.clone(),
        losses: run.losses,
        r2: run.r2,
        nonpurity: run.nonpurity,
        initial_nonpurity,
        params: run.params,
        best_learning_rate: config.learning_rates[idx],
        branches,
        scale: 1.0,
        degenerate: ss_tot == 0.0,
    })
}

/// Learning-rate sweep on a target grid; returns the branch with the best
/// final R^2 (lowest loss when R^2 is undefined).
pub fn train(config: &TrainConfig, data: &TargetGrid) -> Result<TrainRecord> {
    if data.n_qubits() != config.model.n_qubits {
        return Err(Error::Config(format!(
            "grid was built for N = {} but the model uses N = {}",
            data.n_qubits(),
            config.model.n_qubits
        )));
    }
    if data.is_empty() {
        return Err(Error::Empty("target grid"));
    }
    let points = data.chebyshev_points()?;
    let mut record = train_points(config, &points, &data.values())?;
    record.label = data.label.clone();
    record.scale = data.scale;
    Ok(record)
}
