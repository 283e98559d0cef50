//! Entanglement and correlation analyses of trained models.
//!
//! Cross-register quantities (purity of the Z register, mutual information)
//! are invariant under the local ansätze `V(theta) (x) V(vartheta)`, so on
//! the training-stage state they depend only on the inputs and the
//! correlation layer. On the sampling-stage coefficient state they depend
//! on the trained angles through `C^dagger`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cheb::ChebGrid;
use crate::error::{Error, Result};
use crate::io::TargetGrid;
use crate::model::{train, Circuit, Init, ModelSpec, QcpmParams, TrainConfig, TrainRecord};
use crate::sim::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    NonpurityVsEpoch,
    EntropyVsFf,
    PurityVsZ,
    MutualinfoVsZ,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::NonpurityVsEpoch => "nonpurity_vs_epoch",
            SeriesKind::EntropyVsFf => "entropy_vs_ff",
            SeriesKind::PurityVsZ => "purity_vs_z",
            SeriesKind::MutualinfoVsZ => "mutualinfo_vs_z",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SeriesKind::NonpurityVsEpoch,
            SeriesKind::EntropyVsFf,
            SeriesKind::PurityVsZ,
            SeriesKind::MutualinfoVsZ,
        ]
        .into_iter()
        .find(|k| k.as_str() == s.trim())
        .ok_or_else(|| Error::Config(format!("unknown series kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub kind: SeriesKind,
    pub abscissa: Vec<f64>,
    pub ordinate: Vec<f64>,
    /// Ordered `key: value` pairs written into the export header.
    pub metadata: Vec<(String, String)>,
}

impl DiagnosticSeries {
    pub fn new(kind: SeriesKind) -> Self {
        Self {
            kind,
            abscissa: Vec::new(),
            ordinate: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn push(&mut self, x: f64, y: f64) {
        self.abscissa.push(x);
        self.ordinate.push(y);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// SHA-256 over the JSON form of the parameters.
pub fn params_hash(params: &QcpmParams) -> String {
    let json = serde_json::to_vec(params).expect("params serialize");
    hex::encode(Sha256::digest(&json))
}

fn describe(series: &mut DiagnosticSeries, params: &QcpmParams, spec: &ModelSpec) {
    series.meta("params_hash", params_hash(params));
    series.meta("n_qubits", spec.n_qubits);
    series.meta("depth", spec.depth);
    series.meta("use_correlation", spec.use_correlation);
    series.meta("entangler", spec.entangler);
}

fn register(spec: &ModelSpec, which: Register) -> Vec<usize> {
    match which {
        Register::Z => spec.z_qubits(),
        Register::Q => spec.q_qubits(),
    }
}

fn z_purity(state: &StateVector, spec: &ModelSpec) -> Result<f64> {
    Ok(state.partial_trace(&spec.z_qubits())?.purity())
}

pub(crate) fn nonpurity_of(circuit: &Circuit, params: &QcpmParams) -> Result<f64> {
    let state = circuit.coefficient_state(params)?;
    Ok((1.0 - z_purity(&state, circuit.spec())?).abs())
}

/// `|1 - Tr(rho_Z^2)|` of the sampling-stage coefficient state.
pub fn nonpurity(params: &QcpmParams, spec: &ModelSpec) -> Result<f64> {
    nonpurity_of(&Circuit::new(*spec)?, params)
}

/// Per-epoch nonpurity stored in a training record.
pub fn nonpurity_trace(record: &TrainRecord) -> Result<DiagnosticSeries> {
    if record.config.diagnostics_cadence.is_none() {
        return Err(Error::Config(
            "record was produced without nonpurity diagnostics".into(),
        ));
    }
    let mut s = DiagnosticSeries::new(SeriesKind::NonpurityVsEpoch);
    describe(&mut s, &record.params, &record.config.model);
    s.meta("label", &record.label);
    s.meta("init", record.config.init);
    s.meta("learning_rate", record.best_learning_rate);
    if let Some(c0) = record.initial_nonpurity {
        s.meta("initial_nonpurity", c0);
    }
    for (e, c) in record.nonpurity.iter().enumerate() {
        if let Some(c) = c {
            s.push((e + 1) as f64, *c);
        }
    }
    Ok(s)
}

/// Trains from a product-state start (Z angles zero) with per-epoch
/// diagnostics and returns its nonpurity series.
pub fn product_start_trace(config: &TrainConfig, data: &TargetGrid) -> Result<DiagnosticSeries> {
    let mut cfg = config.clone();
    cfg.init = Init::ProductStart;
    cfg.diagnostics_cadence.get_or_insert(1);
    nonpurity_trace(&train(&cfg, data)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Z,
    Q,
}

impl FromStr for Register {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "z" | "Z" => Ok(Register::Z),
            "q" | "Q" => Ok(Register::Q),
            other => Err(Error::Config(format!("unknown register `{other}`"))),
        }
    }
}

/// Which circuit state a diagnostic is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateChoice {
    /// Sampling-stage `C^dagger (V^dagger (x) V^dagger) |0>`.
    Coefficient,
    /// Training-stage state at `(u, v)` with unit-norm feature vectors.
    Training { u: f64, v: f64 },
}

fn state_for(circuit: &Circuit, params: &QcpmParams, choice: StateChoice) -> Result<StateVector> {
    match choice {
        StateChoice::Coefficient => circuit.coefficient_state(params),
        StateChoice::Training { u, v } => circuit.training_state(u, v, params, true),
    }
}

/// Entropy (bits) of the first `N/2` qubits of one register.
pub fn half_register_entropy(
    params: &QcpmParams,
    spec: &ModelSpec,
    which: Register,
    choice: StateChoice,
) -> Result<f64> {
    if !spec.n_qubits.is_multiple_of(2) {
        return Err(Error::OddRegister(spec.n_qubits));
    }
    let circuit = Circuit::new(*spec)?;
    let state = state_for(&circuit, params, choice)?;
    let qubits = register(spec, which);
    let keep = &qubits[..spec.n_qubits / 2];
    Ok(state.partial_trace(keep)?.von_neumann_entropy())
}

/// Half-register Z entropies for a set of trained models, one row each.
pub fn entropy_table(
    models: &[(String, QcpmParams)],
    spec: &ModelSpec,
    choice: StateChoice,
) -> Result<DiagnosticSeries> {
    let mut s = DiagnosticSeries::new(SeriesKind::EntropyVsFf);
    s.meta("n_qubits", spec.n_qubits);
    s.meta("use_correlation", spec.use_correlation);
    s.meta(
        "state",
        match choice {
            StateChoice::Coefficient => "coefficient".to_string(),
            StateChoice::Training { u, v } => format!("training u={u} v={v}"),
        },
    );
    for (i, (label, params)) in models.iter().enumerate() {
        let e = half_register_entropy(params, spec, Register::Z, choice)?;
        s.meta(&format!("model_{i}"), label);
        s.push(i as f64, e);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    Purity,
    MutualInformation,
}

impl FromStr for SweepQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "purity" => Ok(SweepQuantity::Purity),
            "mutual_information" | "mutual-information" | "mi" => {
                Ok(SweepQuantity::MutualInformation)
            }
            other => Err(Error::Config(format!("unknown sweep quantity `{other}`"))),
        }
    }
}

/// Evaluates `gamma_Z(z)` or `I(Z:Q)(z) = 2 S(rho_Z)` on the training-stage
/// state at fixed `v`: first `resolution` equispaced `z` in `[-1, 1]`, then
/// every node and half-node of the register (metadata records the split).
pub fn z_sweep(
    params: &QcpmParams,
    spec: &ModelSpec,
    quantity: SweepQuantity,
    v_fixed: f64,
    resolution: usize,
) -> Result<DiagnosticSeries> {
    if v_fixed.is_nan() || v_fixed.abs() > 1.0 {
        return Err(Error::Domain {
            value: v_fixed,
            lo: -1.0,
            hi: 1.0,
        });
    }
    if resolution < 2 {
        return Err(Error::Config("sweep resolution must be at least 2".into()));
    }
    let circuit = Circuit::new(*spec)?;
    let grid = ChebGrid::new(spec.n_qubits)?;
    let kind = match quantity {
        SweepQuantity::Purity => SeriesKind::PurityVsZ,
        SweepQuantity::MutualInformation => SeriesKind::MutualinfoVsZ,
    };
    let mut s = DiagnosticSeries::new(kind);
    describe(&mut s, params, spec);
    s.meta("v_fixed", v_fixed);
    s.meta("dense_rows", resolution);
    s.meta("node_rows", grid.nodes().len());
    s.meta("half_node_rows", grid.half_nodes().len());

    let dense = (0..resolution).map(|i| -1.0 + 2.0 * i as f64 / (resolution - 1) as f64);
    let zs: Vec<f64> = dense
        .chain(grid.nodes().iter().copied())
        .chain(grid.half_nodes().iter().copied())
        .collect();
    for z in zs {
        let state = circuit.training_state(z, v_fixed, params, true)?;
        let rho = state.partial_trace(&spec.z_qubits())?;
        let y = match quantity {
            SweepQuantity::Purity => rho.purity(),
            SweepQuantity::MutualInformation => 2.0 * rho.von_neumann_entropy(),
        };
        s.push(z, y);
    }
    Ok(s)
}
