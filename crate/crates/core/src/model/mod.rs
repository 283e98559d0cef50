//! The explicit bivariate model: a zero-projection amplitude of
//! `(V(theta) (x) V(vartheta)) . C . (tau(u) (x) tau(v))`, squared, scaled
//! and shifted.
//!
//! The Z register occupies qubits `0..N` and the Q register `N..2N`.

mod adam;
mod objective;
mod train;

pub use adam::{Adam, AdamConfig};
pub use objective::{gradient, mse_loss, r_squared, Objective};
pub use train::{train, BranchOutcome, BranchStatus, Init, TrainConfig, TrainRecord};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cheb::{basis_weight, chebyshev_series, FeatureVector};
use crate::error::{Error, Result};
use crate::sim::{correlation_circuit, AnsatzSpec, Entangler, StateVector};

/// Circuit architecture shared by training, sampling and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub use_correlation: bool,
    pub entangler: Entangler,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            n_qubits: 4,
            depth: 3,
            use_correlation: true,
            entangler: Entangler::Closed,
        }
    }
}

impl ModelSpec {
    pub fn ansatz(&self) -> AnsatzSpec {
        AnsatzSpec::new(self.n_qubits, self.depth, self.entangler)
    }

    pub fn angles_per_register(&self) -> usize {
        self.n_qubits * (self.depth + 1)
    }

    /// `2 N (d + 1) + 2`.
    pub fn trainable_count(&self) -> usize {
        2 * self.angles_per_register() + 2
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::cheb::MAX_QUBITS).contains(&self.n_qubits) {
            return Err(Error::Size {
                got: self.n_qubits,
                min: 1,
                max: crate::cheb::MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn z_qubits(&self) -> Vec<usize> {
        (0..self.n_qubits).collect()
    }

    pub fn q_qubits(&self) -> Vec<usize> {
        (self.n_qubits..2 * self.n_qubits).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcpmParams {
    pub theta: Vec<f64>,
    pub vartheta: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl QcpmParams {
    pub fn zeros(spec: &ModelSpec) -> Self {
        let n = spec.angles_per_register();
        Self {
            theta: vec![0.0; n],
            vartheta: vec![0.0; n],
            alpha: 1.0,
            beta: 0.0,
        }
    }

    /// Angles uniform in `[-pi, pi]`, `alpha = 1`, `beta = 0`.
    pub fn random<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Self {
        use std::f64::consts::PI;
        let n = spec.angles_per_register();
        let mut draw = || {
            (0..n)
                .map(|_| rng.random_range(-PI..=PI))
                .collect::<Vec<_>>()
        };
        let theta = draw();
        let vartheta = draw();
        Self {
            theta,
            vartheta,
            alpha: 1.0,
            beta: 0.0,
        }
    }

    pub fn check(&self, spec: &ModelSpec) -> Result<()> {
        let n = spec.angles_per_register();
        for len in [self.theta.len(), self.vartheta.len()] {
            if len != n {
                return Err(Error::ParameterCount {
                    expected: n,
                    got: len,
                });
            }
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("alpha and beta must be finite".into()));
        }
        Ok(())
    }

    /// Flat layout `[theta.., vartheta.., alpha, beta]` used by the optimizer.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.theta.len() * 2 + 2);
        v.extend_from_slice(&self.theta);
        v.extend_from_slice(&self.vartheta);
        v.push(self.alpha);
        v.push(self.beta);
        v
    }

    pub fn from_flat(spec: &ModelSpec, flat: &[f64]) -> Result<Self> {
        let n = spec.angles_per_register();
        if flat.len() != 2 * n + 2 {
            return Err(Error::ParameterCount {
                expected: 2 * n + 2,
                got: flat.len(),
            });
        }
        Ok(Self {
            theta: flat[..n].to_vec(),
            vartheta: flat[n..2 * n].to_vec(),
            alpha: flat[2 * n],
            beta: flat[2 * n + 1],
        })
    }
}

/// `M_{kl}`: the coefficient of `|k>_Z |l>_Q` in the zero-projection row of
/// the circuit. Row index `k` is the Z-register degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    n_qubits: usize,
    entries: Vec<f64>,
}

impl CoefficientMatrix {
    pub fn new(n_qubits: usize, entries: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch(entries.len(), dim * dim));
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.dim() + l]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// The expansion coefficients `c_{kl} = w_k w_l M_{kl}` of
    /// `A(u, v) = sum c_{kl} T_k(u) T_l(v)`.
    pub fn chebyshev_coefficients(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = self.entries.clone();
        for k in 0..d {
            for l in 0..d {
                out[k * d + l] *= basis_weight(k, self.n_qubits) * basis_weight(l, self.n_qubits);
            }
        }
        out
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let d = self.dim();
        let m = DMatrix::from_row_slice(d, d, &self.entries);
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Numerical rank: singular values above `tol` times the largest.
    pub fn rank(&self, tol: f64) -> usize {
        let s = self.singular_values();
        let top = s.first().copied().unwrap_or(0.0);
        s.iter().filter(|&&x| x > tol * top).count()
    }

    /// `tau(u)^T M tau(v)` from precomputed weighted feature amplitudes.
    pub(crate) fn bilinear(&self, fu: &[f64], fv: &[f64]) -> f64 {
        let d = self.dim();
        fu.iter()
            .enumerate()
            .map(|(k, a)| {
                let row = &self.entries[k * d..(k + 1) * d];
                a * row.iter().zip(fv).map(|(m, b)| m * b).sum::<f64>()
            })
            .sum()
    }
}

fn check_point(u: f64, v: f64) -> Result<()> {
    for x in [u, v] {
        if x.is_nan() || x.abs() > 1.0 {
            return Err(Error::Domain {
                value: x,
                lo: -1.0,
                hi: 1.0,
            });
        }
    }
    Ok(())
}

/// Reusable circuit for one [`ModelSpec`].
#[derive(Debug, Clone)]
pub struct Circuit {
    spec: ModelSpec,
    ansatz: AnsatzSpec,
    z: Vec<usize>,
    q: Vec<usize>,
}

impl Circuit {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            ansatz: spec.ansatz(),
            z: spec.z_qubits(),
            q: spec.q_qubits(),
            spec,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// `(V(theta) (x) V(vartheta)) . C . |input>` on `2N` qubits.
    fn forward(&self, mut state: StateVector, params: &QcpmParams) -> StateVector {
        if self.spec.use_correlation {
            correlation_circuit(&mut state, &self.z, &self.q, false).expect("register layout");
        }
        self.ansatz
            .apply_unchecked(&mut state, 0, &params.theta, false);
        self.ansatz
            .apply_unchecked(&mut state, self.spec.n_qubits, &params.vartheta, false);
        state
    }

    /// Training-stage state for inputs `(u, v)`. With `normalize`, the
    /// feature vectors are scaled to unit norm first.
    pub fn training_state(
        &self,
        u: f64,
        v: f64,
        params: &QcpmParams,
        normalize: bool,
    ) -> Result<StateVector> {
        check_point(u, v)?;
        params.check(&self.spec)?;
        let n = self.spec.n_qubits;
        let (fu, fv) = (FeatureVector::build(u, n), FeatureVector::build(v, n));
        let input = if normalize {
            StateVector::product(&fu.normalized(), &fv.normalized())?
        } else {
            StateVector::product(fu.amplitudes(), fv.amplitudes())?
        };
        Ok(self.forward(input, params))
    }

    /// The amplitude `A(u, v)` by direct simulation.
    pub fn amplitude(&self, u: f64, v: f64, params: &QcpmParams) -> Result<f64> {
        Ok(self
            .training_state(u, v, params, false)?
            .overlap_with_zero()
            .re)
    }

    pub fn value(&self, u: f64, v: f64, params: &QcpmParams) -> Result<f64> {
        let a = self.amplitude(u, v, params)?;
        Ok(params.alpha * a * a + params.beta)
    }

    /// `C^dagger (V^dagger(theta) (x) V^dagger(vartheta)) |0...0>`.
    ///
    /// The ansätze act on disjoint registers, so each is simulated on its own
    /// `N` qubits and the product is then passed through `C^dagger`.
    pub fn coefficient_state(&self, params: &QcpmParams) -> Result<StateVector> {
        params.check(&self.spec)?;
        Ok(self.coefficient_state_unchecked(&params.theta, &params.vartheta))
    }

    pub(crate) fn register_row(&self, angles: &[f64]) -> Vec<f64> {
        let mut s = StateVector::zero(self.spec.n_qubits);
        self.ansatz.apply_unchecked(&mut s, 0, angles, true);
        s.amplitudes().iter().map(|a| a.re).collect()
    }

    pub(crate) fn entangle_rows(&self, z_row: &[f64], q_row: &[f64]) -> StateVector {
        let mut state = StateVector::product(z_row, q_row).expect("power-of-two registers");
        if self.spec.use_correlation {
            correlation_circuit(&mut state, &self.z, &self.q, true).expect("register layout");
        }
        state
    }

    pub(crate) fn coefficient_state_unchecked(
        &self,
        theta: &[f64],
        vartheta: &[f64],
    ) -> StateVector {
        self.entangle_rows(&self.register_row(theta), &self.register_row(vartheta))
    }

    pub fn coefficients(&self, params: &QcpmParams) -> Result<CoefficientMatrix> {
        let state = self.coefficient_state(params)?;
        CoefficientMatrix::new(
            self.spec.n_qubits,
            state.amplitudes().iter().map(|a| a.re).collect(),
        )
    }
}

/// `A(u, v)` for `params` under `spec`, by simulating the training circuit.
pub fn model_amplitude(u: f64, v: f64, params: &QcpmParams, spec: &ModelSpec) -> Result<f64> {
    Circuit::new(*spec)?.amplitude(u, v, params)
}

/// `alpha A(u, v)^2 + beta`.
pub fn model_value(u: f64, v: f64, params: &QcpmParams, spec: &ModelSpec) -> Result<f64> {
    Circuit::new(*spec)?.value(u, v, params)
}

pub fn extract_coefficients(params: &QcpmParams, spec: &ModelSpec) -> Result<CoefficientMatrix> {
    Circuit::new(*spec)?.coefficients(params)
}

/// Classical evaluation of `sum_{kl} w_k w_l M_{kl} T_k(u) T_l(v)`; no
/// circuit simulation involved.
pub fn oracle_eval(m: &CoefficientMatrix, u: f64, v: f64) -> Result<f64> {
    check_point(u, v)?;
    let d = m.dim();
    let n = m.n_qubits();
    let tu = chebyshev_series(d, u);
    let tv = chebyshev_series(d, v);
    let mut acc = 0.0;
    for k in 0..d {
        let wk = basis_weight(k, n) * tu[k];
        for l in 0..d {
            acc += wk * basis_weight(l, n) * tv[l] * m.get(k, l);
        }
    }
    Ok(acc)
}
