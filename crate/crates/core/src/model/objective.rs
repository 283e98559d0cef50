//! Mean-squared-error objective over a fixed set of `(u, v)` points.
//!
//! The amplitude at every point is read off the coefficient matrix `M`
//! (`A = tau(u)^T M tau(v)`), so one adjoint simulation per parameter
//! vector serves the whole grid. Angle derivatives use the two-term shift
//! rule on the register amplitudes:
//! `da/dtheta = (a(theta + pi/2) - a(theta - pi/2)) / (2 sqrt 2)`,
//! which is exact because each amplitude is `c cos(theta/2) + s sin(theta/2)`.
//! `M` is linear in each register's amplitude vector, so the shifted
//! difference is pushed through the correlation layer once per angle.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use crate::cheb::FeatureVector;
use crate::error::{Error, Result};

use super::{Circuit, CoefficientMatrix, ModelSpec, QcpmParams};

#[derive(Debug, Clone)]
pub struct Objective {
    circuit: Circuit,
    fu: Vec<Vec<f64>>,
    fv: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

/// Loss, gradient and per-point amplitudes at one parameter vector.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub loss: f64,
    pub gradient: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl Objective {
    pub fn new(spec: ModelSpec, points: &[(f64, f64)], targets: &[f64]) -> Result<Self> {
        if points.len() != targets.len() {
            return Err(Error::LengthMismatch(points.len(), targets.len()));
        }
        if points.is_empty() {
            return Err(Error::Empty("training points"));
        }
        let circuit = Circuit::new(spec)?;
        let n = spec.n_qubits;
        let mut fu = Vec::with_capacity(points.len());
        let mut fv = Vec::with_capacity(points.len());
        for &(u, v) in points {
            fu.push(FeatureVector::new(u, n)?.into_amplitudes());
            fv.push(FeatureVector::new(v, n)?.into_amplitudes());
        }
        Ok(Self {
            circuit,
            fu,
            fv,
            targets: targets.to_vec(),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        self.circuit.spec()
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn amplitudes(&self, params: &QcpmParams) -> Result<Vec<f64>> {
        let m = self.circuit.coefficients(params)?;
        Ok(self.amplitudes_from(&m))
    }

    fn amplitudes_from(&self, m: &CoefficientMatrix) -> Vec<f64> {
        self.fu
            .iter()
            .zip(&self.fv)
            .map(|(a, b)| m.bilinear(a, b))
            .collect()
    }

    pub fn predictions(&self, params: &QcpmParams) -> Result<Vec<f64>> {
        Ok(self
            .amplitudes(params)?
            .into_iter()
            .map(|a| params.alpha * a * a + params.beta)
            .collect())
    }

    pub fn loss(&self, params: &QcpmParams) -> Result<f64> {
        let pred = self.predictions(params)?;
        Ok(mean_sq_diff(&pred, &self.targets))
    }

    pub fn r_squared(&self, params: &QcpmParams) -> Result<f64> {
        r_squared(&self.predictions(params)?, &self.targets)
    }

    pub fn evaluate(&self, params: &QcpmParams) -> Result<Evaluation> {
        params.check(self.spec())?;
        let spec = *self.spec();
        let dim = spec.dim();
        let n_pts = self.len() as f64;

        let z_row = self.circuit.register_row(&params.theta);
        let q_row = self.circuit.register_row(&params.vartheta);
        let m = state_to_matrix(&spec, &self.circuit.entangle_rows(&z_row, &q_row));
        let amps = self.amplitudes_from(&m);

        // dL/dM accumulated over the grid
        let mut dl_dm = vec![0.0; dim * dim];
        let mut loss = 0.0;
        let (mut g_alpha, mut g_beta) = (0.0, 0.0);
        for (p, &a) in amps.iter().enumerate() {
            let resid = params.alpha * a * a + params.beta - self.targets[p];
            loss += resid * resid;
            g_alpha += 2.0 * resid * a * a;
            g_beta += 2.0 * resid;
            let coef = 4.0 * resid * params.alpha * a / n_pts;
            let (fu, fv) = (&self.fu[p], &self.fv[p]);
            for (k, &x) in fu.iter().enumerate() {
                let s = coef * x;
                for (d, &y) in dl_dm[k * dim..(k + 1) * dim].iter_mut().zip(fv) {
                    *d += s * y;
                }
            }
        }

        let n_angles = spec.angles_per_register();
        let mut grad = Vec::with_capacity(2 * n_angles + 2);
        for i in 0..n_angles {
            let d_row = self.shifted_row_derivative(&params.theta, i);
            let dm = self.circuit.entangle_rows(&d_row, &q_row);
            grad.push(contract(&dl_dm, &dm));
        }
        for i in 0..n_angles {
            let d_row = self.shifted_row_derivative(&params.vartheta, i);
            let dm = self.circuit.entangle_rows(&z_row, &d_row);
            grad.push(contract(&dl_dm, &dm));
        }
        grad.push(g_alpha / n_pts);
        grad.push(g_beta / n_pts);

        Ok(Evaluation {
            loss: loss / n_pts,
            gradient: grad,
            amplitudes: amps,
        })
    }

    fn shifted_row_derivative(&self, angles: &[f64], i: usize) -> Vec<f64> {
        let mut shifted = angles.to_vec();
        shifted[i] = angles[i] + FRAC_PI_2;
        let plus = self.circuit.register_row(&shifted);
        shifted[i] = angles[i] - FRAC_PI_2;
        let minus = self.circuit.register_row(&shifted);
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * SQRT_2))
            .collect()
    }
}

fn state_to_matrix(spec: &ModelSpec, state: &crate::sim::StateVector) -> CoefficientMatrix {
    CoefficientMatrix::new(
        spec.n_qubits,
        state.amplitudes().iter().map(|a| a.re).collect(),
    )
    .expect("2N-qubit state")
}

fn contract(dl_dm: &[f64], dm: &crate::sim::StateVector) -> f64 {
    dl_dm
        .iter()
        .zip(dm.amplitudes())
        .map(|(g, a)| g * a.re)
        .sum()
}

fn mean_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Mean over points of `(alpha A^2 + beta - target)^2`.
pub fn mse_loss(
    params: &QcpmParams,
    spec: &ModelSpec,
    points: &[(f64, f64)],
    targets: &[f64],
) -> Result<f64> {
    Objective::new(*spec, points, targets)?.loss(params)
}

/// Gradient over `[theta.., vartheta.., alpha, beta]`.
pub fn gradient(
    params: &QcpmParams,
    spec: &ModelSpec,
    points: &[(f64, f64)],
    targets: &[f64],
) -> Result<Vec<f64>> {
    Ok(Objective::new(*spec, points, targets)?
        .evaluate(params)?
        .gradient)
}

/// `1 - SS_res / SS_tot`.
pub fn r_squared(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch(predictions.len(), targets.len()));
    }
    if targets.len() < 2 {
        return Err(Error::Empty("R^2 needs at least two points"));
    }
    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let ss_res: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (t - p) * (t - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}
