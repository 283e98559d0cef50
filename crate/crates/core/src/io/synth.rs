//! Synthetic targets on the training lattice.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cheb::DomainBox;
use crate::error::{Error, Result};
use crate::model::{Circuit, ModelSpec, QcpmParams};

use super::{tabulate, TargetGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// A randomly parameterized model with `alpha = 1`, `beta = 0`.
    TeacherStudent,
    /// Correlated bivariate Gaussian in Chebyshev coordinates.
    Gaussian2d,
    /// `z^a (1 - z)^b` times a decaying profile in `Q`.
    SeparableBeta,
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::TeacherStudent => "teacher_student",
            SynthKind::Gaussian2d => "gaussian_2d",
            SynthKind::SeparableBeta => "separable_beta",
        })
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "teacher_student" => Ok(SynthKind::TeacherStudent),
            "gaussian_2d" => Ok(SynthKind::Gaussian2d),
            "separable_beta" => Ok(SynthKind::SeparableBeta),
            other => Err(Error::Config(format!("unknown synthetic target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Architecture of the teacher; `n_qubits` also sets the lattice.
    pub model: ModelSpec,
    pub domain: DomainBox,
    /// Gaussian correlation coefficient in `(-1, 1)`.
    pub rho: f64,
    pub sigma: f64,
    pub center: (f64, f64),
    /// Exponents of `z^a (1 - z)^b`.
    pub beta_exponents: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            domain: DomainBox::fragmentation(),
            rho: 0.6,
            sigma: 0.45,
            center: (-0.2, 0.1),
            beta_exponents: (-0.5, 3.0),
        }
    }
}

pub(crate) fn teacher_params(spec: &ModelSpec, seed: u64) -> QcpmParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    QcpmParams::random(spec, &mut rng)
}

pub fn synth_target(kind: SynthKind, config: &SynthConfig, seed: u64) -> Result<TargetGrid> {
    let b = config.domain;
    let n = config.model.n_qubits;
    let rows = match kind {
        SynthKind::TeacherStudent => {
            let circuit = Circuit::new(config.model)?;
            let teacher = teacher_params(&config.model, seed);
            tabulate(&b, n, |u, v| {
                let a = circuit.amplitude(u, v, &teacher)?;
                Ok(a * a)
            })?
        }
        SynthKind::Gaussian2d => {
            let rho = config.rho;
            if !(rho > -1.0 && rho < 1.0) || config.sigma <= 0.0 {
                return Err(Error::Config("need |rho| < 1 and sigma > 0".into()));
            }
            let s2 = config.sigma * config.sigma;
            let (cu, cv) = config.center;
            tabulate(&b, n, |u, v| {
                let (du, dv) = (u - cu, v - cv);
                let q = (du * du - 2.0 * rho * du * dv + dv * dv) / (1.0 - rho * rho);
                Ok((-q / (2.0 * s2)).exp())
            })?
        }
        SynthKind::SeparableBeta => {
            let (a, bexp) = config.beta_exponents;
            tabulate(&b, n, |u, v| {
                let z = b.from_unit_x(u)?;
                let zf = z.powf(a) * (1.0 - z).max(0.0).powf(bexp);
                Ok(zf * (-0.4 * (v + 1.0)).exp())
            })?
        }
    };
    TargetGrid::from_raw(kind.to_string(), b, n, rows)
}
