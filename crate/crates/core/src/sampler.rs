//! Generative sampling from a trained model on the native or extended
//! Chebyshev node lattice.
//!
//! Extension qubits are the most significant bits of each register, so a
//! zero-padded coefficient state keeps its degree labels and the fine-grid
//! inverse transform evaluates the same polynomial on `2^S` times more
//! nodes. Sampled probabilities are `|A|^2` on that lattice, without the
//! trained `alpha` and `beta`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::cheb::{ChebGrid, ChebTransform, DomainBox};
use crate::error::{Error, Result};
use crate::model::{Circuit, ModelSpec, QcpmParams};
use crate::sim::StateVector;

/// Upper bound on `N + S` per register for exact distributions.
pub const MAX_SAMPLING_QUBITS: usize = 10;

const NORMALIZATION_TOL: f64 = 1e-9;

pub fn coefficient_state(params: &QcpmParams, spec: &ModelSpec) -> Result<StateVector> {
    Circuit::new(*spec)?.coefficient_state(params)
}

/// Probabilities over the `2^{N+S} x 2^{N+S}` node lattice. Entry
/// `(j, j')` pairs Z node `j` with Q node `j'`; both index decreasing
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    n_qubits: usize,
    extension: usize,
    probs: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(n_qubits: usize, extension: usize, probs: Vec<f64>) -> Result<Self> {
        let side = 1usize << (n_qubits + extension);
        if probs.len() != side * side {
            return Err(Error::LengthMismatch(probs.len(), side * side));
        }
        Ok(Self {
            n_qubits,
            extension,
            probs,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn extension(&self) -> usize {
        self.extension
    }

    pub fn side(&self) -> usize {
        1 << (self.n_qubits + self.extension)
    }

    pub fn get(&self, j: usize, jp: usize) -> f64 {
        self.probs[j * self.side() + jp]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Fine Chebyshev nodes of one register.
    pub fn nodes(&self) -> Vec<f64> {
        ChebGrid::new(self.n_qubits + self.extension)
            .map(|g| g.nodes().to_vec())
            .unwrap_or_default()
    }

    pub fn marginal_z(&self) -> Vec<f64> {
        let s = self.side();
        (0..s)
            .map(|j| self.probs[j * s..(j + 1) * s].iter().sum())
            .collect()
    }

    pub fn marginal_q(&self) -> Vec<f64> {
        let s = self.side();
        (0..s)
            .map(|jp| (0..s).map(|j| self.probs[j * s + jp]).sum())
            .collect()
    }
}

/// Zero-pads the coefficient state to `N + S` qubits per register, applies
/// the fine inverse transform to each register and squares.
pub fn exact_distribution(
    params: &QcpmParams,
    spec: &ModelSpec,
    extension: usize,
) -> Result<ProbabilityTable> {
    let n = spec.n_qubits;
    if n + extension > MAX_SAMPLING_QUBITS {
        return Err(Error::Size {
            got: n + extension,
            min: 1,
            max: MAX_SAMPLING_QUBITS,
        });
    }
    let coeffs = Circuit::new(*spec)?.coefficients(params)?;
    let d = 1usize << n;
    let transform = ChebTransform::new(n + extension)?;
    let side = transform.dim();

    // Only the first 2^N degree columns are populated after padding.
    // tmp = D'[:, :d] . M   (side x d)
    let mut tmp = vec![0.0; side * d];
    for j in 0..side {
        let row = &transform.row(j)[..d];
        for (k, &a) in row.iter().enumerate() {
            for l in 0..d {
                tmp[j * d + l] += a * coeffs.get(k, l);
            }
        }
    }
    // amp = tmp . D'[:, :d]^T   (side x side)
    let mut probs = vec![0.0; side * side];
    for j in 0..side {
        let t = &tmp[j * d..(j + 1) * d];
        for jp in 0..side {
            let amp: f64 = t
                .iter()
                .zip(&transform.row(jp)[..d])
                .map(|(x, y)| x * y)
                .sum();
            probs[j * side + jp] = amp * amp;
        }
    }
    ProbabilityTable::new(n, extension, probs)
}

/// Shot counts over the node lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleHistogram {
    n_qubits: usize,
    extension: usize,
    counts: Vec<u64>,
    shots: u64,
}

impl SampleHistogram {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn extension(&self) -> usize {
        self.extension
    }

    pub fn side(&self) -> usize {
        1 << (self.n_qubits + self.extension)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, j: usize, jp: usize) -> u64 {
        self.counts[j * self.side() + jp]
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }

    /// Half the L1 distance between empirical frequencies and `dist`.
    pub fn total_variation(&self, dist: &ProbabilityTable) -> f64 {
        0.5 * self
            .frequencies()
            .iter()
            .zip(dist.probabilities())
            .map(|(f, p)| (f - p).abs())
            .sum::<f64>()
    }
}

/// Multinomial draw by sequential conditional binomials, in bin order.
pub fn draw_samples(dist: &ProbabilityTable, shots: u64, seed: u64) -> Result<SampleHistogram> {
    if shots == 0 {
        return Err(Error::Config("shot count must be at least 1".into()));
    }
    let total = dist.total();
    if !total.is_finite() || (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(total));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = dist.probabilities();
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let ratio = if mass_left > 0.0 {
            (p / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let c = if ratio >= 1.0 {
            remaining
        } else if ratio <= 0.0 {
            0
        } else {
            Binomial::new(remaining, ratio)
                .expect("ratio in (0, 1)")
                .sample(&mut rng)
        };
        counts[i] = c;
        remaining -= c;
        mass_left -= p;
    }
    Ok(SampleHistogram {
        n_qubits: dist.n_qubits(),
        extension: dist.extension(),
        counts,
        shots,
    })
}

/// One lattice point in problem coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRow {
    pub z: f64,
    pub q: f64,
    pub count: u64,
    pub probability: f64,
}

fn lattice_rows(
    n_qubits: usize,
    extension: usize,
    b: &DomainBox,
    mut cell: impl FnMut(usize, usize) -> (u64, f64),
) -> Result<Vec<HistogramRow>> {
    let nodes = ChebGrid::new(n_qubits + extension)?.nodes().to_vec();
    let zs = nodes
        .iter()
        .map(|&u| b.from_unit_x(u))
        .collect::<Result<Vec<_>>>()?;
    let qs = nodes
        .iter()
        .map(|&v| b.from_unit_y(v))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(nodes.len() * nodes.len());
    for (j, &z) in zs.iter().enumerate() {
        for (jp, &q) in qs.iter().enumerate() {
            let (count, probability) = cell(j, jp);
            rows.push(HistogramRow {
                z,
                q,
                count,
                probability,
            });
        }
    }
    rows.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.q.total_cmp(&b.q)));
    Ok(rows)
}

/// Maps every lattice cell to problem coordinates, sorted ascending in
/// `(z, Q)`; `probability = count / shots`.
pub fn to_problem_domain(hist: &SampleHistogram, b: &DomainBox) -> Result<Vec<HistogramRow>> {
    let shots = hist.shots() as f64;
    lattice_rows(hist.n_qubits(), hist.extension(), b, |j, jp| {
        let c = hist.count(j, jp);
        (c, c as f64 / shots)
    })
}

/// Exact probabilities in the same row layout, with zero counts.
pub fn exact_rows(dist: &ProbabilityTable, b: &DomainBox) -> Result<Vec<HistogramRow>> {
    lattice_rows(dist.n_qubits(), dist.extension(), b, |j, jp| {
        (0, dist.get(j, jp))
    })
}
