//! Chebyshev polynomials, node lattices, feature vectors and the cosine
//! realization of the quantum Chebyshev transform.
//!
//! Index `j` on a node grid runs over *decreasing* `x`: `nodes[0]` is the
//! node closest to `+1`. Everything downstream that builds histograms or
//! emits data has to account for this.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest per-variable register the dense simulation accepts.
pub const MAX_QUBITS: usize = 12;

/// Mapped coordinates within this distance outside `[-1, 1]` are clamped
/// rather than rejected (float round-off at box edges).
const EDGE_SLACK: f64 = 1e-12;

fn check_unit(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(Error::Domain {
            value: x,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(())
}

fn check_qubits(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::Size {
            got: n,
            min: 1,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// `T_k(x)` by the three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(chebyshev_t_unchecked(k, x))
}

pub(crate) fn chebyshev_t_unchecked(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T_0(x), ..., T_{m-1}(x)` in one pass.
pub(crate) fn chebyshev_series(m: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    out.push(1.0);
    if m > 1 {
        out.push(x);
    }
    for k in 2..m {
        out.push(2.0 * x * out[k - 1] - out[k - 2]);
    }
    out
}

/// Amplitude weight of degree `k` in an `n_qubits` feature vector:
/// `2^{-N/2}` for `k = 0`, `2^{-(N-1)/2}` otherwise.
pub fn basis_weight(k: usize, n_qubits: usize) -> f64 {
    let n = n_qubits as f64;
    if k == 0 {
        2f64.powf(-n / 2.0)
    } else {
        2f64.powf(-(n - 1.0) / 2.0)
    }
}

/// Chebyshev nodes and the interleaving half-index points for one register.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    n_qubits: usize,
    nodes: Vec<f64>,
    half_nodes: Vec<f64>,
}

impl ChebGrid {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self::build(n_qubits))
    }

    fn build(n_qubits: usize) -> Self {
        let m = 1usize << n_qubits;
        let mf = m as f64;
        let nodes = (0..m).map(|j| (PI * (j as f64 + 0.5) / mf).cos()).collect();
        let half_nodes = (0..m - 1)
            .map(|i| (PI * (i as f64 + 1.0) / mf).cos())
            .collect();
        Self {
            n_qubits,
            nodes,
            half_nodes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn half_nodes(&self) -> &[f64] {
        &self.half_nodes
    }

    /// The bivariate training lattice: every node pair followed by every
    /// half-node pair, `4^N + (2^N - 1)^2` points in all.
    pub fn training_lattice(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.nodes.len().pow(2) + self.half_nodes.len().pow(2));
        for &u in &self.nodes {
            for &v in &self.nodes {
                pts.push((u, v));
            }
        }
        for &u in &self.half_nodes {
            for &v in &self.half_nodes {
                pts.push((u, v));
            }
        }
        pts
    }
}

/// Convenience wrapper for [`ChebGrid::new`].
pub fn make_grid(n_qubits: usize) -> Result<ChebGrid> {
    ChebGrid::new(n_qubits)
}

/// Unnormalized Chebyshev feature state `|tau(x)>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    x: f64,
    amplitudes: Vec<f64>,
}

impl FeatureVector {
    pub fn new(x: f64, n_qubits: usize) -> Result<Self> {
        check_unit(x)?;
        check_qubits(n_qubits)?;
        Ok(Self::build(x, n_qubits))
    }

    pub(crate) fn build(x: f64, n_qubits: usize) -> Self {
        let m = 1usize << n_qubits;
        let mut amplitudes = chebyshev_series(m, x);
        let w0 = basis_weight(0, n_qubits);
        let w = basis_weight(1, n_qubits);
        amplitudes[0] *= w0;
        for a in amplitudes.iter_mut().skip(1) {
            *a *= w;
        }
        Self { x, amplitudes }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    /// Unit-norm copy of the amplitudes.
    pub fn normalized(&self) -> Vec<f64> {
        let n = self.norm_squared().sqrt();
        self.amplitudes.iter().map(|a| a / n).collect()
    }
}

pub fn feature_vector(x: f64, n_qubits: usize) -> Result<FeatureVector> {
    FeatureVector::new(x, n_qubits)
}

/// Orthogonal cosine-transform matrix between Chebyshev-degree amplitudes
/// and node amplitudes. Row `j` is a node, column `k` a degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebTransform {
    n_qubits: usize,
    dim: usize,
    /// Row-major `dim x dim`.
    matrix: Vec<f64>,
}

impl ChebTransform {
    pub fn new(n_qubits_total: usize) -> Result<Self> {
        check_qubits(n_qubits_total)?;
        let dim = 1usize << n_qubits_total;
        let mf = dim as f64;
        let eta0 = mf.powf(-0.5);
        let eta = (2.0 / mf).sqrt();
        let mut matrix = vec![0.0; dim * dim];
        // cosine form rather than the recurrence: no error growth with degree
        for j in 0..dim {
            for k in 0..dim {
                let w = if k == 0 { eta0 } else { eta };
                matrix[j * dim + k] = w * (k as f64 * PI * (j as f64 + 0.5) / mf).cos();
            }
        }
        Ok(Self {
            n_qubits: n_qubits_total,
            dim,
            matrix,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, node: usize, degree: usize) -> f64 {
        self.matrix[node * self.dim + degree]
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.matrix[node * self.dim..(node + 1) * self.dim]
    }

    /// Degree amplitudes -> node amplitudes (the inverse transform used for
    /// sampling). Evaluates the weighted Chebyshev series at every node.
    pub fn to_nodes(&self, coefficients: &[f64]) -> Vec<f64> {
        assert_eq!(coefficients.len(), self.dim);
        (0..self.dim)
            .map(|j| {
                self.row(j)
                    .iter()
                    .zip(coefficients)
                    .map(|(a, c)| a * c)
                    .sum()
            })
            .collect()
    }

    /// Node amplitudes -> degree amplitudes.
    pub fn to_coefficients(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (j, &v) in values.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(j)) {
                *o += a * v;
            }
        }
        out
    }

    /// Largest elementwise deviation of `D D^T` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let dot: f64 = self
                    .row(a)
                    .iter()
                    .zip(self.row(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn cheb_transform(n_qubits_total: usize) -> Result<ChebTransform> {
    ChebTransform::new(n_qubits_total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisTransform {
    #[default]
    Linear,
    Log10,
}

impl AxisTransform {
    fn forward(self, x: f64) -> Result<f64> {
        match self {
            AxisTransform::Linear => Ok(x),
            AxisTransform::Log10 if x > 0.0 => Ok(x.log10()),
            AxisTransform::Log10 => Err(Error::LogOfNonPositive(x)),
        }
    }

    fn inverse(self, t: f64) -> f64 {
        match self {
            AxisTransform::Linear => t,
            AxisTransform::Log10 => 10f64.powf(t),
        }
    }
}

impl fmt::Display for AxisTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisTransform::Linear => "linear",
            AxisTransform::Log10 => "log10",
        })
    }
}

impl FromStr for AxisTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linear" => Ok(AxisTransform::Linear),
            "log10" => Ok(AxisTransform::Log10),
            other => Err(Error::Config(format!("unknown axis transform `{other}`"))),
        }
    }
}

/// Axis-aligned problem domain `[x_lo, x_hi] x [y_lo, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub x_axis: AxisTransform,
    pub y_axis: AxisTransform,
}

impl DomainBox {
    pub fn new(
        x: (f64, f64),
        y: (f64, f64),
        x_axis: AxisTransform,
        y_axis: AxisTransform,
    ) -> Result<Self> {
        let b = Self {
            x_lo: x.0,
            x_hi: x.1,
            y_lo: y.0,
            y_hi: y.1,
            x_axis,
            y_axis,
        };
        b.validate()?;
        Ok(b)
    }

    /// `z in [0.01, 1]` (linear) by `Q in [1, 10^4]` GeV (log10).
    pub fn fragmentation() -> Self {
        Self {
            x_lo: 0.01,
            x_hi: 1.0,
            y_lo: 1.0,
            y_hi: 1e4,
            x_axis: AxisTransform::Linear,
            y_axis: AxisTransform::Log10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (lo, hi, axis, name) in [
            (self.x_lo, self.x_hi, self.x_axis, "x"),
            (self.y_lo, self.y_hi, self.y_axis, "y"),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBox(format!(
                    "{name} bounds [{lo}, {hi}] must be finite and increasing"
                )));
            }
            if axis == AxisTransform::Log10 && lo <= 0.0 {
                return Err(Error::InvalidBox(format!(
                    "{name} axis is log10 but lower bound {lo} is not positive"
                )));
            }
        }
        Ok(())
    }

    fn axis_to_unit(value: f64, lo: f64, hi: f64, axis: AxisTransform) -> Result<f64> {
        let (t, a, b) = (axis.forward(value)?, axis.forward(lo)?, axis.forward(hi)?);
        let u = (2.0 * t - (a + b)) / (b - a);
        if u.is_nan() || u.abs() > 1.0 + EDGE_SLACK {
            return Err(Error::Domain { value, lo, hi });
        }
        Ok(u.clamp(-1.0, 1.0))
    }

    fn axis_from_unit(u: f64, lo: f64, hi: f64, axis: AxisTransform) -> Result<f64> {
        check_unit(u)?;
        if u == -1.0 {
            return Ok(lo);
        }
        if u == 1.0 {
            return Ok(hi);
        }
        let a = axis.forward(lo)?;
        let b = axis.forward(hi)?;
        let t = ((b - a) * u + (a + b)) / 2.0;
        Ok(axis.inverse(t).clamp(lo, hi))
    }

    pub fn to_unit_x(&self, x: f64) -> Result<f64> {
        Self::axis_to_unit(x, self.x_lo, self.x_hi, self.x_axis)
    }

    pub fn to_unit_y(&self, y: f64) -> Result<f64> {
        Self::axis_to_unit(y, self.y_lo, self.y_hi, self.y_axis)
    }

    pub fn from_unit_x(&self, u: f64) -> Result<f64> {
        Self::axis_from_unit(u, self.x_lo, self.x_hi, self.x_axis)
    }

    pub fn from_unit_y(&self, v: f64) -> Result<f64> {
        Self::axis_from_unit(v, self.y_lo, self.y_hi, self.y_axis)
    }
}

/// Problem coordinates -> `[-1, 1]^2`.
pub fn to_chebyshev_domain(point: (f64, f64), b: &DomainBox) -> Result<(f64, f64)> {
    Ok((b.to_unit_x(point.0)?, b.to_unit_y(point.1)?))
}

/// `[-1, 1]^2` -> problem coordinates.
pub fn from_chebyshev_domain(point: (f64, f64), b: &DomainBox) -> Result<(f64, f64)> {
    Ok((b.from_unit_x(point.0)?, b.from_unit_y(point.1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn t_small_degrees() {
        assert_eq!(chebyshev_t(0, 0.7).unwrap(), 1.0);
        assert_eq!(chebyshev_t(1, -0.3).unwrap(), -0.3);
        assert_abs_diff_eq!(chebyshev_t(3, 0.5).unwrap(), -1.0, epsilon = 1e-15);
        assert!(matches!(chebyshev_t(2, 1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn grid_n1() {
        let g = make_grid(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(g.nodes()[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(g.nodes()[1], -h, epsilon = 1e-15);
        assert_eq!(g.half_nodes().len(), 1);
        assert_abs_diff_eq!(g.half_nodes()[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn grid_n4_lattice_count() {
        let g = make_grid(4).unwrap();
        assert_eq!(g.nodes().len(), 16);
        assert_eq!(g.half_nodes().len(), 15);
        assert_eq!(g.training_lattice().len(), 481);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(make_grid(0).is_err());
        assert!(make_grid(13).is_err());
    }

    #[test]
    fn grid_interleaving() {
        for n in 1..=8 {
            let g = make_grid(n).unwrap();
            let (nodes, half) = (g.nodes(), g.half_nodes());
            for w in nodes.windows(2) {
                assert!(w[0] > w[1]);
            }
            for (i, &h) in half.iter().enumerate() {
                assert!(nodes[i] > h && h > nodes[i + 1]);
            }
            assert!(nodes.iter().chain(half).all(|x| x.abs() < 1.0));
        }
    }

    #[test]
    fn feature_vector_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = feature_vector(h, 1).unwrap();
        assert_abs_diff_eq!(f.amplitudes()[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(f.amplitudes()[1], h, epsilon = 1e-15);
        assert_abs_diff_eq!(f.norm_squared(), 1.0, epsilon = 1e-15);

        let f = feature_vector(1.0, 1).unwrap();
        assert_abs_diff_eq!(f.amplitudes()[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.norm_squared(), 1.5, epsilon = 1e-15);

        let f = feature_vector(0.0, 2).unwrap();
        let want = [0.5, 0.0, -h, 0.0];
        for (a, b) in f.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert!(feature_vector(-1.01, 2).is_err());
    }

    #[test]
    fn transform_2x2() {
        let d = cheb_transform(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [[h, h], [h, -h]];
        for j in 0..2 {
            for k in 0..2 {
                assert_abs_diff_eq!(d.entry(j, k), want[j][k], epsilon = 1e-15);
            }
        }
        assert!(d.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn transform_round_trip() {
        let d = cheb_transform(3).unwrap();
        let c: Vec<f64> = (0..8).map(|k| (k as f64 * 0.37).sin()).collect();
        let back = d.to_coefficients(&d.to_nodes(&c));
        for (a, b) in c.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn domain_maps() {
        let b = DomainBox::fragmentation();
        assert_abs_diff_eq!(b.to_unit_x(0.505).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(b.to_unit_x(1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(b.to_unit_y(100.0).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(b.from_unit_x(-1.0).unwrap(), 0.01);
        assert_abs_diff_eq!(b.from_unit_y(1.0).unwrap(), 1e4, epsilon = 1e-9);

        assert!(matches!(b.to_unit_x(1.2), Err(Error::Domain { .. })));
        assert!(matches!(b.from_unit_y(1.5), Err(Error::Domain { .. })));

        let neg = DomainBox {
            y_lo: -1.0,
            ..DomainBox::fragmentation()
        };
        assert!(neg.validate().is_err());
        assert!(matches!(b.to_unit_y(-3.0), Err(Error::LogOfNonPositive(_))));
        assert!(DomainBox::new(
            (1.0, 0.5),
            (1.0, 2.0),
            AxisTransform::Linear,
            AxisTransform::Linear
        )
        .is_err());
    }

    #[test]
    fn axis_transform_parse() {
        assert_eq!(
            "log10".parse::<AxisTransform>().unwrap(),
            AxisTransform::Log10
        );
        assert_eq!(AxisTransform::Linear.to_string(), "linear");
        assert!("ln".parse::<AxisTransform>().is_err());
    }
}
