//! Dense statevector simulation for the gate set {R_Y, H, CNOT, CZ}, plus
//! reduced density matrices and entanglement measures.
//!
//! Qubit 0 is the most significant bit of a basis label.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut s = Self {
            n_qubits,
            amplitudes: vec![Complex64::new(0.0, 0.0); 1 << n_qubits],
        };
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Config(format!(
                "state length {len} is not a power of two"
            )));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// `|a> (x) |b>` with `a` on the leading qubits.
    pub fn product(a: &[f64], b: &[f64]) -> Result<Self> {
        let mut amps = Vec::with_capacity(a.len() * b.len());
        for &x in a {
            for &y in b {
                amps.push(Complex64::new(x * y, 0.0));
            }
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.ry_unchecked(qubit, angle);
        Ok(())
    }

    pub(crate) fn ry_unchecked(&mut self, qubit: usize, angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        let m = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | m];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | m] = a0 * s + a1 * c;
            }
        }
    }

    pub(crate) fn h_unchecked(&mut self, qubit: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | m];
                self.amplitudes[i] = (a0 + a1) * r;
                self.amplitudes[i | m] = (a0 - a1) * r;
            }
        }
    }

    pub(crate) fn cnot_unchecked(&mut self, control: usize, target: usize) {
        let (mc, mt) = (self.mask(control), self.mask(target));
        for i in 0..self.amplitudes.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amplitudes.swap(i, i | mt);
            }
        }
    }

    pub(crate) fn cz_unchecked(&mut self, a: usize, b: usize) {
        let m = self.mask(a) | self.mask(b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
    }

    pub fn apply_gate(&mut self, gate: Gate, qubits: &[usize]) -> Result<()> {
        let arity = gate.arity();
        if qubits.len() != arity || (arity == 2 && qubits[0] == qubits[1]) {
            return Err(Error::Arity {
                gate: gate.name(),
                expected: arity,
                got: qubits.to_vec(),
            });
        }
        for &q in qubits {
            self.check_qubit(q)?;
        }
        match gate {
            Gate::H => self.h_unchecked(qubits[0]),
            Gate::Cnot => self.cnot_unchecked(qubits[0], qubits[1]),
            Gate::Cz => self.cz_unchecked(qubits[0], qubits[1]),
        }
        Ok(())
    }

    /// Amplitude of the all-zeros basis state.
    pub fn overlap_with_zero(&self) -> Complex64 {
        self.amplitudes[0]
    }

    /// Reduced density matrix over `keep`; the first listed qubit is the
    /// most significant bit of the reduced basis.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<ReducedDensity> {
        if keep.is_empty() {
            return Err(Error::Empty("kept qubit list"));
        }
        for (i, &q) in keep.iter().enumerate() {
            self.check_qubit(q)?;
            if keep[..i].contains(&q) {
                return Err(Error::RegisterLayout(format!("qubit {q} listed twice")));
            }
        }
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dr = 1usize << rest.len();
        let keep_masks: Vec<usize> = keep.iter().map(|&q| self.mask(q)).collect();
        let rest_masks: Vec<usize> = rest.iter().map(|&q| self.mask(q)).collect();

        // psi[a, r] with a over kept bits, r over traced bits
        let mut psi = DMatrix::<Complex64>::zeros(dk, dr);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let a = pack_bits(i, &keep_masks);
            let r = pack_bits(i, &rest_masks);
            psi[(a, r)] = *amp;
        }
        let rho = &psi * psi.adjoint();
        Ok(ReducedDensity { matrix: rho })
    }
}

fn pack_bits(index: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0, |acc, &m| (acc << 1) | usize::from(index & m != 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    H,
    Cnot,
    Cz,
}

impl Gate {
    pub fn arity(self) -> usize {
        match self {
            Gate::H => 1,
            Gate::Cnot | Gate::Cz => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
        }
    }
}

/// Placement of the CNOT entanglers within each ansatz block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entangler {
    /// `CNOT(i, i+1)` for `i = 0..N-2`.
    Open,
    /// Open chain closed by `CNOT(N-1, 0)`: `N` gates per block.
    #[default]
    Closed,
}

impl fmt::Display for Entangler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entangler::Open => "open",
            Entangler::Closed => "closed",
        })
    }
}

impl FromStr for Entangler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" => Ok(Entangler::Open),
            "closed" => Ok(Entangler::Closed),
            other => Err(Error::Config(format!("unknown entangler `{other}`"))),
        }
    }
}

/// Hardware-efficient real-amplitude ansatz layout for one register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzSpec {
    n_qubits: usize,
    depth: usize,
    pairs: Vec<(usize, usize)>,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize, entangler: Entangler) -> Self {
        let mut pairs: Vec<(usize, usize)> = (0..n_qubits.saturating_sub(1))
            .map(|i| (i, i + 1))
            .collect();
        // a single qubit has nothing to close the chain with
        if entangler == Entangler::Closed && n_qubits > 1 {
            pairs.push((n_qubits - 1, 0));
        }
        Self {
            n_qubits,
            depth,
            pairs,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// CNOT `(control, target)` pairs applied in every block.
    pub fn entangler_pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn param_count(&self) -> usize {
        self.n_qubits * (self.depth + 1)
    }

    pub fn entangler_count(&self) -> usize {
        self.pairs.len() * self.depth
    }

    /// Applies the ansatz to the register whose first qubit is `offset`.
    /// Angle `b * N + q` drives qubit `q` in rotation layer `b`.
    pub fn apply(
        &self,
        state: &mut StateVector,
        offset: usize,
        params: &[f64],
        adjoint: bool,
    ) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::ParameterCount {
                expected: self.param_count(),
                got: params.len(),
            });
        }
        if offset + self.n_qubits > state.n_qubits() {
            return Err(Error::QubitIndex {
                index: offset + self.n_qubits - 1,
                n_qubits: state.n_qubits(),
            });
        }
        self.apply_unchecked(state, offset, params, adjoint);
        Ok(())
    }

    pub(crate) fn apply_unchecked(
        &self,
        state: &mut StateVector,
        offset: usize,
        params: &[f64],
        adjoint: bool,
    ) {
        let n = self.n_qubits;
        let rotations = |state: &mut StateVector, layer: usize, sign: f64| {
            for q in 0..n {
                state.ry_unchecked(offset + q, sign * params[layer * n + q]);
            }
        };
        if !adjoint {
            for layer in 0..self.depth {
                rotations(state, layer, 1.0);
                for &(c, t) in &self.pairs {
                    state.cnot_unchecked(offset + c, offset + t);
                }
            }
            rotations(state, self.depth, 1.0);
        } else {
            rotations(state, self.depth, -1.0);
            for layer in (0..self.depth).rev() {
                for &(c, t) in self.pairs.iter().rev() {
                    state.cnot_unchecked(offset + c, offset + t);
                }
                rotations(state, layer, -1.0);
            }
        }
    }
}

/// Applies the ansatz on qubits `0..N` of `state`.
pub fn hera(
    state: &mut StateVector,
    params: &[f64],
    spec: &AnsatzSpec,
    adjoint: bool,
) -> Result<()> {
    spec.apply(state, 0, params, adjoint)
}

/// H on every `z` qubit, then `CZ(z[i], q[i])`. The adjoint runs the same
/// gates in reverse order.
pub fn correlation_circuit(
    state: &mut StateVector,
    z_qubits: &[usize],
    q_qubits: &[usize],
    adjoint: bool,
) -> Result<()> {
    if z_qubits.len() != q_qubits.len() {
        return Err(Error::RegisterLayout(format!(
            "{} Z qubits vs {} Q qubits",
            z_qubits.len(),
            q_qubits.len()
        )));
    }
    for (i, q) in z_qubits.iter().chain(q_qubits).enumerate() {
        state.check_qubit(*q)?;
        if z_qubits.iter().chain(q_qubits).take(i).any(|p| p == q) {
            return Err(Error::RegisterLayout(format!("qubit {q} used twice")));
        }
    }
    if !adjoint {
        for &z in z_qubits {
            state.h_unchecked(z);
        }
        for (&z, &q) in z_qubits.iter().zip(q_qubits) {
            state.cz_unchecked(z, q);
        }
    } else {
        for (&z, &q) in z_qubits.iter().zip(q_qubits).rev() {
            state.cz_unchecked(z, q);
        }
        for &z in z_qubits.iter().rev() {
            state.h_unchecked(z);
        }
    }
    Ok(())
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    matrix: DMatrix<Complex64>,
}

impl ReducedDensity {
    /// Checks Hermiticity and unit trace.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Config("density matrix must be square".into()));
        }
        let dev = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::Unnormalized(tr));
        }
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(rho^2)`; for Hermitian `rho` this is the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    }

    /// Entropy in bits; eigenvalues below `1e-12` contribute nothing.
    pub fn von_neumann_entropy(&self) -> f64 {
        let s: f64 = self
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > EIGEN_FLOOR)
            .map(|l| -l * l.log2())
            .sum();
        s.max(0.0)
    }
}

pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<ReducedDensity> {
    state.partial_trace(keep)
}

pub fn purity(rho: &ReducedDensity) -> f64 {
    rho.purity()
}

pub fn von_neumann_entropy(rho: &ReducedDensity) -> f64 {
    rho.von_neumann_entropy()
}

/// `I(Z:Q) = 2 S(rho_Z)` for a pure global state.
pub fn mutual_information_pure(state: &StateVector, partition_z: &[usize]) -> Result<f64> {
    Ok(2.0 * state.partial_trace(partition_z)?.von_neumann_entropy())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_state(s: &StateVector, want: &[f64]) {
        for (a, b) in s.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!(a.re, *b, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    fn bell() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn ry_examples() {
        let mut s = StateVector::zero(1);
        s.apply_ry(0, 0.0).unwrap();
        assert_state(&s, &[1.0, 0.0]);

        let mut s = StateVector::zero(1);
        s.apply_ry(0, PI).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);

        let mut s = StateVector::zero(1);
        s.apply_ry(0, PI / 2.0).unwrap();
        assert_state(&s, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);

        assert!(matches!(s.apply_ry(1, 0.1), Err(Error::QubitIndex { .. })));
    }

    #[test]
    fn two_qubit_gates() {
        let mut s = StateVector::basis(2, 3);
        s.apply_gate(Gate::Cz, &[0, 1]).unwrap();
        assert_state(&s, &[0.0, 0.0, 0.0, -1.0]);

        // control in |0>, target in |1>
        let mut s = StateVector::basis(2, 1);
        s.apply_gate(Gate::Cnot, &[0, 1]).unwrap();
        assert_state(&s, &[0.0, 1.0, 0.0, 0.0]);

        let mut s = StateVector::basis(2, 2);
        s.apply_gate(Gate::Cnot, &[0, 1]).unwrap();
        assert_state(&s, &[0.0, 0.0, 0.0, 1.0]);

        assert!(matches!(
            s.apply_gate(Gate::Cz, &[1, 1]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            s.apply_gate(Gate::H, &[0, 1]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            s.apply_gate(Gate::Cnot, &[0, 2]),
            Err(Error::QubitIndex { .. })
        ));
    }

    #[test]
    fn hadamard_involution() {
        let mut s = StateVector::from_real(&[0.1, 0.7, -0.5, 0.5]).unwrap();
        let orig = s.clone();
        s.apply_gate(Gate::H, &[1]).unwrap();
        s.apply_gate(Gate::H, &[1]).unwrap();
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ansatz_counts() {
        let spec = AnsatzSpec::new(4, 3, Entangler::Closed);
        assert_eq!(spec.param_count(), 16);
        assert_eq!(spec.entangler_count(), 12);
        let open = AnsatzSpec::new(4, 3, Entangler::Open);
        assert_eq!(open.entangler_count(), 9);

        let mut s = StateVector::zero(4);
        assert!(matches!(
            hera(&mut s, &[0.0; 15], &spec, false),
            Err(Error::ParameterCount {
                expected: 16,
                got: 15
            })
        ));
        hera(&mut s, &[0.0; 16], &spec, false).unwrap();
        assert_abs_diff_eq!(s.overlap_with_zero().re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hera_adjoint_inverts() {
        let spec = AnsatzSpec::new(3, 2, Entangler::Closed);
        let params: Vec<f64> = (0..spec.param_count())
            .map(|i| (i as f64 * 1.3).sin() * 2.0)
            .collect();
        let mut s = StateVector::from_real(&[0.3, 0.1, -0.2, 0.4, 0.5, -0.1, 0.2, 0.6]).unwrap();
        let orig = s.clone();
        hera(&mut s, &params, &spec, false).unwrap();
        hera(&mut s, &params, &spec, true).unwrap();
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn correlation_on_zero_is_product() {
        let mut s = StateVector::zero(4);
        correlation_circuit(&mut s, &[0, 1], &[2, 3], false).unwrap();
        // uniform over Z, |00> on Q
        let mut want = [0.0; 16];
        for z in 0..4 {
            want[z * 4] = 0.5;
        }
        assert_state(&s, &want);
        let rho = s.partial_trace(&[0, 1]).unwrap();
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn correlation_errors() {
        let mut s = StateVector::zero(4);
        assert!(correlation_circuit(&mut s, &[0, 1], &[2], false).is_err());
        assert!(correlation_circuit(&mut s, &[0, 1], &[1, 2], false).is_err());
        assert!(correlation_circuit(&mut s, &[0], &[7], false).is_err());
    }

    #[test]
    fn correlation_matches_4x4_oracle() {
        // CZ . (H (x) I) written out by hand
        let r = FRAC_1_SQRT_2;
        let u = [
            [r, 0.0, r, 0.0],
            [0.0, r, 0.0, r],
            [r, 0.0, -r, 0.0],
            [0.0, -r, 0.0, r],
        ];
        for input in 0..4 {
            let mut s = StateVector::basis(2, input);
            correlation_circuit(&mut s, &[0], &[1], false).unwrap();
            let want: Vec<f64> = (0..4).map(|row| u[row][input]).collect();
            assert_state(&s, &want);
        }
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(StateVector::zero(3).overlap_with_zero(), c(1.0));
        assert_eq!(StateVector::basis(3, 4).overlap_with_zero(), c(0.0));
        let mut s = StateVector::zero(1);
        s.apply_gate(Gate::H, &[0]).unwrap();
        assert_abs_diff_eq!(s.overlap_with_zero().re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn reductions() {
        let prod = StateVector::product(&[0.6, 0.8], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let rho = partial_trace(&prod, &[0]).unwrap();
        assert_abs_diff_eq!(purity(&rho), 1.0, epsilon = 1e-12);

        let rho = partial_trace(&bell(), &[1]).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);

        let mut ghz = vec![0.0; 8];
        ghz[0] = FRAC_1_SQRT_2;
        ghz[7] = FRAC_1_SQRT_2;
        let ghz = StateVector::from_real(&ghz).unwrap();
        for q in 0..3 {
            let rho = partial_trace(&ghz, &[q]).unwrap();
            assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-12);
        }
        assert!(partial_trace(&ghz, &[]).is_err());
        assert!(partial_trace(&ghz, &[3]).is_err());
        assert!(partial_trace(&ghz, &[1, 1]).is_err());
    }

    #[test]
    fn purity_and_entropy_values() {
        let half = ReducedDensity::from_real_diagonal(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(purity(&half), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(von_neumann_entropy(&half), 1.0, epsilon = 1e-12);

        let d = ReducedDensity::from_real_diagonal(&[0.9, 0.1]).unwrap();
        assert_abs_diff_eq!(purity(&d), 0.82, epsilon = 1e-15);

        let d = ReducedDensity::from_real_diagonal(&[0.75, 0.25]).unwrap();
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_abs_diff_eq!(von_neumann_entropy(&d), h, epsilon = 1e-12);
        assert_abs_diff_eq!(
            von_neumann_entropy(&d),
            0.811_278_124_459_132_8,
            epsilon = 1e-12
        );

        let pure = ReducedDensity::from_real_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        assert_eq!(purity(&pure), 1.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(matches!(
            ReducedDensity::from_matrix(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let prod = StateVector::product(&[0.6, 0.8], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            mutual_information_pure(&prod, &[0]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            mutual_information_pure(&bell(), &[0]).unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }
}
