use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::GateOp;
use crate::error::{Error, Result};
use crate::linalg::{Pauli, I, ONE, ZERO};

const NORM_TOLERANCE: f64 = 1e-10;

/// Pure n-qubit state. Amplitude index bit `q` is qubit `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0>
    pub fn zero(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "a register needs at least one qubit");
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Self { num_qubits, amplitudes }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut s = Self::zero(num_qubits);
        s.amplitudes[0] = ZERO;
        s.amplitudes[index] = ONE;
        s
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), actual: len });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("state norm {norm} is not 1")));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    /// Scales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::EmptyInput);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns the state after `gate`.
    pub fn apply_gate(&self, gate: &GateOp) -> Result<StateVector> {
        let mut next = self.clone();
        next.apply_mut(gate)?;
        Ok(next)
    }

    pub fn apply_mut(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.num_qubits)?;
        apply_to_slice(&mut self.amplitudes, gate);
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Expectation of a Pauli product given as `(qubit, pauli)` terms.
    pub fn pauli_expectation(&self, terms: &[(usize, Pauli)]) -> Result<f64> {
        let mut image = self.clone();
        image.apply_mut(&GateOp::PauliError(terms.to_vec()))?;
        Ok(self.inner(&image).re)
    }
}

/// Applies a validated gate in place to a little-endian amplitude slice.
pub(crate) fn apply_to_slice(amps: &mut [Complex64], gate: &GateOp) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        GateOp::H(q) => for_pairs(amps, q, |a, b| {
            let (x, y) = (*a, *b);
            *a = (x + y) * h;
            *b = (x - y) * h;
        }),
        GateOp::X(q) => for_pairs(amps, q, std::mem::swap),
        GateOp::Y(q) => for_pairs(amps, q, |a, b| {
            let (x, y) = (*a, *b);
            *a = -I * y;
            *b = I * x;
        }),
        GateOp::Z(q) => for_ones(amps, 1 << q, |a| *a = -*a),
        GateOp::S(q) => for_ones(amps, 1 << q, |a| *a *= I),
        GateOp::Sdg(q) => for_ones(amps, 1 << q, |a| *a *= -I),
        GateOp::Cz(a, b) => for_ones(amps, (1 << a) | (1 << b), |x| *x = -*x),
        GateOp::Cnot { control, target } => {
            let c = 1 << control;
            let t = 1 << target;
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        GateOp::PauliError(ref terms) => {
            for &(q, p) in terms {
                match p {
                    Pauli::I => {}
                    Pauli::X => apply_to_slice(amps, &GateOp::X(q)),
                    Pauli::Y => apply_to_slice(amps, &GateOp::Y(q)),
                    Pauli::Z => apply_to_slice(amps, &GateOp::Z(q)),
                }
            }
        }
    }
}

/// Visits every amplitude pair differing only in bit `q` (low, high).
#[inline]
fn for_pairs(amps: &mut [Complex64], q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
    let stride = 1 << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a, b);
        }
    }
}

/// Visits every amplitude whose index has all bits of `mask` set.
#[inline]
fn for_ones(amps: &mut [Complex64], mask: usize, mut f: impl FnMut(&mut Complex64)) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            f(a);
        }
    }
}
