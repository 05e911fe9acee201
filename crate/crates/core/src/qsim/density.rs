use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::GateOp;
use super::state::{apply_to_slice, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Pauli, ONE, ZERO};
use crate::noise::NoiseModel;

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Default qubit cap for exact density-matrix evolution (memory grows as 4^n).
pub const EXACT_QUBIT_CAP: usize = 6;

const SPECTRAL_FLOOR: f64 = 1e-13;

/// Hermitian, unit-trace, positive semidefinite operator on `num_qubits`
/// qubits, little-endian like [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dm = Self::from_matrix_unchecked(matrix)?;
        dm.validate()?;
        Ok(dm)
    }

    /// Checks the shape only. Used on hot paths whose construction already
    /// guarantees the remaining invariants.
    pub fn from_matrix_unchecked(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: dim.next_power_of_two().max(2), actual: matrix.ncols() });
        }
        Ok(Self { num_qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = linalg::hermiticity_error(&self.matrix);
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = linalg::trace(&self.matrix);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self { num_qubits: state.num_qubits(), matrix: linalg::outer(state.amplitudes()) }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self { num_qubits, matrix: CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0) }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(linalg::trace_distance(&self.matrix, &other.matrix))
    }

    pub fn pauli_expectation(&self, paulis: &[Pauli]) -> Result<f64> {
        if paulis.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: paulis.len() });
        }
        Ok(linalg::pauli_expectation(&self.matrix, paulis))
    }

    /// Partial trace keeping `keep`; qubit `keep[i]` becomes qubit `i`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_selection(keep, self.num_qubits)?;
        let n = self.num_qubits;
        let env: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dk = 1 << keep.len();
        let mut out = CMatrix::zeros(dk, dk);
        for e in 0..(1usize << env.len()) {
            let base = scatter(e, &env);
            for r in 0..dk {
                let row = base | scatter(r, keep);
                for c in 0..dk {
                    let col = base | scatter(c, keep);
                    out[(r, c)] += self.matrix[(row, col)];
                }
            }
        }
        Ok(DensityMatrix { num_qubits: keep.len(), matrix: out })
    }

    pub(crate) fn check_same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(())
    }
}

pub(crate) fn check_selection(qubits: &[usize], num_qubits: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::EmptySelection);
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange { index: q, num_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateTargets(qubits.to_vec()));
        }
    }
    Ok(())
}

/// Places bit `i` of `value` at qubit position `positions[i]`.
#[inline]
pub(crate) fn scatter(value: usize, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |acc, (i, &p)| acc | (((value >> i) & 1) << p))
}

/// Inverse of [`scatter`].
#[inline]
pub(crate) fn gather(index: usize, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |acc, (i, &p)| acc | (((index >> p) & 1) << i))
}

/// Partial trace of a pure state over every qubit not in `keep`.
pub fn reduced_density_matrix(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let m = projected_reduction(state, keep, &[])?;
    Ok(DensityMatrix { num_qubits: keep.len(), matrix: m })
}

/// Unnormalised `Tr_env[(P0 ⊗ 1)|ψ><ψ|(P0 ⊗ 1)]`, where `P0` projects every
/// qubit in `zeroed` onto |0> and `env` is everything outside `keep`.
/// The trace of the result is the probability of the all-zero branch.
pub fn projected_reduction(state: &StateVector, keep: &[usize], zeroed: &[usize]) -> Result<CMatrix> {
    let n = state.num_qubits();
    check_selection(keep, n)?;
    for &z in zeroed {
        if z >= n {
            return Err(Error::QubitOutOfRange { index: z, num_qubits: n });
        }
        if keep.contains(&z) {
            return Err(Error::DuplicateTargets(vec![z]));
        }
    }
    let zero_mask = zeroed.iter().fold(0usize, |m, &q| m | (1 << q));
    let env: Vec<usize> = (0..n).filter(|q| !keep.contains(q) && !zeroed.contains(q)).collect();
    let dk = 1 << keep.len();
    let de = 1 << env.len();

    // rows[r][e] = amplitude with kept bits r and environment bits e
    let mut rows = vec![vec![ZERO; de]; dk];
    for (i, &a) in state.amplitudes().iter().enumerate() {
        if i & zero_mask != 0 {
            continue;
        }
        rows[gather(i, keep)][gather(i, &env)] = a;
    }
    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..=r {
            let v: Complex64 = rows[r].iter().zip(&rows[c]).map(|(x, y)| x * y.conj()).sum();
            out[(r, c)] = v;
            out[(c, r)] = v.conj();
        }
    }
    Ok(out)
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(a) b sqrt(a)))^2`, clamped to [0, 1].
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    // eigenvalues at round-off level would otherwise leak ~1e-8 through sqrt
    let clip = |v: f64| if v < SPECTRAL_FLOOR { 0.0 } else { v.sqrt() };
    let root = linalg::hermitian_map(&a.matrix, clip);
    let inner = &root * &b.matrix * &root;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let s: f64 = linalg::hermitian_eigenvalues(&inner).into_iter().map(clip).sum();
    Ok((s * s).clamp(0.0, 1.0))
}

/// Conjugates `m` by the unitary of `gate`: `U m U†`.
pub(crate) fn conjugate(m: &mut CMatrix, gate: &GateOp) {
    let dim = m.nrows();
    for col in m.as_mut_slice().chunks_exact_mut(dim) {
        apply_to_slice(col, gate);
    }
    m.adjoint_mut();
    for col in m.as_mut_slice().chunks_exact_mut(dim) {
        apply_to_slice(col, gate);
    }
    m.adjoint_mut();
}

/// Depolarizing channel on `qubits` with non-identity Pauli probability `p`:
/// `(1 - p) rho + p / (4^k - 1) * sum_{P != I} P rho P`.
pub(crate) fn depolarize(m: &CMatrix, qubits: &[usize], p: f64) -> CMatrix {
    if p == 0.0 {
        return m.clone();
    }
    let paulis = non_identity_paulis(qubits.len());
    let weight = Complex64::new(p / paulis.len() as f64, 0.0);
    let mut out = m * Complex64::new(1.0 - p, 0.0);
    for letters in paulis {
        let mut term = m.clone();
        let terms = qubits.iter().copied().zip(letters).collect();
        conjugate(&mut term, &GateOp::PauliError(terms));
        out += term * weight;
    }
    out
}

/// Every non-identity Pauli string on `k` qubits, letter `i` for qubit `i`,
/// in lexicographic order of (I, X, Y, Z) with qubit 0 most significant.
pub fn non_identity_paulis(k: usize) -> Vec<Vec<Pauli>> {
    let mut all = vec![vec![]];
    for _ in 0..k {
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<Pauli>| {
                Pauli::ALL.iter().map(move |&p| {
                    let mut v = prefix.clone();
                    v.push(p);
                    v
                })
            })
            .collect();
    }
    all.into_iter().filter(|v| v.iter().any(|&p| p != Pauli::I)).collect()
}

/// Exact density-matrix evolution from |0...0> with each gate followed by
/// its depolarizing channel. Capped at [`EXACT_QUBIT_CAP`] qubits.
pub fn exact_density_evolution(circuit: &Circuit, model: &NoiseModel) -> Result<DensityMatrix> {
    exact_density_evolution_capped(circuit, model, EXACT_QUBIT_CAP)
}

pub fn exact_density_evolution_capped(circuit: &Circuit, model: &NoiseModel, cap: usize) -> Result<DensityMatrix> {
    let n = circuit.num_qubits();
    if n > cap {
        return Err(Error::TooManyQubits { qubits: n, cap });
    }
    let dim = 1 << n;
    let mut rho = CMatrix::zeros(dim, dim);
    rho[(0, 0)] = ONE;
    for op in circuit.ops() {
        conjugate(&mut rho, op);
        if op.is_error() {
            continue;
        }
        let targets = op.targets();
        let p = match targets.as_slice() {
            [q] => model.p1(*q),
            [a, b] => model.p2(*a, *b),
            _ => 0.0,
        };
        rho = depolarize(&rho, &targets, p);
    }
    Ok(DensityMatrix { num_qubits: n, matrix: rho })
}
