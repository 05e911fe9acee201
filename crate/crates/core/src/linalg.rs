//! Dense complex matrix helpers shared by the density-matrix code paths.
//!
//! All matrices use the little-endian qubit convention: bit `i` of a row or
//! column index is the state of qubit `i` of the (sub)register.

use nalgebra::{DMatrix, SymmetricEigen};
pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Matrix element `<row|P|col>` for single-qubit basis states.
    #[inline]
    pub fn element(self, row: usize, col: usize) -> Complex64 {
        match (self, row, col) {
            (Pauli::I, r, c) if r == c => ONE,
            (Pauli::X, r, c) if r != c => ONE,
            (Pauli::Y, 0, 1) => -I,
            (Pauli::Y, 1, 0) => I,
            (Pauli::Z, 0, 0) => ONE,
            (Pauli::Z, 1, 1) => -ONE,
            _ => ZERO,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Dense matrix of a Pauli string; `paulis[i]` acts on qubit `i`.
pub fn pauli_string_matrix(paulis: &[Pauli]) -> CMatrix {
    let dim = 1usize << paulis.len();
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        // every Pauli string is a signed permutation: one nonzero per column
        let mut row = col;
        let mut phase = ONE;
        for (q, p) in paulis.iter().enumerate() {
            let bit = (col >> q) & 1;
            let flipped = match p {
                Pauli::X | Pauli::Y => bit ^ 1,
                _ => bit,
            };
            row = (row & !(1 << q)) | (flipped << q);
            phase *= p.element(flipped, bit);
        }
        m[(row, col)] = phase;
    }
    m
}

/// `Tr(P rho)` for a Pauli string, without forming the Pauli matrix.
pub fn pauli_expectation(rho: &CMatrix, paulis: &[Pauli]) -> f64 {
    let dim = rho.nrows();
    let mut acc = ZERO;
    for col in 0..dim {
        let mut row = col;
        let mut phase = ONE;
        for (q, p) in paulis.iter().enumerate() {
            let bit = (col >> q) & 1;
            let flipped = match p {
                Pauli::X | Pauli::Y => bit ^ 1,
                _ => bit,
            };
            row = (row & !(1 << q)) | (flipped << q);
            phase *= p.element(flipped, bit);
        }
        // Tr(P rho) = sum_col P[row, col] rho[col, row]
        acc += phase * rho[(col, row)];
    }
    acc.re
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mapped = nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(f(v), 0.0)),
    );
    &vectors * CMatrix::from_diagonal(&mapped) * vectors.adjoint()
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Kronecker product with `low` on the least-significant qubits.
pub fn kron_le(high: &CMatrix, low: &CMatrix) -> CMatrix {
    high.kronecker(low)
}

pub fn outer(psi: &[Complex64]) -> CMatrix {
    let n = psi.len();
    CMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj())
}
