use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Pauli;

/// One operation of a circuit. Qubit 0 is the least significant bit of the
/// amplitude index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateOp {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    /// Concrete Pauli error, one `(qubit, pauli)` term per affected qubit.
    /// Identity terms are allowed and act trivially.
    PauliError(Vec<(usize, Pauli)>),
}

impl GateOp {
    pub fn targets(&self) -> Vec<usize> {
        match self {
            GateOp::H(q) | GateOp::X(q) | GateOp::Y(q) | GateOp::Z(q) | GateOp::S(q) | GateOp::Sdg(q) => {
                vec![*q]
            }
            GateOp::Cz(a, b) => vec![*a, *b],
            GateOp::Cnot { control, target } => vec![*control, *target],
            GateOp::PauliError(terms) => terms.iter().map(|(q, _)| *q).collect(),
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, GateOp::PauliError(_))
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let targets = self.targets();
        for &q in &targets {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits });
            }
        }
        for (i, a) in targets.iter().enumerate() {
            if targets[i + 1..].contains(a) {
                return Err(Error::DuplicateTargets(targets));
            }
        }
        Ok(())
    }

    /// The inverse gate. Every gate in the set is self-inverse except S.
    pub fn inverse(&self) -> GateOp {
        match self {
            GateOp::S(q) => GateOp::Sdg(*q),
            GateOp::Sdg(q) => GateOp::S(*q),
            other => other.clone(),
        }
    }

    /// Relabels qubits through `map` (old index -> new index).
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> GateOp {
        match self {
            GateOp::H(q) => GateOp::H(map(*q)),
            GateOp::X(q) => GateOp::X(map(*q)),
            GateOp::Y(q) => GateOp::Y(map(*q)),
            GateOp::Z(q) => GateOp::Z(map(*q)),
            GateOp::S(q) => GateOp::S(map(*q)),
            GateOp::Sdg(q) => GateOp::Sdg(map(*q)),
            GateOp::Cz(a, b) => GateOp::Cz(map(*a), map(*b)),
            GateOp::Cnot { control, target } => GateOp::Cnot { control: map(*control), target: map(*target) },
            GateOp::PauliError(terms) => GateOp::PauliError(terms.iter().map(|(q, p)| (map(*q), *p)).collect()),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::H(q) => write!(f, "H({q})"),
            GateOp::X(q) => write!(f, "X({q})"),
            GateOp::Y(q) => write!(f, "Y({q})"),
            GateOp::Z(q) => write!(f, "Z({q})"),
            GateOp::S(q) => write!(f, "S({q})"),
            GateOp::Sdg(q) => write!(f, "Sdg({q})"),
            GateOp::Cz(a, b) => write!(f, "CZ({a},{b})"),
            GateOp::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            GateOp::PauliError(terms) => {
                write!(f, "E[")?;
                for (q, p) in terms {
                    write!(f, "{}{q}", p.letter())?;
                }
                write!(f, "]")
            }
        }
    }
}
