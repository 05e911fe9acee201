use super::gate::GateOp;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Ordered gate list over a fixed register, plus the qubits read out at the end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, ops: Vec::new(), measured: Vec::new() }
    }

    pub fn from_ops(num_qubits: usize, ops: Vec<GateOp>) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    /// Appends without validation; callers guarantee the op is in range.
    pub(crate) fn push_unchecked(&mut self, op: GateOp) {
        self.ops.push(op);
    }

    pub fn measure(&mut self, qubits: &[usize]) -> Result<&mut Self> {
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
            if self.measured.contains(&q) {
                return Err(Error::DuplicateTargets(qubits.to_vec()));
            }
            self.measured.push(q);
        }
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        self.ops.extend(other.ops.iter().cloned());
        self.measure(&other.measured)?;
        Ok(())
    }

    /// Qubits touched by any op or measurement, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_qubits];
        for op in &self.ops {
            for q in op.targets() {
                seen[q] = true;
            }
        }
        for &q in &self.measured {
            seen[q] = true;
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(q, _)| q).collect()
    }

    /// Drops idle qubits. Returns the compact circuit and, for each compact
    /// qubit, its index in the original register.
    pub fn compact(&self) -> (Circuit, Vec<usize>) {
        let active = self.active_qubits();
        let mut lookup = vec![usize::MAX; self.num_qubits];
        for (new, &old) in active.iter().enumerate() {
            lookup[old] = new;
        }
        let ops = self.ops.iter().map(|op| op.remap(|q| lookup[q])).collect();
        let measured = self.measured.iter().map(|&q| lookup[q]).collect();
        (Circuit { num_qubits: active.len().max(1), ops, measured }, active)
    }
}

/// Applies every op of `circuit` to `initial` in order.
pub fn run_circuit(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits() != initial.num_qubits() {
        return Err(Error::DimensionMismatch { expected: circuit.num_qubits(), actual: initial.num_qubits() });
    }
    let mut state = initial.clone();
    for op in circuit.ops() {
        state.apply_mut(op)?;
    }
    Ok(state)
}
