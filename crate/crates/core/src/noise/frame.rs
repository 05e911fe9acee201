//! Pauli-frame tracking. Every gate in [`GateOp`] is Clifford and every
//! noise event is a Pauli, so a noisy run ends in `P U|0...0>` for a single
//! Pauli `P` (up to phase) pushed through the remaining gates.

use crate::error::{Error, Result};
use crate::linalg::Pauli;
use crate::qsim::{Circuit, GateOp};

/// Largest register a frame can describe.
pub const MAX_FRAME_QUBITS: usize = 64;

/// `X^x Z^z` with bit `q` of each mask acting on qubit `q`; phases dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliFrame {
    pub x: u64,
    pub z: u64,
}

impl PauliFrame {
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn multiply(&mut self, terms: &[(usize, Pauli)]) {
        for &(q, p) in terms {
            let bit = 1u64 << q;
            match p {
                Pauli::I => {}
                Pauli::X => self.x ^= bit,
                Pauli::Z => self.z ^= bit,
                Pauli::Y => {
                    self.x ^= bit;
                    self.z ^= bit;
                }
            }
        }
    }

    /// Replaces the frame `P` by `U P U^dagger` for the gate `U`.
    pub fn conjugate(&mut self, gate: &GateOp) {
        let bit = |q: usize| 1u64 << q;
        let has = |mask: u64, q: usize| mask >> q & 1 == 1;
        match *gate {
            GateOp::X(_) | GateOp::Y(_) | GateOp::Z(_) => {}
            GateOp::H(q) => {
                if has(self.x, q) != has(self.z, q) {
                    self.x ^= bit(q);
                    self.z ^= bit(q);
                }
            }
            GateOp::S(q) | GateOp::Sdg(q) => {
                if has(self.x, q) {
                    self.z ^= bit(q);
                }
            }
            GateOp::Cz(a, b) => {
                if has(self.x, a) {
                    self.z ^= bit(b);
                }
                if has(self.x, b) {
                    self.z ^= bit(a);
                }
            }
            GateOp::Cnot { control, target } => {
                if has(self.x, control) {
                    self.x ^= bit(target);
                }
                if has(self.z, target) {
                    self.z ^= bit(control);
                }
            }
            GateOp::PauliError(_) => {}
        }
    }

    /// Frame accumulated by the error ops of a noisy circuit.
    pub fn of_circuit(noisy: &Circuit) -> Result<Self> {
        if noisy.num_qubits() > MAX_FRAME_QUBITS {
            return Err(Error::TooManyQubits { qubits: noisy.num_qubits(), cap: MAX_FRAME_QUBITS });
        }
        let mut frame = PauliFrame::default();
        for op in noisy.ops() {
            match op {
                GateOp::PauliError(terms) => frame.multiply(terms),
                gate => frame.conjugate(gate),
            }
        }
        Ok(frame)
    }
}
