//! Quantum-trajectory sampling of the depolarizing model: every noise
//! channel becomes a concrete Pauli insertion, and channel averages are
//! means over independently seeded trajectories.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::frame::{PauliFrame, MAX_FRAME_QUBITS};
use super::NoiseModel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Pauli};
use crate::qsim::{non_identity_paulis, projected_reduction, run_circuit, Circuit, DensityMatrix, GateOp, StateVector};
use crate::rng::{self, SimRng};

/// Trajectories per work chunk. Chunks are summed in index order, so the
/// result does not depend on the thread count.
const CHUNK: usize = 64;

/// One noisy realisation of `circuit`: after each 1-qubit gate on `q` a
/// uniformly random X/Y/Z is inserted with probability `p1[q]`; after each
/// 2-qubit gate one of the 15 non-identity Pauli pairs with probability `p2`.
pub fn sample_noisy_circuit(circuit: &Circuit, model: &NoiseModel, rng_seed: u64) -> Circuit {
    sample_noisy_circuit_with(circuit, model, &mut rng::seeded(rng_seed))
}

pub(crate) fn sample_noisy_circuit_with(circuit: &Circuit, model: &NoiseModel, rng: &mut SimRng) -> Circuit {
    let mut out = Circuit::new(circuit.num_qubits());
    NoiseSchedule::new(circuit, model).sample(rng, |event| match event {
        Event::Gate(op) => out.push_unchecked(op.clone()),
        Event::Error(terms) => out.push_unchecked(GateOp::PauliError(terms.to_vec())),
    });
    // measurement list carries over unchanged
    let _ = out.measure(circuit.measured_qubits());
    out
}

/// Pauli frame of one trajectory; consumes `rng` exactly as
/// [`sample_noisy_circuit`] does.
pub fn sample_frame(schedule: &NoiseSchedule<'_>, rng: &mut SimRng) -> PauliFrame {
    let mut frame = PauliFrame::default();
    schedule.sample(rng, |event| match event {
        Event::Gate(op) => frame.conjugate(op),
        Event::Error(terms) => frame.multiply(terms),
    });
    frame
}

enum Event<'e> {
    Gate(&'e GateOp),
    Error(&'e [(usize, Pauli)]),
}

/// Insertion probability after every op of a circuit.
#[derive(Debug, Clone)]
pub struct NoiseSchedule<'a> {
    circuit: &'a Circuit,
    probs: Vec<f64>,
    pairs: Vec<[Pauli; 2]>,
}

impl<'a> NoiseSchedule<'a> {
    pub fn new(circuit: &'a Circuit, model: &NoiseModel) -> Self {
        let probs = circuit
            .ops()
            .iter()
            .map(|op| {
                if op.is_error() {
                    return 0.0;
                }
                match *op.targets().as_slice() {
                    [q] => model.p1(q),
                    [a, b] => model.p2(a, b),
                    _ => 0.0,
                }
            })
            .collect();
        let pairs = non_identity_paulis(2).into_iter().map(|v| [v[0], v[1]]).collect();
        Self { circuit, probs, pairs }
    }

    pub fn is_noiseless(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0)
    }

    /// Walks the circuit, reporting every op and every sampled insertion
    /// right after the op it follows.
    fn sample(&self, rng: &mut SimRng, mut visit: impl FnMut(Event<'_>)) {
        for (op, &p) in self.circuit.ops().iter().zip(&self.probs) {
            visit(Event::Gate(op));
            if p > 0.0 && rng.random::<f64>() < p {
                match *op.targets().as_slice() {
                    [q] => visit(Event::Error(&[(q, Pauli::NON_IDENTITY[rng.random_range(0..3)])])),
                    [a, b] => {
                        let [pa, pb] = self.pairs[rng.random_range(0..15)];
                        visit(Event::Error(&[(a, pa), (b, pb)]));
                    }
                    _ => {}
                }
            }
        }
    }
}

/// A subsystem to extract from each trajectory: keep `keep`, project every
/// qubit of `zeroed` onto |0> (unnormalised), trace out the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub keep: Vec<usize>,
    pub zeroed: Vec<usize>,
}

impl Probe {
    pub fn keep(keep: &[usize]) -> Self {
        Self { keep: keep.to_vec(), zeroed: Vec::new() }
    }
}

/// Trajectory means of several (possibly projected) reductions computed from
/// the same trajectories. Matrices are unnormalised when `zeroed` is
/// non-empty: their trace is the mean branch probability.
///
/// Each trajectory is reduced to its Pauli frame `P`; the ideal state is
/// simulated once and every distinct frame conjugates the ideal reductions.
/// Trajectory `t` draws from stream `t` of `rng_seed`, the same noise as
/// [`average_probes_statevector`].
pub fn average_probes(
    circuit: &Circuit,
    model: &NoiseModel,
    probes: &[Probe],
    trajectories: usize,
    rng_seed: u64,
) -> Result<Vec<CMatrix>> {
    if trajectories == 0 {
        return Err(Error::InvalidConfig("trajectories must be at least 1".into()));
    }
    if circuit.num_qubits() > MAX_FRAME_QUBITS {
        return average_probes_statevector(circuit, model, probes, trajectories, rng_seed);
    }
    let ideal = run_circuit(circuit, &StateVector::zero(circuit.num_qubits()))?;
    for probe in probes {
        projected_reduction(&ideal, &probe.keep, &probe.zeroed)?;
    }

    let chunks: Vec<(usize, usize)> =
        (0..trajectories).step_by(CHUNK * 16).map(|start| (start, (start + CHUNK * 16).min(trajectories))).collect();
    let partials: Vec<BTreeMap<PauliFrame, u64>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let schedule = NoiseSchedule::new(circuit, model);
            let mut tally = BTreeMap::new();
            for t in start..end {
                *tally.entry(sample_frame(&schedule, &mut rng::stream(rng_seed, t as u64))).or_insert(0u64) += 1;
            }
            tally
        })
        .collect();
    let mut tally: BTreeMap<PauliFrame, u64> = BTreeMap::new();
    for partial in partials {
        for (frame, n) in partial {
            *tally.entry(frame).or_insert(0) += n;
        }
    }

    let scale = 1.0 / trajectories as f64;
    probes
        .iter()
        .map(|probe| {
            let dim = 1 << probe.keep.len();
            // ideal reductions keyed by which zeroed qubits the frame flips
            let mut branches: HashMap<usize, CMatrix> = HashMap::new();
            let mut sum = CMatrix::zeros(dim, dim);
            for (frame, &count) in &tally {
                let flips = gather_mask(frame.x, &probe.zeroed);
                if let std::collections::hash_map::Entry::Vacant(e) = branches.entry(flips) {
                    let mut flipped = ideal.clone();
                    for (i, &q) in probe.zeroed.iter().enumerate() {
                        if flips >> i & 1 == 1 {
                            flipped.apply_mut(&GateOp::X(q))?;
                        }
                    }
                    e.insert(projected_reduction(&flipped, &probe.keep, &probe.zeroed)?);
                }
                let base = &branches[&flips];
                let x = gather_mask(frame.x, &probe.keep);
                let z = gather_mask(frame.z, &probe.keep);
                let weight = count as f64 * scale;
                for r in 0..dim {
                    let sr = parity((r ^ x) & z);
                    for c in 0..dim {
                        let sign = if sr == parity((c ^ x) & z) { weight } else { -weight };
                        sum[(r, c)] += base[(r ^ x, c ^ x)] * sign;
                    }
                }
            }
            Ok(sum)
        })
        .collect()
}

fn gather_mask(mask: u64, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((mask >> q & 1) as usize) << i)
}

fn parity(v: usize) -> bool {
    v.count_ones() % 2 == 1
}

/// [`average_probes`] by direct statevector simulation of every trajectory.
pub fn average_probes_statevector(
    circuit: &Circuit,
    model: &NoiseModel,
    probes: &[Probe],
    trajectories: usize,
    rng_seed: u64,
) -> Result<Vec<CMatrix>> {
    if trajectories == 0 {
        return Err(Error::InvalidConfig("trajectories must be at least 1".into()));
    }
    let initial = StateVector::zero(circuit.num_qubits());
    // validate probes once, up front
    for probe in probes {
        projected_reduction(&initial, &probe.keep, &probe.zeroed)?;
    }
    let zero_sums = || probes.iter().map(|p| CMatrix::zeros(1 << p.keep.len(), 1 << p.keep.len())).collect::<Vec<_>>();

    let chunks: Vec<(usize, usize)> =
        (0..trajectories).step_by(CHUNK).map(|start| (start, (start + CHUNK).min(trajectories))).collect();
    let partials: Vec<Result<Vec<CMatrix>>> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut sums = zero_sums();
            // identical noisy circuits give identical reductions
            let mut memo: HashMap<Vec<GateOp>, Vec<CMatrix>> = HashMap::new();
            for t in start..end {
                let noisy = sample_noisy_circuit_with(circuit, model, &mut rng::stream(rng_seed, t as u64));
                let key = noisy.ops().to_vec();
                if !memo.contains_key(&key) {
                    let state = run_circuit(&noisy, &initial)?;
                    let mats = probes
                        .iter()
                        .map(|p| projected_reduction(&state, &p.keep, &p.zeroed))
                        .collect::<Result<Vec<_>>>()?;
                    memo.insert(key.clone(), mats);
                }
                for (s, m) in sums.iter_mut().zip(&memo[&key]) {
                    *s += m;
                }
            }
            Ok(sums)
        })
        .collect();

    let mut totals = zero_sums();
    for partial in partials {
        for (t, p) in totals.iter_mut().zip(partial?) {
            *t += p;
        }
    }
    let scale = Complex64::new(1.0 / trajectories as f64, 0.0);
    Ok(totals.into_iter().map(|m| m * scale).collect())
}

/// Mean over trajectories of the reduced state on `keep`.
pub fn average_reduced_state(
    circuit: &Circuit,
    model: &NoiseModel,
    keep: &[usize],
    trajectories: usize,
    rng_seed: u64,
) -> Result<DensityMatrix> {
    let mut mats = average_probes(circuit, model, &[Probe::keep(keep)], trajectories, rng_seed)?;
    DensityMatrix::from_matrix_unchecked(mats.remove(0))
}
