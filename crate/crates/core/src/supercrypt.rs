//! One-time-pad encryption with a permuted key carried over a qubit pair by
//! superdense coding, and the fidelity of that quantum channel.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{edge, Edge, Topology};
use crate::noise::{sample_frame, NoiseModel, NoiseSchedule};
use crate::qsim::{
    exact_density_evolution, marginal_probabilities, run_circuit, Circuit, GateOp, StateVector,
};
use crate::rng::{self, SimRng};

/// The four two-bit messages in key order.
pub const MESSAGES: [&str; 4] = ["00", "01", "10", "11"];

/// Key bits (0/1) plus the secret permutation applied before transmission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub bits: Vec<u8>,
    pub permutation: Vec<usize>,
    pub seed: u64,
}

impl KeyMaterial {
    pub fn new(bits: Vec<u8>, permutation: Vec<usize>, seed: u64) -> Result<Self> {
        if bits.is_empty() || !bits.len().is_multiple_of(2) {
            return Err(Error::InvalidKeyLength(bits.len()));
        }
        check_bits(&bits)?;
        check_permutation(&permutation, bits.len())?;
        Ok(Self { bits, permutation, seed })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub bits: Vec<u8>,
}

/// Uniform key bits and a uniform permutation, both fixed by `seed`.
pub fn generate_key(n: usize, seed: u64) -> Result<KeyMaterial> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidKeyLength(n));
    }
    let mut rng = rng::seeded(seed);
    let bits = (0..n).map(|_| rng.random_range(0..=1u8)).collect();
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(&mut rng);
    Ok(KeyMaterial { bits, permutation, seed })
}

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.trim()
        .chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::InvalidConfig(format!("`{text}` is not a bit string"))),
        })
        .collect()
}

pub fn format_bits(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().find(|&&b| b > 1) {
        Some(&b) => Err(Error::InvalidConfig(format!("bit value {b} is not 0 or 1"))),
        None => Ok(()),
    }
}

fn check_permutation(permutation: &[usize], n: usize) -> Result<()> {
    if permutation.len() != n {
        return Err(Error::LengthMismatch { left: n, right: permutation.len() });
    }
    let mut seen = vec![false; n];
    for &p in permutation {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(n));
        }
    }
    Ok(())
}

/// `output[i] = bits[permutation[i]]`.
pub fn permute_bits(bits: &[u8], permutation: &[usize]) -> Result<Vec<u8>> {
    check_permutation(permutation, bits.len())?;
    Ok(permutation.iter().map(|&p| bits[p]).collect())
}

/// Inverse of [`permute_bits`].
pub fn unpermute_bits(bits: &[u8], permutation: &[usize]) -> Result<Vec<u8>> {
    check_permutation(permutation, bits.len())?;
    let mut out = vec![0; bits.len()];
    for (i, &p) in permutation.iter().enumerate() {
        out[p] = bits[i];
    }
    Ok(out)
}

fn xor(left: &[u8], right: &[u8]) -> Result<Vec<u8>> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch { left: left.len(), right: right.len() });
    }
    check_bits(left)?;
    check_bits(right)?;
    Ok(left.iter().zip(right).map(|(a, b)| a ^ b).collect())
}

pub fn otp_encrypt(message: &[u8], key: &[u8]) -> Result<Ciphertext> {
    Ok(Ciphertext { bits: xor(message, key)? })
}

pub fn otp_decrypt(cipher: &Ciphertext, key: &[u8]) -> Result<Vec<u8>> {
    xor(&cipher.bits, key)
}

/// Bell pair on `(b, c)`, encoding of `two_bits` on `b`, Bell-basis decoding,
/// and measurement of `[b, c]`. Outcome bit 0 is `b` (the message's high
/// bit) and bit 1 is `c`.
pub fn superdense_circuit(two_bits: u8, pair: (usize, usize), topology: &Topology) -> Result<Circuit> {
    let (b, c) = pair;
    if two_bits > 3 {
        return Err(Error::InvalidMessage(two_bits));
    }
    if !topology.has_edge(b, c) {
        return Err(Error::NotAnEdge(b, c));
    }
    let mut circuit = Circuit::new(topology.num_qubits());
    circuit.push(GateOp::H(b))?;
    circuit.push(GateOp::Cnot { control: b, target: c })?;
    if two_bits & 1 == 1 {
        circuit.push(GateOp::X(b))?;
    }
    if two_bits & 2 == 2 {
        circuit.push(GateOp::Z(b))?;
    }
    circuit.push(GateOp::Cnot { control: b, target: c })?;
    circuit.push(GateOp::H(b))?;
    circuit.measure(&[b, c])?;
    Ok(circuit)
}

/// Message value from a measured outcome index (bit 0 = `b`, bit 1 = `c`).
fn decode(outcome: usize) -> u8 {
    (((outcome & 1) << 1) | ((outcome >> 1) & 1)) as u8
}

/// The superdense circuits of one pair, reduced to a two-qubit register.
#[derive(Debug, Clone)]
struct Channel {
    circuits: [Circuit; 4],
    model: NoiseModel,
    flips: [f64; 2],
    /// Noiseless outcome index of each message.
    ideal: [usize; 4],
}

impl Channel {
    fn new(pair: (usize, usize), topology: &Topology, model: &NoiseModel) -> Result<Self> {
        let mut circuits = Vec::with_capacity(4);
        let mut ideal = [0; 4];
        let mut local_model = None;
        for m in 0..4u8 {
            let (compact, original) = superdense_circuit(m, pair, topology)?.compact();
            local_model.get_or_insert_with(|| model.remap(&original));
            let state = run_circuit(&compact, &StateVector::zero(compact.num_qubits()))?;
            let probs = marginal_probabilities(&state, compact.measured_qubits());
            ideal[m as usize] = (0..4).max_by(|&x, &y| probs[x].total_cmp(&probs[y])).expect("four outcomes");
            circuits.push(compact);
        }
        Ok(Self {
            circuits: circuits.try_into().expect("four messages"),
            model: local_model.expect("four messages"),
            flips: [model.readout(pair.0), model.readout(pair.1)],
            ideal,
        })
    }

    fn sender(&self) -> Sender<'_> {
        Sender { channel: self, schedules: self.circuits.iter().map(|c| NoiseSchedule::new(c, &self.model)).collect() }
    }
}

/// Single-shot runs of a [`Channel`]. The noiseless outcome is a basis
/// state, so a trajectory's Pauli frame flips exactly its X-bits.
struct Sender<'a> {
    channel: &'a Channel,
    schedules: Vec<NoiseSchedule<'a>>,
}

impl Sender<'_> {
    fn send(&self, message: u8, rng: &mut SimRng) -> u8 {
        let m = message as usize;
        let frame = sample_frame(&self.schedules[m], rng);
        let measured = self.channel.circuits[m].measured_qubits();
        let mut outcome = self.channel.ideal[m];
        for (bit, &q) in measured.iter().enumerate() {
            outcome ^= ((frame.x >> q & 1) as usize) << bit;
        }
        for (bit, &f) in self.channel.flips.iter().enumerate() {
            if f > 0.0 && rng.random::<f64>() < f {
                outcome ^= 1 << bit;
            }
        }
        decode(outcome)
    }
}

/// Options for [`transmit_key`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmitOptions {
    /// Single-shot runs per block; the most frequent decode wins.
    pub votes: usize,
}

impl Default for TransmitOptions {
    fn default() -> Self {
        Self { votes: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionReport {
    pub sent_bits: Vec<u8>,
    pub received_bits: Vec<u8>,
    /// Decoded two-bit values in transmission (permuted) order.
    pub block_outcomes: Vec<u8>,
    pub pair: Edge,
}

impl TransmissionReport {
    pub fn block_success_rate(&self, key: &KeyMaterial) -> f64 {
        let sent = permute_bits(&key.bits, &key.permutation).expect("valid key");
        let ok = sent.chunks(2).zip(&self.block_outcomes).filter(|(blk, &v)| (blk[0] << 1 | blk[1]) == v).count();
        ok as f64 / self.block_outcomes.len() as f64
    }
}

/// Permutes the key, sends each two-bit block through one noisy superdense
/// run on `pair`, and undoes the permutation on the receiving side.
pub fn transmit_key(
    key: &KeyMaterial,
    pair: (usize, usize),
    topology: &Topology,
    model: &NoiseModel,
    seed: u64,
) -> Result<TransmissionReport> {
    transmit_key_with(key, &key.permutation, pair, topology, model, seed, TransmitOptions::default())
}

/// [`transmit_key`] with an explicit receiver permutation and voting.
pub fn transmit_key_with(
    key: &KeyMaterial,
    receiver_permutation: &[usize],
    pair: (usize, usize),
    topology: &Topology,
    model: &NoiseModel,
    seed: u64,
    options: TransmitOptions,
) -> Result<TransmissionReport> {
    if options.votes == 0 {
        return Err(Error::ZeroShots);
    }
    let channel = Channel::new(pair, topology, model)?;
    let permuted = permute_bits(&key.bits, &key.permutation)?;
    let sender = channel.sender();
    let mut rng = rng::seeded(seed);
    let mut block_outcomes = Vec::with_capacity(permuted.len() / 2);
    for block in permuted.chunks(2) {
        let message = block[0] << 1 | block[1];
        let mut tally = [0usize; 4];
        for _ in 0..options.votes {
            tally[sender.send(message, &mut rng) as usize] += 1;
        }
        let best = (0..4).max_by_key(|&v| (tally[v], std::cmp::Reverse(v))).expect("four values");
        block_outcomes.push(best as u8);
    }
    let received: Vec<u8> = block_outcomes.iter().flat_map(|&v| [v >> 1, v & 1]).collect();
    Ok(TransmissionReport {
        sent_bits: key.bits.clone(),
        received_bits: unpermute_bits(&received, receiver_permutation)?,
        block_outcomes,
        pair: edge(pair.0, pair.1),
    })
}

/// Empirical success probability of the superdense channel on one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub pair: Edge,
    pub mean_fidelity: f64,
    pub per_message: BTreeMap<String, f64>,
    pub shots: u64,
    pub repeats: usize,
    /// Standard error of the per-repeat mean fidelity.
    pub std_error: f64,
}

/// Runs `shots` single-shot trajectories per message, `repeats` times.
/// Repeat `r`, message `m` draws from stream `4r + m` of `seed`.
pub fn protocol_fidelity(
    pair: (usize, usize),
    topology: &Topology,
    model: &NoiseModel,
    shots: u64,
    repeats: usize,
    seed: u64,
) -> Result<FidelityEstimate> {
    if shots == 0 || repeats == 0 {
        return Err(Error::ZeroShots);
    }
    let channel = Channel::new(pair, topology, model)?;
    let sender = channel.sender();
    let successes: Vec<u64> = (0..repeats * 4)
        .into_par_iter()
        .map(|task| {
            let message = (task % 4) as u8;
            let mut rng = rng::stream(seed, task as u64);
            (0..shots).filter(|_| sender.send(message, &mut rng) == message).count() as u64
        })
        .collect();

    let rate = |hits: u64| hits as f64 / shots as f64;
    let mut per_message = BTreeMap::new();
    for (m, label) in MESSAGES.iter().enumerate() {
        let total: f64 = (0..repeats).map(|r| rate(successes[4 * r + m])).sum();
        per_message.insert(label.to_string(), total / repeats as f64);
    }
    let per_repeat: Vec<f64> =
        (0..repeats).map(|r| successes[4 * r..4 * r + 4].iter().map(|&h| rate(h)).sum::<f64>() / 4.0).collect();
    Ok(FidelityEstimate {
        pair: edge(pair.0, pair.1),
        mean_fidelity: per_message.values().sum::<f64>() / 4.0,
        per_message,
        shots,
        repeats,
        std_error: standard_error(&per_repeat),
    })
}

/// Sample standard deviation over `sqrt(n)`; zero for fewer than two values.
pub fn standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Mean success probability computed from the exact noisy density matrix
/// of each superdense circuit, followed by independent readout flips.
pub fn exact_protocol_fidelity(pair: (usize, usize), topology: &Topology, model: &NoiseModel) -> Result<f64> {
    let channel = Channel::new(pair, topology, model)?;
    let mut total = 0.0;
    for (m, circuit) in channel.circuits.iter().enumerate() {
        let rho = exact_density_evolution(circuit, &channel.model)?;
        let measured = circuit.measured_qubits();
        let probs: Vec<f64> = (0..4)
            .map(|outcome| {
                let index = (outcome & 1) << measured[0] | ((outcome >> 1) & 1) << measured[1];
                rho.matrix()[(index, index)].re
            })
            .collect();
        for (outcome, p) in probs.iter().enumerate() {
            let mut observed_ok = 1.0;
            for bit in 0..2 {
                let wanted = (decode_inverse(m as u8) >> bit) & 1;
                let got = (outcome >> bit) & 1;
                let f = channel.flips[bit];
                observed_ok *= if wanted == got { 1.0 - f } else { f };
            }
            total += p * observed_ok;
        }
    }
    Ok((total / 4.0).clamp(0.0, 1.0))
}

fn decode_inverse(message: u8) -> usize {
    (((message >> 1) & 1) | ((message & 1) << 1)) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundtripResult {
    pub ciphertext: Ciphertext,
    pub key: KeyMaterial,
    pub received_key: Vec<u8>,
    pub decrypted: Vec<u8>,
    pub exact_match: bool,
}

/// Generates a key as long as `message`, encrypts, sends the key over
/// `pair`, and decrypts with what arrived. The classical channel is exact.
pub fn supercrypt_roundtrip(
    message: &[u8],
    pair: (usize, usize),
    topology: &Topology,
    model: &NoiseModel,
    seed: u64,
) -> Result<RoundtripResult> {
    let key = generate_key(message.len(), rng::derive(seed, 1))?;
    let ciphertext = otp_encrypt(message, &key.bits)?;
    let report = transmit_key(&key, pair, topology, model, rng::derive(seed, 2))?;
    let decrypted = otp_decrypt(&ciphertext, &report.received_bits)?;
    Ok(RoundtripResult {
        exact_match: decrypted == message,
        ciphertext,
        key,
        received_key: report.received_bits,
        decrypted,
    })
}
