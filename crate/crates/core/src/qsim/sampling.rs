use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::check_selection;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

/// Measurement histogram. In every key, character `i` is the outcome of the
/// `i`-th measured qubit, in the order the qubits were listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub table: BTreeMap<String, u64>,
}

impl Counts {
    /// Builds counts from a histogram over outcome indices, where bit `i` of
    /// the index is the `i`-th measured qubit.
    pub fn from_histogram(width: usize, histogram: &[u64]) -> Self {
        let mut table = BTreeMap::new();
        for (outcome, &n) in histogram.iter().enumerate() {
            if n > 0 {
                table.insert(bitstring(outcome, width), n);
            }
        }
        Self { shots: histogram.iter().sum(), table }
    }

    pub fn get(&self, key: &str) -> u64 {
        self.table.get(key).copied().unwrap_or(0)
    }

    pub fn frequency(&self, key: &str) -> f64 {
        self.get(key) as f64 / self.shots as f64
    }

    /// Iterates `(outcome bits, count)` with `bits[i]` for measured qubit `i`.
    pub fn outcomes(&self) -> impl Iterator<Item = (Vec<u8>, u64)> + '_ {
        self.table.iter().map(|(k, &n)| (k.bytes().map(|b| b - b'0').collect(), n))
    }
}

pub fn bitstring(outcome: usize, width: usize) -> String {
    (0..width).map(|i| if (outcome >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Born-rule sampling of `measured` with optional classical readout flips.
///
/// `readout[q]` is the flip probability of qubit `q` (indexed by register
/// position, not by measured position).
pub fn sample_measurements(
    state: &StateVector,
    measured: &[usize],
    shots: u64,
    readout: Option<&[f64]>,
    rng_seed: u64,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    check_selection(measured, state.num_qubits())?;
    let probs = marginal_probabilities(state, measured);
    let flips: Vec<f64> = match readout {
        Some(r) => measured.iter().map(|&q| r.get(q).copied().unwrap_or(0.0)).collect(),
        None => vec![0.0; measured.len()],
    };
    let mut rng = rng::seeded(rng_seed);
    let histogram = sample_histogram(&probs, &flips, shots, &mut rng);
    Ok(Counts::from_histogram(measured.len(), &histogram))
}

/// Outcome distribution of `measured`, outcome bit `i` = `measured[i]`.
pub fn marginal_probabilities(state: &StateVector, measured: &[usize]) -> Vec<f64> {
    let mut probs = vec![0.0; 1 << measured.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        probs[super::density::gather(i, measured)] += a.norm_sqr();
    }
    probs
}

/// Draws `shots` outcomes from `probs` and flips bit `i` of each with
/// probability `flips[i]`.
pub(crate) fn sample_histogram(probs: &[f64], flips: &[f64], shots: u64, rng: &mut SimRng) -> Vec<u64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    let mut histogram = vec![0u64; probs.len()];
    let any_flip = flips.iter().any(|&f| f > 0.0);
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let mut outcome = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        if any_flip {
            for (bit, &f) in flips.iter().enumerate() {
                if f > 0.0 && rng.random::<f64>() < f {
                    outcome ^= 1 << bit;
                }
            }
        }
        histogram[outcome] += 1;
    }
    histogram
}
