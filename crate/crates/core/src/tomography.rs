//! Full state tomography of subsystems of up to four qubits: Pauli
//! measurement settings, pooled expectation estimates, linear inversion and
//! eigenvalue-clipping projection onto the physical states.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Pauli};
use crate::qsim::{conjugate, sample_histogram, Circuit, Counts, DensityMatrix, GateOp};
use crate::rng;

/// A setting with its decoded outcomes and shot count.
type Decoded<'a> = (&'a PauliSetting, Vec<(Vec<u8>, u64)>, u64);

pub const MAX_SUBSYSTEM: usize = 4;

/// Measurement basis per qubit; `bases[i]` is applied to subsystem qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliSetting {
    pub bases: Vec<Pauli>,
}

impl PauliSetting {
    pub fn label(&self) -> String {
        self.bases.iter().map(|p| p.letter()).collect()
    }

    /// True when every non-identity letter of `string` matches this setting.
    pub fn is_consistent_with(&self, string: &[Pauli]) -> bool {
        string.iter().zip(&self.bases).all(|(p, b)| *p == Pauli::I || p == b)
    }
}

impl fmt::Display for PauliSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Expectation value of every `k`-letter Pauli string (letter `i` on
/// subsystem qubit `i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationTable {
    pub num_qubits: usize,
    pub values: BTreeMap<String, f64>,
}

impl ExpectationTable {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.get(label).copied()
    }

    /// Exact expectations of a known state.
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let k = rho.num_qubits();
        check_size(k)?;
        let values = pauli_strings(k)
            .into_iter()
            .map(|s| {
                let v = if s.iter().all(|&p| p == Pauli::I) { 1.0 } else { linalg::pauli_expectation(rho.matrix(), &s) };
                (label(&s), v)
            })
            .collect();
        Ok(Self { num_qubits: k, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub raw: CMatrix,
    pub state: DensityMatrix,
    pub shots_per_setting: u64,
    pub settings_count: usize,
}

fn check_size(k: usize) -> Result<()> {
    if !(1..=MAX_SUBSYSTEM).contains(&k) {
        return Err(Error::SubsystemSize(k));
    }
    Ok(())
}

fn label(s: &[Pauli]) -> String {
    s.iter().map(|p| p.letter()).collect()
}

/// All `4^k` Pauli strings, lexicographic in (I, X, Y, Z).
pub fn pauli_strings(k: usize) -> Vec<Vec<Pauli>> {
    product(&Pauli::ALL, k)
}

fn product(letters: &[Pauli], k: usize) -> Vec<Vec<Pauli>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                letters.iter().map(move |&p| {
                    let mut v = prefix.clone();
                    v.push(p);
                    v
                })
            })
            .collect()
    })
}

/// The `3^k` product-basis settings in lexicographic order.
pub fn tomography_settings(k: usize) -> Result<Vec<PauliSetting>> {
    check_size(k)?;
    Ok(product(&Pauli::NON_IDENTITY, k).into_iter().map(|bases| PauliSetting { bases }).collect())
}

fn rotation_ops(basis: Pauli, q: usize) -> Vec<GateOp> {
    match basis {
        Pauli::X => vec![GateOp::H(q)],
        Pauli::Y => vec![GateOp::Sdg(q), GateOp::H(q)],
        _ => vec![],
    }
}

/// Pre-measurement rotation mapping each basis onto Z (H for X, S† then H
/// for Y), followed by measurement of `qubits` in order.
pub fn basis_change_circuit(setting: &PauliSetting, qubits: &[usize], num_qubits: usize) -> Result<Circuit> {
    if setting.bases.len() != qubits.len() {
        return Err(Error::LengthMismatch { left: setting.bases.len(), right: qubits.len() });
    }
    let mut c = Circuit::new(num_qubits);
    for (&basis, &q) in setting.bases.iter().zip(qubits) {
        for op in rotation_ops(basis, q) {
            c.push(op)?;
        }
    }
    c.measure(qubits)?;
    Ok(c)
}

/// Pools every setting consistent with each Pauli string and averages the
/// parity of its support over all of their shots.
pub fn estimate_expectations(counts_by_setting: &BTreeMap<PauliSetting, Counts>) -> Result<ExpectationTable> {
    let k = counts_by_setting.keys().next().map(|s| s.bases.len()).ok_or(Error::EmptyInput)?;
    let settings = tomography_settings(k)?;
    for s in &settings {
        if !counts_by_setting.contains_key(s) {
            return Err(Error::MissingSetting(s.label()));
        }
    }
    // decode each histogram once
    let decoded: Vec<Decoded<'_>> = settings
        .iter()
        .map(|s| {
            let c = &counts_by_setting[s];
            (s, c.outcomes().collect(), c.shots)
        })
        .collect();

    let mut values = BTreeMap::new();
    for string in pauli_strings(k) {
        let support: Vec<usize> = (0..k).filter(|&i| string[i] != Pauli::I).collect();
        let value = if support.is_empty() {
            1.0
        } else {
            let mut total = 0u64;
            let mut signed = 0i64;
            for (setting, outcomes, shots) in &decoded {
                if !setting.is_consistent_with(&string) {
                    continue;
                }
                total += shots;
                for (bits, n) in outcomes {
                    let parity = support.iter().map(|&i| bits[i] as usize).sum::<usize>() & 1;
                    signed += if parity == 0 { *n as i64 } else { -(*n as i64) };
                }
            }
            if total == 0 {
                0.0
            } else {
                signed as f64 / total as f64
            }
        };
        values.insert(label(&string), value);
    }
    Ok(ExpectationTable { num_qubits: k, values })
}

/// `rho = 2^-k sum_P <P> P` over all Pauli strings.
pub fn linear_inversion(table: &ExpectationTable) -> Result<CMatrix> {
    let k = table.num_qubits;
    check_size(k)?;
    let dim = 1 << k;
    let mut rho = CMatrix::zeros(dim, dim);
    for string in pauli_strings(k) {
        let l = label(&string);
        let v = table.get(&l).ok_or_else(|| Error::MissingSetting(l.clone()))?;
        if v != 0.0 {
            rho += linalg::pauli_string_matrix(&string) * Complex64::new(v, 0.0);
        }
    }
    Ok(rho * Complex64::new(1.0 / dim as f64, 0.0))
}

/// Clips negative eigenvalues to zero and renormalises the trace.
pub fn project_psd(raw: &CMatrix) -> Result<DensityMatrix> {
    let herm = (raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = linalg::hermitian_eigen(&herm);
    if values.first().is_some_and(|&v| v >= 0.0) {
        let tr = linalg::trace(&herm).re;
        if tr <= 0.0 {
            return Err(Error::DegenerateMatrix);
        }
        return DensityMatrix::from_matrix_unchecked(herm * Complex64::new(1.0 / tr, 0.0));
    }
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateMatrix);
    }
    let diag = nalgebra::DVector::from_iterator(clipped.len(), clipped.iter().map(|v| Complex64::new(v / total, 0.0)));
    let m = &vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint();
    DensityMatrix::from_matrix_unchecked((&m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Linear inversion followed by PSD projection.
pub fn reconstruct(counts_by_setting: &BTreeMap<PauliSetting, Counts>) -> Result<TomographyResult> {
    let table = estimate_expectations(counts_by_setting)?;
    let raw = linear_inversion(&table)?;
    let state = project_psd(&raw)?;
    let shots_per_setting = counts_by_setting.values().map(|c| c.shots).max().unwrap_or(0);
    Ok(TomographyResult { raw, state, shots_per_setting, settings_count: counts_by_setting.len() })
}

/// Simulated measurement record of every setting on the first `k` qubits of
/// `rho`. Any further qubits of `rho` are spectators: measured in Z in every
/// shot and post-selected on outcome 0. `readout[i]` is the flip probability
/// of qubit `i` of `rho`.
pub fn simulate_settings(
    rho: &CMatrix,
    k: usize,
    shots: u64,
    readout: &[f64],
    rng_seed: u64,
) -> Result<BTreeMap<PauliSetting, Counts>> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let total = rho.nrows().trailing_zeros() as usize;
    if total < k || readout.len() != total {
        return Err(Error::DimensionMismatch { expected: total, actual: readout.len() });
    }
    let spectator_mask = ((1usize << total) - 1) ^ ((1usize << k) - 1);
    let mut out = BTreeMap::new();
    for (index, setting) in tomography_settings(k)?.into_iter().enumerate() {
        let mut rotated = rho.clone();
        for (q, &basis) in setting.bases.iter().enumerate() {
            for op in rotation_ops(basis, q) {
                conjugate(&mut rotated, &op);
            }
        }
        let probs: Vec<f64> = rotated.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        let mut rng = rng::stream(rng_seed, index as u64);
        let histogram = sample_histogram(&probs, readout, shots, &mut rng);
        let mut kept = vec![0u64; 1 << k];
        for (outcome, &n) in histogram.iter().enumerate() {
            if outcome & spectator_mask == 0 {
                kept[outcome] += n;
            }
        }
        out.insert(setting, Counts::from_histogram(k, &kept));
    }
    Ok(out)
}
