//! Pairwise entanglement of graph-state qubits: chain selection, the local
//! projections `O = (Z + I)/2` on outer qubits, partial transpose and
//! negativity, and the ranking that picks the transmission pair.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{build_graph_state_circuit, edge, Edge, Graph};
use crate::linalg::{self, CMatrix, Pauli};
use crate::noise::{average_probes, NoiseModel, Probe};
use crate::qsim::{scatter, DensityMatrix};
use crate::{rng, tomography};

/// Post-selection floor: branches rarer than this are unreachable at the
/// shot counts used here.
pub const BRANCH_FLOOR: f64 = 1e-6;

/// Spectral values within this distance of zero count as zero.
pub const EIGEN_ZERO: f64 = 1e-10;

/// Path `a - b - c - d` in a graph; `(b, c)` is the probed pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl Chain {
    pub fn qubits(&self) -> [usize; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Picks `a in N(b) \ {c}`, `d in N(c) \ {b}` with `a != d`, smallest
/// `(a, d)` first.
pub fn chain_for_pair(graph: &Graph, pair: (usize, usize)) -> Result<Chain> {
    let (b, c) = pair;
    if !graph.has_edge(b, c) {
        return Err(Error::NotAnEdge(b, c));
    }
    let left: Vec<usize> = graph.neighbors(b).into_iter().filter(|&v| v != c).collect();
    let right: Vec<usize> = graph.neighbors(c).into_iter().filter(|&v| v != b).collect();
    left.iter()
        .flat_map(|&a| right.iter().map(move |&d| (a, d)))
        .find(|(a, d)| a != d)
        .map(|(a, d)| Chain { a, b, c, d })
        .ok_or(Error::NoChain(b, c))
}

/// `(1/16)(I + Z_A X_B Z_C)(I + Z_B X_C Z_D)` on qubits `A, B, C, D = 0..4`:
/// the four-qubit marginal of a ring graph state along a chain.
pub fn ideal_chain_state() -> DensityMatrix {
    use Pauli::{I, X, Z};
    let id = CMatrix::identity(16, 16);
    let kb = linalg::pauli_string_matrix(&[Z, X, Z, I]);
    let kc = linalg::pauli_string_matrix(&[I, Z, X, Z]);
    let m = (&id + kb) * (&id + kc) * Complex64::new(1.0 / 16.0, 0.0);
    DensityMatrix::from_matrix_unchecked(m).expect("16x16 is a valid register size")
}

/// Projects qubits `A` and `D` of a four-qubit chain state onto |0>,
/// renormalises and traces them out, returning the `(B, C)` state.
pub fn project_chain(rho_abcd: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_abcd.num_qubits() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho_abcd.num_qubits() });
    }
    project_outer(rho_abcd.matrix(), &[0, 3], [1, 2])
}

/// General form of [`project_chain`]: `zeroed` positions are projected onto
/// |0>, `kept` positions survive (in that order), all others are traced out.
pub fn project_outer(rho: &CMatrix, zeroed: &[usize], kept: [usize; 2]) -> Result<DensityMatrix> {
    let n = rho.nrows().trailing_zeros() as usize;
    let traced: Vec<usize> = (0..n).filter(|q| !zeroed.contains(q) && !kept.contains(q)).collect();
    let mut out = CMatrix::zeros(4, 4);
    for e in 0..(1usize << traced.len()) {
        let base = scatter(e, &traced);
        for r in 0..4 {
            let row = base | scatter(r, &kept);
            for c in 0..4 {
                out[(r, c)] += rho[(row, base | scatter(c, &kept))];
            }
        }
    }
    let p = linalg::trace(&out).re;
    if p <= BRANCH_FLOOR {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    DensityMatrix::from_matrix_unchecked(out * Complex64::new(1.0 / p, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    First,
    Second,
}

/// Transposes the indices of one qubit of a two-qubit operator.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: Subsystem) -> Result<CMatrix> {
    if rho.num_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: rho.num_qubits() });
    }
    let bit = match subsystem {
        Subsystem::First => 1,
        Subsystem::Second => 2,
    };
    let m = rho.matrix();
    Ok(CMatrix::from_fn(4, 4, |r, c| {
        let swap = (r ^ c) & bit;
        m[(r ^ swap, c ^ swap)]
    }))
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose, clamped to `[0, 1/2]`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(raw_negativity(rho)?.clamp(0.0, 0.5))
}

/// Unclamped negativity, for checking how far round-off strays.
pub fn raw_negativity(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho, Subsystem::Second)?;
    Ok(linalg::hermitian_eigenvalues(&pt).into_iter().filter(|&v| v < -EIGEN_ZERO).map(f64::abs).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMethod {
    Tomographed,
    Exact,
}

/// The qubits measured to score one pair. `tomographed` holds at most four
/// qubits; the positions in `projected` are projected onto |0> and
/// `kept` are the pair. `spectators` are further outer neighbours that are
/// only measured in Z and post-selected on 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairProbe {
    pub pair: Edge,
    pub chain: Option<Chain>,
    pub tomographed: Vec<usize>,
    pub projected: Vec<usize>,
    pub kept: [usize; 2],
    pub spectators: Vec<usize>,
}

/// Lays out the measurement of `pair`: the chain `a-b-c-d` when one exists,
/// otherwise the pair plus up to two outer neighbours. Every neighbour of
/// `b` or `c` outside the pair ends up projected onto |0>, which leaves an
/// ideal graph state's pair in the two-vertex graph state.
pub fn pair_probe(graph: &Graph, pair: (usize, usize)) -> Result<PairProbe> {
    let (b, c) = pair;
    if !graph.has_edge(b, c) {
        return Err(Error::NotAnEdge(b, c));
    }
    let outer: BTreeSet<usize> =
        graph.neighbors(b).into_iter().chain(graph.neighbors(c)).filter(|&v| v != b && v != c).collect();
    let probe = match chain_for_pair(graph, (b, c)) {
        Ok(chain) => PairProbe {
            pair: edge(b, c),
            chain: Some(chain),
            tomographed: chain.qubits().to_vec(),
            projected: vec![0, 3],
            kept: [1, 2],
            spectators: outer.iter().copied().filter(|&v| v != chain.a && v != chain.d).collect(),
        },
        Err(Error::NoChain(..)) => {
            let extra: Vec<usize> = outer.iter().copied().take(tomography::MAX_SUBSYSTEM - 2).collect();
            let mut tomographed = vec![b, c];
            tomographed.extend(&extra);
            PairProbe {
                pair: edge(b, c),
                chain: None,
                projected: (2..tomographed.len()).collect(),
                tomographed,
                kept: [0, 1],
                spectators: outer.iter().copied().skip(extra.len()).collect(),
            }
        }
        Err(e) => return Err(e),
    };
    Ok(probe)
}

/// Negativity of one pair and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementScore {
    pub pair: Edge,
    pub negativity: f64,
    pub chain: Option<Chain>,
    pub tomographed: Vec<usize>,
    pub spectators: Vec<usize>,
    pub method: ScoreMethod,
}

/// Options for [`score_pairs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub method: ScoreMethod,
    pub shots: u64,
    pub trajectories: usize,
    pub seed: u64,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        Self { method: ScoreMethod::Tomographed, shots: 8192, trajectories: 4096, seed: 0 }
    }
}

/// Prepares the graph state of `graph` under `model` and scores every pair.
/// All pairs share one set of trajectories.
pub fn score_pairs(
    graph: &Graph,
    pairs: &[Edge],
    model: &NoiseModel,
    options: &ScoreOptions,
) -> Result<Vec<EntanglementScore>> {
    let circuit = build_graph_state_circuit(graph)?;
    let probes = pairs.iter().map(|&p| pair_probe(graph, p)).collect::<Result<Vec<_>>>()?;
    let trajectory_probes: Vec<Probe> = probes
        .iter()
        .map(|p| match options.method {
            ScoreMethod::Exact => Probe { keep: p.tomographed.clone(), zeroed: p.spectators.clone() },
            ScoreMethod::Tomographed => {
                Probe::keep(&p.tomographed.iter().chain(&p.spectators).copied().collect::<Vec<_>>())
            }
        })
        .collect();
    let states = average_probes(&circuit, model, &trajectory_probes, options.trajectories, options.seed)?;

    probes
        .iter()
        .zip(states)
        .enumerate()
        .map(|(i, (probe, joint))| {
            let local = match options.method {
                ScoreMethod::Exact => normalize(joint)?,
                ScoreMethod::Tomographed => {
                    let readout: Vec<f64> =
                        probe.tomographed.iter().chain(&probe.spectators).map(|&q| model.readout(q)).collect();
                    let seed = rng::derive(options.seed, 0x7040 + i as u64);
                    let data =
                        tomography::simulate_settings(&joint, probe.tomographed.len(), options.shots, &readout, seed)?;
                    tomography::reconstruct(&data)?.state.into_matrix()
                }
            };
            let pair_state = project_outer(&local, &probe.projected, probe.kept)?;
            Ok(EntanglementScore {
                pair: probe.pair,
                negativity: negativity(&pair_state)?,
                chain: probe.chain,
                tomographed: probe.tomographed.clone(),
                spectators: probe.spectators.clone(),
                method: options.method,
            })
        })
        .collect()
}

fn normalize(m: CMatrix) -> Result<CMatrix> {
    let p = linalg::trace(&m).re;
    if p <= BRANCH_FLOOR {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    Ok(m * Complex64::new(1.0 / p, 0.0))
}

/// Descending negativity; ties go to the lexicographically smaller pair.
pub fn rank_pairs(scores: &[EntanglementScore]) -> Result<Vec<EntanglementScore>> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ranked = scores.to_vec();
    ranked.sort_by(|x, y| match y.negativity.total_cmp(&x.negativity) {
        Ordering::Equal => x.pair.cmp(&y.pair),
        other => other,
    });
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstate::{device_topology, ring_layout};
    use crate::qsim::{exact_density_evolution, reduced_density_matrix, run_circuit, StateVector};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ring(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &(0..n).collect::<Vec<_>>(), &edges).unwrap()
    }

    fn graph_state(g: &Graph) -> StateVector {
        run_circuit(&build_graph_state_circuit(g).unwrap(), &StateVector::zero(g.num_qubits())).unwrap()
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&StateVector::from_amplitudes(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap())
    }

    fn werner(p: f64) -> DensityMatrix {
        let m = bell().into_matrix() * c(p) + CMatrix::identity(4, 4) * c((1.0 - p) / 4.0);
        DensityMatrix::new(m).unwrap()
    }

    fn rank(m: &CMatrix) -> usize {
        linalg::hermitian_eigenvalues(m).into_iter().filter(|v| v.abs() > 1e-9).count()
    }

    // Cyclic Jacobi on the real 8x8 embedding [[A, -B], [B, A]] of a 4x4
    // Hermitian A + iB; each eigenvalue appears twice.
    fn jacobi_eigenvalues(m: &CMatrix) -> Vec<f64> {
        let n = m.nrows();
        let mut a = vec![vec![0.0; 2 * n]; 2 * n];
        for r in 0..n {
            for s in 0..n {
                let z = m[(r, s)];
                a[r][s] = z.re;
                a[r + n][s + n] = z.re;
                a[r][s + n] = -z.im;
                a[r + n][s] = z.im;
            }
        }
        let size = 2 * n;
        for _ in 0..100 {
            let off: f64 = (0..size).flat_map(|i| (0..size).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[i][j] * a[i][j]).sum();
            if off < 1e-24 {
                break;
            }
            for p in 0..size {
                for q in p + 1..size {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..size {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = cs * akp - sn * akq;
                        a[k][q] = sn * akp + cs * akq;
                    }
                    for k in 0..size {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = cs * apk - sn * aqk;
                        a[q][k] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..size).map(|i| a[i][i]).collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }

    fn det4(m: &CMatrix) -> f64 {
        m.clone().determinant().re
    }

    fn random_density(seed: &[f64]) -> DensityMatrix {
        // G G^dagger / Tr for a 4x4 complex G built from 32 reals
        let g = CMatrix::from_fn(4, 4, |r, s| Complex64::new(seed[r * 4 + s], seed[16 + r * 4 + s]));
        let m = &g * g.adjoint();
        let t = linalg::trace(&m).re;
        DensityMatrix::new(m * c(1.0 / t)).unwrap()
    }

    #[test]
    fn chain_is_smallest_a_then_d() {
        let g = ring(6);
        assert_eq!(chain_for_pair(&g, (1, 2)).unwrap(), Chain { a: 0, b: 1, c: 2, d: 3 });
        assert_eq!(chain_for_pair(&g, (0, 1)).unwrap(), Chain { a: 5, b: 0, c: 1, d: 2 });
        let melbourne = ring_layout(&device_topology("ibmq_16_melbourne").unwrap(), None).unwrap().graph;
        assert_eq!(chain_for_pair(&melbourne, (1, 2)).unwrap(), Chain { a: 0, b: 1, c: 2, d: 3 });
        assert_eq!(chain_for_pair(&melbourne, (1, 13)).unwrap(), Chain { a: 0, b: 1, c: 13, d: 12 });
    }

    #[test]
    fn spec_chain_examples() {
        let melbourne = ring_layout(&device_topology("ibmq_16_melbourne").unwrap(), None).unwrap().graph;
        assert_eq!(chain_for_pair(&melbourne, (6, 8)).unwrap(), Chain { a: 5, b: 6, c: 8, d: 7 });
        let path = Graph::new(4, &[0, 1, 2, 3], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(chain_for_pair(&path, (1, 2)).unwrap(), Chain { a: 0, b: 1, c: 2, d: 3 });
        assert_eq!(chain_for_pair(&path, (0, 1)), Err(Error::NoChain(0, 1)));
    }

    #[test]
    fn product_input_projects_to_product() {
        let pair = project_chain(&DensityMatrix::from_pure(&StateVector::zero(4))).unwrap();
        let expected = DensityMatrix::from_pure(&StateVector::zero(2));
        assert!(linalg::max_abs_diff(pair.matrix(), expected.matrix()) < 1e-15);
        assert_eq!(negativity(&pair).unwrap(), 0.0);
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let rho = random_density(&(0..32).map(|i| ((i * 7919) % 23) as f64 / 11.0 - 1.0).collect::<Vec<_>>());
        for side in [Subsystem::First, Subsystem::Second] {
            let once = DensityMatrix::from_matrix_unchecked(partial_transpose(&rho, side).unwrap()).unwrap();
            let twice = partial_transpose(&once, side).unwrap();
            assert!(linalg::max_abs_diff(&twice, rho.matrix()) < 1e-15);
            assert!((linalg::trace(once.matrix()) - c(1.0)).norm() < 1e-12);
        }
        let product = DensityMatrix::new(linalg::kron_le(random_density(&[0.3; 32]).partial_trace(&[1]).unwrap().matrix(), bell().partial_trace(&[0]).unwrap().matrix())).unwrap();
        let pt = partial_transpose(&product, Subsystem::Second).unwrap();
        assert!(linalg::hermitian_eigenvalues(&pt)[0] > -1e-12);
    }

    #[test]
    fn chain_errors() {
        let g = ring(6);
        assert_eq!(chain_for_pair(&g, (0, 2)), Err(Error::NotAnEdge(0, 2)));
        assert_eq!(chain_for_pair(&ring(3), (0, 1)), Err(Error::NoChain(0, 1)));
        let pair = Graph::new(2, &[0, 1], &[(0, 1)]).unwrap();
        assert_eq!(chain_for_pair(&pair, (0, 1)), Err(Error::NoChain(0, 1)));
    }

    #[test]
    fn ideal_chain_state_is_a_rank_four_state() {
        let rho = ideal_chain_state();
        rho.validate().unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert_eq!(rank(rho.matrix()), 4);
        assert!((rho.purity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ideal_chain_state_matches_ring_marginals() {
        for n in [6, 7, 8] {
            let psi = graph_state(&ring(n));
            let reduced = reduced_density_matrix(&psi, &[0, 1, 2, 3]).unwrap();
            assert!(linalg::max_abs_diff(reduced.matrix(), ideal_chain_state().matrix()) < 1e-12, "ring {n}");
        }
        // interior chain of the 12-cycle on melbourne
        let layout = ring_layout(&device_topology("ibmq_16_melbourne").unwrap(), None).unwrap();
        let cycle = Graph::new(14, &layout.cycle, &(0..12).map(|i| (layout.cycle[i], layout.cycle[(i + 1) % 12])).collect::<Vec<_>>()).unwrap();
        let psi = graph_state(&cycle);
        let reduced = reduced_density_matrix(&psi, &[2, 3, 4, 5]).unwrap();
        assert!(linalg::max_abs_diff(reduced.matrix(), ideal_chain_state().matrix()) < 1e-12);
    }

    #[test]
    fn five_ring_chain_has_an_extra_stabilizer() {
        let psi = graph_state(&ring(5));
        let reduced = reduced_density_matrix(&psi, &[0, 1, 2, 3]).unwrap();
        assert_eq!(rank(reduced.matrix()), 2);
        use Pauli::{X, Z};
        assert!((reduced.pauli_expectation(&[X, Z, Z, X]).unwrap() - 1.0).abs() < 1e-12);
        let pair = project_chain(&reduced).unwrap();
        assert!((negativity(&pair).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projected_chain_is_the_two_vertex_graph_state() {
        let pair = project_chain(&ideal_chain_state()).unwrap();
        let phi = StateVector::from_amplitudes(vec![c(0.5), c(0.5), c(0.5), c(-0.5)]).unwrap();
        assert!(linalg::max_abs_diff(pair.matrix(), DensityMatrix::from_pure(&phi).matrix()) < 1e-12);
        assert!((negativity(&pair).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unreachable_branch_is_rejected() {
        let rho = DensityMatrix::from_pure(&StateVector::basis(4, 0b1001));
        assert!(matches!(project_chain(&rho), Err(Error::ZeroProbabilityBranch(_))));
        assert!(matches!(project_chain(&bell()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_transpose_of_bell() {
        let pt = partial_transpose(&bell(), Subsystem::Second).unwrap();
        // swap operator / 2
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(0.5);
        expected[(3, 3)] = c(0.5);
        expected[(1, 2)] = c(0.5);
        expected[(2, 1)] = c(0.5);
        assert!(linalg::max_abs_diff(&pt, &expected) < 1e-15);
        let ev = linalg::hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn negativity_reference_values() {
        assert!((negativity(&bell()).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(negativity(&DensityMatrix::maximally_mixed(2)).unwrap(), 0.0);
        assert_eq!(negativity(&DensityMatrix::from_pure(&StateVector::basis(2, 2))).unwrap(), 0.0);
        for p in [0.0f64, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let expected = ((3.0 * p - 1.0) / 4.0).max(0.0);
            assert!((negativity(&werner(p)).unwrap() - expected).abs() < 1e-12, "p={p}");
        }
        assert!(matches!(negativity(&ideal_chain_state()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn noiseless_pairs_are_maximally_entangled() {
        for name in ["ibmqx4", "ibmq_16_melbourne"] {
            let topology = device_topology(name).unwrap();
            let graph = ring_layout(&topology, None).unwrap().graph;
            let opts = ScoreOptions { method: ScoreMethod::Exact, shots: 1, trajectories: 1, seed: 3 };
            let scores = score_pairs(&graph, topology.edges(), &NoiseModel::noiseless(), &opts).unwrap();
            assert_eq!(scores.len(), topology.edges().len());
            for s in scores {
                assert!((s.negativity - 0.5).abs() < 1e-10, "{name} {:?}", s.pair);
            }
        }
    }

    #[test]
    fn noiseless_tomography_recovers_maximal_entanglement() {
        let topology = device_topology("ibmqx4").unwrap();
        let graph = ring_layout(&topology, None).unwrap().graph;
        let opts = ScoreOptions { method: ScoreMethod::Tomographed, shots: 8192, trajectories: 1, seed: 9 };
        for s in score_pairs(&graph, topology.edges(), &NoiseModel::noiseless(), &opts).unwrap() {
            assert!(s.negativity > 0.4, "{:?} {}", s.pair, s.negativity);
        }
    }

    #[test]
    fn probe_layouts() {
        let graph = ring_layout(&device_topology("ibmq_16_melbourne").unwrap(), None).unwrap().graph;
        let p = pair_probe(&graph, (0, 1)).unwrap();
        assert_eq!(p.chain, None);
        assert_eq!(p.tomographed, vec![0, 1, 2, 13]);
        assert_eq!(p.projected, vec![2, 3]);
        assert!(p.spectators.is_empty());
        let p = pair_probe(&graph, (1, 2)).unwrap();
        assert_eq!(p.tomographed, vec![0, 1, 2, 3]);
        assert_eq!(p.spectators, vec![13]);
        let p = pair_probe(&graph, (8, 9)).unwrap();
        assert_eq!(p.tomographed, vec![6, 8, 9, 10]);
        assert_eq!(p.spectators, vec![7]);
    }

    #[test]
    fn negativity_degrades_with_two_qubit_noise() {
        let g = ring(6);
        let circuit = build_graph_state_circuit(&g).unwrap();
        let mut last = f64::INFINITY;
        for step in 0..7 {
            let p2 = 0.05 * step as f64;
            let model = NoiseModel::uniform(6, g.edges(), 0.0, p2, 0.0);
            let rho = exact_density_evolution(&circuit, &model).unwrap();
            let n = negativity(&project_chain(&rho.partial_trace(&[0, 1, 2, 3]).unwrap()).unwrap()).unwrap();
            assert!(n < last || (n == 0.0 && last == 0.0), "p2={p2}: {n} after {last}");
            last = n;
        }
        assert!(last < 0.5);
    }

    #[test]
    fn ranking_orders_by_negativity_then_pair() {
        let score = |pair: Edge, negativity| EntanglementScore {
            pair,
            negativity,
            chain: None,
            tomographed: vec![],
            spectators: vec![],
            method: ScoreMethod::Exact,
        };
        assert_eq!(rank_pairs(&[score((0, 1), 0.3), score((2, 3), 0.45)]).unwrap()[0].pair, (2, 3));
        let ranked = rank_pairs(&[score((2, 3), 0.1), score((1, 2), 0.4), score((0, 1), 0.4)]).unwrap();
        let order: Vec<Edge> = ranked.iter().map(|s| s.pair).collect();
        assert_eq!(order, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(rank_pairs(&[]), Err(Error::EmptyInput));
    }

    proptest! {
        #[test]
        fn negativity_is_bounded(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_density(&seed);
            let n = negativity(&rho).unwrap();
            prop_assert!((0.0..=0.5).contains(&n));
            prop_assert!(raw_negativity(&rho).unwrap() <= 0.5 + 1e-9);
        }

        #[test]
        fn either_transpose_gives_the_same_negativity(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_density(&seed);
            let first = linalg::hermitian_eigenvalues(&partial_transpose(&rho, Subsystem::First).unwrap());
            let second = linalg::hermitian_eigenvalues(&partial_transpose(&rho, Subsystem::Second).unwrap());
            for (x, y) in first.iter().zip(&second) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn spectrum_matches_jacobi(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_density(&seed);
            let pt = partial_transpose(&rho, Subsystem::Second).unwrap();
            let ours = linalg::hermitian_eigenvalues(&pt);
            let oracle = jacobi_eigenvalues(&pt);
            for (x, y) in ours.iter().zip(&oracle) {
                prop_assert!((x - y).abs() < 1e-9, "{:?} vs {:?}", ours, oracle);
            }
            let expected: f64 = oracle.iter().filter(|&&v| v < -EIGEN_ZERO).map(|v| -v).sum();
            prop_assert!((negativity(&rho).unwrap() - expected.min(0.5)).abs() < 1e-9);
        }

        #[test]
        fn determinant_witness_agrees(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let rho = random_density(&seed);
            let det = det4(&partial_transpose(&rho, Subsystem::Second).unwrap());
            prop_assume!(det.abs() > 1e-9);
            prop_assert_eq!(negativity(&rho).unwrap() > 0.0, det < 0.0);
        }

        #[test]
        fn local_phases_preserve_negativity(seed in proptest::collection::vec(-1.0f64..1.0, 32), a in 0.0f64..6.3, b in 0.0f64..6.3) {
            let rho = random_density(&seed);
            let u = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::from_polar(1.0, 0.0),
                Complex64::from_polar(1.0, a),
                Complex64::from_polar(1.0, b),
                Complex64::from_polar(1.0, a + b),
            ]));
            let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
            prop_assert!((negativity(&rho).unwrap() - negativity(&rotated).unwrap()).abs() < 1e-9);
        }
    }
}
