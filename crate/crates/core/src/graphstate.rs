//! Device coupling maps, ring embeddings, graph-state circuits and the
//! stabilizers `K_a = X_a prod_{b in N(a)} Z_b` that certify them.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Pauli;
use crate::noise::{average_probes, NoiseModel, Probe};
use crate::qsim::{run_circuit, Circuit, DensityMatrix, GateOp, StateVector};

/// Normalised undirected edge, `0 < 1`.
pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

/// A device coupling map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    name: String,
    num_qubits: usize,
    edges: Vec<Edge>,
    ring_hint: Option<Vec<usize>>,
}

/// Custom topology document: `{name, num_qubits, edges: [[i, j], ...]}` with
/// an optional explicit `ring` vertex order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDocument {
    pub name: String,
    pub num_qubits: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Vec<usize>>,
}

pub const SHIPPED_TOPOLOGIES: [&str; 2] = ["ibmqx4", "ibmq_16_melbourne"];

impl Topology {
    pub fn new(name: &str, num_qubits: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on qubit {a}")));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(Error::InvalidTopology(format!("edge ({a}, {b}) outside {num_qubits} qubits")));
            }
            set.insert(edge(a, b));
        }
        Ok(Self { name: name.to_string(), num_qubits, edges: set.into_iter().collect(), ring_hint: None })
    }

    /// Attaches an explicit ring vertex order used by [`ring_layout`].
    pub fn with_ring(mut self, order: Vec<usize>) -> Self {
        self.ring_hint = Some(order);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Sorted, normalised edges.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn ring_hint(&self) -> Option<&[usize]> {
        self.ring_hint.as_deref()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&edge(a, b)).is_ok()
    }

    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        neighbors_in(&self.edges, q)
    }

    pub fn to_document(&self) -> TopologyDocument {
        TopologyDocument {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            ring: self.ring_hint.clone(),
        }
    }

    pub fn from_document(doc: &TopologyDocument) -> Result<Self> {
        let edges: Vec<Edge> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        let t = Self::new(&doc.name, doc.num_qubits, &edges)?;
        Ok(match &doc.ring {
            Some(order) => t.with_ring(order.clone()),
            None => t,
        })
    }
}

fn neighbors_in(edges: &[Edge], q: usize) -> Vec<usize> {
    let mut n: Vec<usize> = edges
        .iter()
        .filter_map(|&(a, b)| if a == q { Some(b) } else if b == q { Some(a) } else { None })
        .collect();
    n.sort_unstable();
    n
}

/// Shipped coupling maps, or a custom topology document at a path.
///
/// The shipped edge sets are exactly the measured qubit pairs of the two
/// devices.
pub fn device_topology(name: &str) -> Result<Topology> {
    match name {
        "ibmqx4" => Ok(Topology::new(name, 5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])?
            // no simple cycle covers all five qubits; the ring is the 2-3-4
            // triangle with 0 and 1 attached through their listed edges
            .with_ring(vec![2, 3, 4])),
        "ibmq_16_melbourne" => Topology::new(
            name,
            14,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 8),
                (7, 8),
                (8, 9),
                (9, 10),
                (10, 11),
                (11, 12),
                (12, 13),
                (13, 1),
            ],
        ),
        other => {
            let path = Path::new(other);
            if !path.is_file() {
                return Err(Error::UnknownTopology(other.to_string()));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io { path: other.to_string(), message: e.to_string() })?;
            let doc: TopologyDocument = serde_json::from_str(&text)
                .map_err(|e| Error::Parse { path: other.to_string(), message: e.to_string() })?;
            Topology::from_document(&doc)
        }
    }
}

/// Graph `G(V, E)` over device qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    num_qubits: usize,
    vertices: Vec<usize>,
    edges: Vec<Edge>,
}

impl Graph {
    /// `num_qubits` is the size of the register the graph lives on.
    pub fn new(num_qubits: usize, vertices: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        let vset: BTreeSet<usize> = vertices.iter().copied().collect();
        if let Some(&v) = vset.iter().find(|&&v| v >= num_qubits) {
            return Err(Error::QubitOutOfRange { index: v, num_qubits });
        }
        let mut eset = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on vertex {a}")));
            }
            if !vset.contains(&a) || !vset.contains(&b) {
                return Err(Error::InvalidTopology(format!("edge ({a}, {b}) leaves the vertex set")));
            }
            eset.insert(edge(a, b));
        }
        Ok(Self { num_qubits, vertices: vset.into_iter().collect(), edges: eset.into_iter().collect() })
    }

    /// The whole coupling map as a graph.
    pub fn from_topology(topology: &Topology) -> Self {
        Self {
            num_qubits: topology.num_qubits(),
            vertices: (0..topology.num_qubits()).collect(),
            edges: topology.edges().to_vec(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&edge(a, b)).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        neighbors_in(&self.edges, v)
    }

    pub fn stabilizer(&self, vertex: usize) -> StabilizerOperator {
        StabilizerOperator { vertex, neighbors: self.neighbors(vertex) }
    }

    pub fn stabilizers(&self) -> Vec<StabilizerOperator> {
        self.vertices.iter().map(|&v| self.stabilizer(v)).collect()
    }
}

/// `K_a`: X on `vertex`, Z on each neighbour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerOperator {
    pub vertex: usize,
    pub neighbors: Vec<usize>,
}

impl StabilizerOperator {
    /// `(qubit, pauli)` terms, vertex first.
    pub fn terms(&self) -> Vec<(usize, Pauli)> {
        std::iter::once((self.vertex, Pauli::X)).chain(self.neighbors.iter().map(|&b| (b, Pauli::Z))).collect()
    }

    /// The qubits the operator acts on, vertex first.
    pub fn support(&self) -> Vec<usize> {
        self.terms().into_iter().map(|(q, _)| q).collect()
    }
}

/// Ring embedding of a topology: a simple cycle plus every remaining
/// coupling edge attached to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingLayout {
    pub cycle: Vec<usize>,
    pub attached: Vec<Edge>,
    pub graph: Graph,
}

/// Ring graph of a topology (the cycle with its attached edges).
pub fn ring_graph(topology: &Topology) -> Result<Graph> {
    Ok(ring_layout(topology, None)?.graph)
}

/// Resolves the ring: `order` if given, else the topology's own hint, else
/// the longest simple cycle found by exhaustive search (ties go to the
/// lexicographically smallest canonical rotation).
pub fn ring_layout(topology: &Topology, order: Option<&[usize]>) -> Result<RingLayout> {
    let cycle = match order.or(topology.ring_hint()) {
        Some(order) => {
            check_cycle(topology, order)?;
            order.to_vec()
        }
        None => longest_cycle(topology).ok_or_else(|| Error::NoCycle(topology.name().to_string()))?,
    };
    let ring_edges: BTreeSet<Edge> =
        (0..cycle.len()).map(|i| edge(cycle[i], cycle[(i + 1) % cycle.len()])).collect();
    let attached: Vec<Edge> = topology.edges().iter().copied().filter(|e| !ring_edges.contains(e)).collect();
    let mut vertices: BTreeSet<usize> = cycle.iter().copied().collect();
    for &(a, b) in &attached {
        vertices.insert(a);
        vertices.insert(b);
    }
    let all: Vec<Edge> = ring_edges.iter().chain(&attached).copied().collect();
    let graph = Graph::new(topology.num_qubits(), &vertices.into_iter().collect::<Vec<_>>(), &all)?;
    Ok(RingLayout { cycle, attached, graph })
}

fn check_cycle(topology: &Topology, order: &[usize]) -> Result<()> {
    let distinct: BTreeSet<_> = order.iter().collect();
    if order.len() < 3 || distinct.len() != order.len() {
        return Err(Error::InvalidTopology(format!("ring order {order:?} is not a simple cycle")));
    }
    for i in 0..order.len() {
        let (a, b) = (order[i], order[(i + 1) % order.len()]);
        if !topology.has_edge(a, b) {
            return Err(Error::NotAnEdge(a, b));
        }
    }
    Ok(())
}

fn longest_cycle(topology: &Topology) -> Option<Vec<usize>> {
    let n = topology.num_qubits();
    let adj: Vec<Vec<usize>> = (0..n).map(|q| topology.neighbors(q)).collect();
    let mut best: Option<Vec<usize>> = None;
    // every cycle is enumerated from its smallest vertex
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        extend_cycle(&adj, start, &mut path, &mut on_path, &mut best);
    }
    best
}

fn extend_cycle(
    adj: &[Vec<usize>],
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    best: &mut Option<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    for &next in &adj[last] {
        if next == start && path.len() >= 3 && path[1] < last {
            let better = match best {
                None => true,
                Some(b) => path.len() > b.len() || (path.len() == b.len() && *path < *b),
            };
            if better {
                *best = Some(path.clone());
            }
        } else if next > start && !on_path[next] {
            on_path[next] = true;
            path.push(next);
            extend_cycle(adj, start, path, on_path, best);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// Hadamard on every vertex, then one CZ per edge in sorted order.
pub fn build_graph_state_circuit(graph: &Graph) -> Result<Circuit> {
    if graph.vertices().is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut circuit = Circuit::new(graph.num_qubits());
    for &v in graph.vertices() {
        circuit.push(GateOp::H(v))?;
    }
    for &(a, b) in graph.edges() {
        circuit.push(GateOp::Cz(a, b))?;
    }
    Ok(circuit)
}

/// `<psi| K_a |psi>`.
pub fn stabilizer_expectation(state: &StateVector, stab: &StabilizerOperator) -> Result<f64> {
    state.pauli_expectation(&stab.terms())
}

/// `Tr(rho K_a)` for `rho` reduced onto `stab.support()` in that order.
pub fn stabilizer_expectation_reduced(rho: &DensityMatrix, stab: &StabilizerOperator) -> Result<f64> {
    let letters: Vec<Pauli> = stab.terms().into_iter().map(|(_, p)| p).collect();
    rho.pauli_expectation(&letters)
}

/// `<K_a>` for every vertex of `graph` after preparing its graph state under
/// `model`: exact for a noiseless model, otherwise a trajectory average.
pub fn stabilizer_expectations(
    graph: &Graph,
    model: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let circuit = build_graph_state_circuit(graph)?;
    let stabs = graph.stabilizers();
    if model.is_noiseless() {
        let state = run_circuit(&circuit, &StateVector::zero(graph.num_qubits()))?;
        return stabs.iter().map(|k| Ok((k.vertex, stabilizer_expectation(&state, k)?))).collect();
    }
    let probes: Vec<Probe> = stabs.iter().map(|k| Probe::keep(&k.support())).collect();
    let reduced = average_probes(&circuit, model, &probes, trajectories, seed)?;
    stabs
        .iter()
        .zip(reduced)
        .map(|(k, m)| Ok((k.vertex, stabilizer_expectation_reduced(&DensityMatrix::from_matrix_unchecked(m)?, k)?)))
        .collect()
}
