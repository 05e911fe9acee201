//! Shared fixtures for the benchmarks.

use qpair_core::graphstate::{build_graph_state_circuit, device_topology, ring_layout, Graph};
use qpair_core::noise::{default_profile_for, load_calibration, NoiseModel};
use qpair_core::{Circuit, Topology};

pub const MELBOURNE: &str = "ibmq_16_melbourne";

pub struct Fixture {
    pub topology: Topology,
    pub graph: Graph,
    pub circuit: Circuit,
    pub model: NoiseModel,
}

/// Device graph state with the device's shipped calibration.
pub fn fixture(name: &str) -> Fixture {
    let topology = device_topology(name).expect("shipped topology");
    let graph = ring_layout(&topology, None).expect("ring layout").graph;
    let circuit = build_graph_state_circuit(&graph).expect("graph state circuit");
    let profile = default_profile_for(name).expect("shipped profile");
    let model = load_calibration(profile).expect("shipped calibration").noise;
    Fixture { topology, graph, circuit, model }
}
