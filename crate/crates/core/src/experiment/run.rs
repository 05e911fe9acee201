use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, NOISELESS_PROFILE};
use super::output::write_outputs;
use super::stats::{mean, spearman};
use crate::entanglement::{rank_pairs, score_pairs, EntanglementScore, ScoreMethod, ScoreOptions};
use crate::error::{Error, Result};
use crate::graphstate::{device_topology, ring_layout, Edge, Topology};
use crate::noise::{default_profile_for, load_calibration, NoiseModel};
use crate::rng;
use crate::supercrypt::{protocol_fidelity, standard_error, FidelityEstimate};

/// Unweighted mean fidelity over all measured pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub mean_fidelity: f64,
    /// Standard error of the mean over pairs.
    pub std_error: f64,
}

/// One row of the per-pair table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub pair: Edge,
    pub negativity: f64,
    pub mean_fidelity: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub topology: String,
    pub profile: String,
    pub scores: Vec<EntanglementScore>,
    pub fidelities: Vec<FidelityEstimate>,
    pub selected_pair: Edge,
    pub selected_fidelity: f64,
    pub random_baseline: Baseline,
    pub improvement_percent: f64,
    /// Rank correlation of negativity and fidelity across pairs; absent when
    /// either is constant.
    pub spearman: Option<f64>,
}

impl ExperimentReport {
    pub fn pairs(&self) -> Vec<PairSummary> {
        self.scores
            .iter()
            .zip(&self.fidelities)
            .map(|(s, f)| PairSummary {
                pair: s.pair,
                negativity: s.negativity,
                mean_fidelity: f.mean_fidelity,
                std_error: f.std_error,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { path: "report".into(), message: e.to_string() })
    }
}

/// Resolves the topology and noise model named by `config`.
pub fn load_noise(config: &ExperimentConfig) -> Result<(Topology, String, NoiseModel)> {
    let topology = device_topology(&config.topology_name)?;
    let name = match config.profile.as_str() {
        "" => default_profile_for(topology.name())
            .ok_or_else(|| Error::UnknownProfile(format!("no shipped profile for `{}`", topology.name())))?
            .to_string(),
        other => other.to_string(),
    };
    if name == NOISELESS_PROFILE {
        return Ok((topology, name, NoiseModel::noiseless()));
    }
    let profile = load_calibration(&name)?;
    if profile.topology_name != topology.name() {
        return Err(Error::InvalidConfig(format!(
            "profile `{}` is calibrated for `{}`, not `{}`",
            profile.name,
            profile.topology_name,
            topology.name()
        )));
    }
    Ok((topology, profile.name, profile.noise))
}

/// Runs the experiment without touching the filesystem.
pub fn compute_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let (topology, profile, model) = load_noise(config)?;
    let graph = ring_layout(&topology, None)?.graph;
    let pairs = topology.edges().to_vec();

    let options = ScoreOptions {
        method: if config.tomography.is_on() { ScoreMethod::Tomographed } else { ScoreMethod::Exact },
        shots: config.shots,
        trajectories: config.trajectories,
        seed: rng::derive(config.seed, 0x5c0e),
    };
    let scores = score_pairs(&graph, &pairs, &model, &options)?;
    let fidelities = pairs
        .iter()
        .enumerate()
        .map(|(i, &pair)| {
            let seed = rng::derive(config.seed, 0xf1de_0000 + i as u64);
            protocol_fidelity(pair, &topology, &model, config.shots, config.repeats, seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let selected_pair = rank_pairs(&scores)?[0].pair;
    let per_pair: Vec<f64> = fidelities.iter().map(|f| f.mean_fidelity).collect();
    let selected_fidelity = fidelities.iter().find(|f| f.pair == selected_pair).expect("selected pair is measured").mean_fidelity;
    let baseline = Baseline { mean_fidelity: mean(&per_pair), std_error: standard_error(&per_pair) };
    let negativities: Vec<f64> = scores.iter().map(|s| s.negativity).collect();
    let rho = spearman(&negativities, &per_pair);

    Ok(ExperimentReport {
        config: config.clone(),
        topology: topology.name().to_string(),
        profile,
        improvement_percent: 100.0 * (selected_fidelity - baseline.mean_fidelity) / baseline.mean_fidelity,
        scores,
        fidelities,
        selected_pair,
        selected_fidelity,
        random_baseline: baseline,
        spearman: rho.is_finite().then_some(rho),
    })
}

/// [`compute_experiment`], then writes the report, CSV and charts into
/// [`ExperimentConfig::output_dir`].
pub fn run_full_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = compute_experiment(config)?;
    write_outputs(&report, &config.output_dir())?;
    Ok(report)
}
