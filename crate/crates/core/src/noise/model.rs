use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstate::{device_topology, Topology};

/// Per-gate depolarizing and per-qubit readout parameters. Entries that are
/// absent read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseModel {
    p1: BTreeMap<usize, f64>,
    p2: BTreeMap<(usize, usize), f64>,
    readout: BTreeMap<usize, f64>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn check_probability(what: impl FnOnce() -> String, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::ProbabilityOutOfRange { what: what(), value });
    }
    Ok(())
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Same probabilities on every qubit of `0..num_qubits` and every edge.
    pub fn uniform(num_qubits: usize, edges: &[(usize, usize)], p1: f64, p2: f64, readout: f64) -> Self {
        let mut m = Self::default();
        for q in 0..num_qubits {
            m.p1.insert(q, p1);
            m.readout.insert(q, readout);
        }
        for &(a, b) in edges {
            m.p2.insert(edge_key(a, b), p2);
        }
        m
    }

    pub fn p1(&self, q: usize) -> f64 {
        self.p1.get(&q).copied().unwrap_or(0.0)
    }

    pub fn p2(&self, a: usize, b: usize) -> f64 {
        self.p2.get(&edge_key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn readout(&self, q: usize) -> f64 {
        self.readout.get(&q).copied().unwrap_or(0.0)
    }

    /// Readout flip probabilities indexed by qubit for a register of `n`.
    pub fn readout_vector(&self, n: usize) -> Vec<f64> {
        (0..n).map(|q| self.readout(q)).collect()
    }

    pub fn set_p1(&mut self, q: usize, p: f64) -> Result<&mut Self> {
        check_probability(|| format!("p1[{q}]"), p)?;
        self.p1.insert(q, p);
        Ok(self)
    }

    pub fn set_p2(&mut self, a: usize, b: usize, p: f64) -> Result<&mut Self> {
        check_probability(|| format!("p2[{a}-{b}]"), p)?;
        self.p2.insert(edge_key(a, b), p);
        Ok(self)
    }

    pub fn set_readout(&mut self, q: usize, p: f64) -> Result<&mut Self> {
        check_probability(|| format!("readout[{q}]"), p)?;
        self.readout.insert(q, p);
        Ok(self)
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1.values().chain(self.p2.values()).chain(self.readout.values()).all(|&p| p == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (q, &p) in &self.p1 {
            check_probability(|| format!("p1[{q}]"), p)?;
        }
        for ((a, b), &p) in &self.p2 {
            check_probability(|| format!("p2[{a}-{b}]"), p)?;
        }
        for (q, &p) in &self.readout {
            check_probability(|| format!("readout[{q}]"), p)?;
        }
        Ok(())
    }

    /// Re-indexes onto a compact register where local qubit `i` was
    /// `original[i]`.
    pub fn remap(&self, original: &[usize]) -> NoiseModel {
        let mut m = NoiseModel::default();
        for (new, &old) in original.iter().enumerate() {
            m.p1.insert(new, self.p1(old));
            m.readout.insert(new, self.readout(old));
            for (new_b, &old_b) in original.iter().enumerate().skip(new + 1) {
                let p = self.p2(old, old_b);
                if p > 0.0 {
                    m.p2.insert((new, new_b), p);
                }
            }
        }
        m
    }

    pub fn p1_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.p1.iter().map(|(&q, &p)| (q, p))
    }

    pub fn p2_entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.p2.iter().map(|(&e, &p)| (e, p))
    }

    pub fn readout_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.readout.iter().map(|(&q, &p)| (q, p))
    }
}

/// A named noise model bound to a device topology.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationProfile {
    pub name: String,
    pub topology_name: String,
    pub noise: NoiseModel,
}

/// On-disk profile document:
/// `{name, topology, p1: {"q": p}, p2: {"i-j": p}, readout: {"q": p}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub name: String,
    pub topology: String,
    #[serde(default)]
    pub p1: BTreeMap<String, f64>,
    #[serde(default)]
    pub p2: BTreeMap<String, f64>,
    #[serde(default)]
    pub readout: BTreeMap<String, f64>,
}

const SHIPPED: &[(&str, &str)] = &[
    ("ibmqx4-like", include_str!("../../profiles/ibmqx4-like.json")),
    ("melbourne-like", include_str!("../../profiles/melbourne-like.json")),
];

pub fn shipped_profile_names() -> Vec<&'static str> {
    SHIPPED.iter().map(|(n, _)| *n).collect()
}

/// The shipped profile calibrated for a shipped topology, if any.
pub fn default_profile_for(topology_name: &str) -> Option<&'static str> {
    match topology_name {
        "ibmqx4" => Some("ibmqx4-like"),
        "ibmq_16_melbourne" => Some("melbourne-like"),
        _ => None,
    }
}

/// Loads a shipped profile by name, or a profile document from a path.
pub fn load_calibration(name: &str) -> Result<CalibrationProfile> {
    if let Some((_, text)) = SHIPPED.iter().find(|(n, _)| *n == name) {
        return parse_profile(text, name);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(Error::UnknownProfile(name.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: name.to_string(), message: e.to_string() })?;
    parse_profile(&text, name)
}

pub fn parse_profile(text: &str, origin: &str) -> Result<CalibrationProfile> {
    let doc: ProfileDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })?;
    profile_from_document(doc)
}

pub fn profile_from_document(doc: ProfileDocument) -> Result<CalibrationProfile> {
    let topology = device_topology(&doc.topology)?;
    let parse_qubit = |key: &str| -> Result<usize> {
        let q: usize = key.trim().parse().map_err(|_| Error::InvalidProfile(format!("bad qubit key `{key}`")))?;
        if q >= topology.num_qubits() {
            return Err(Error::InvalidProfile(format!("qubit {q} not in topology `{}`", topology.name())));
        }
        Ok(q)
    };
    let mut noise = NoiseModel::default();
    for (k, &p) in &doc.p1 {
        noise.set_p1(parse_qubit(k)?, p)?;
    }
    for (k, &p) in &doc.readout {
        noise.set_readout(parse_qubit(k)?, p)?;
    }
    for (k, &p) in &doc.p2 {
        let (a, b) = k
            .split_once('-')
            .ok_or_else(|| Error::InvalidProfile(format!("bad edge key `{k}`, expected `i-j`")))?;
        let (a, b) = (parse_qubit(a)?, parse_qubit(b)?);
        if !topology.has_edge(a, b) {
            return Err(Error::InvalidProfile(format!("edge {a}-{b} not in topology `{}`", topology.name())));
        }
        noise.set_p2(a, b, p)?;
    }
    Ok(CalibrationProfile { name: doc.name, topology_name: doc.topology, noise })
}

impl CalibrationProfile {
    pub fn to_document(&self) -> ProfileDocument {
        ProfileDocument {
            name: self.name.clone(),
            topology: self.topology_name.clone(),
            p1: self.noise.p1_entries().map(|(q, p)| (q.to_string(), p)).collect(),
            p2: self.noise.p2_entries().map(|((a, b), p)| (format!("{a}-{b}"), p)).collect(),
            readout: self.noise.readout_entries().map(|(q, p)| (q.to_string(), p)).collect(),
        }
    }

    pub fn topology(&self) -> Result<Topology> {
        device_topology(&self.topology_name)
    }
}
