//! Architecture modeling: QPU profiles, optical network topology, circuit
//! partition and subcircuit-to-QPU mapping, plus the five shipped presets
//! used by the benchmarking matrix.

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::noise::DeviceNoiseProfile;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One quantum processing unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpuProfile {
    pub id: String,
    pub num_qubits: usize,
    /// Undirected coupling pairs; empty means all-to-all.
    pub coupling_map: Vec<(usize, usize)>,
    pub basis_gates: Vec<GateKind>,
    pub noise: DeviceNoiseProfile,
}

impl QpuProfile {
    pub fn is_all_to_all(&self) -> bool {
        self.coupling_map.is_empty()
    }

    pub fn coupled(&self, a: usize, b: usize) -> bool {
        self.is_all_to_all()
            || self
                .coupling_map
                .iter()
                .any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// The two-qubit entangler this backend's basis provides.
    pub fn entangler(&self) -> Option<GateKind> {
        if self.basis_gates.contains(&GateKind::CX) {
            Some(GateKind::CX)
        } else if self.basis_gates.contains(&GateKind::RXX) {
            Some(GateKind::RXX)
        } else {
            None
        }
    }

    fn validate(&self) -> Result<()> {
        for &(a, b) in &self.coupling_map {
            if a >= self.num_qubits || b >= self.num_qubits {
                return Err(Error::Schema(format!(
                    "qpu {}: coupling pair ({a},{b}) out of range",
                    self.id
                )));
            }
            if a == b {
                return Err(Error::Schema(format!(
                    "qpu {}: self-loop in coupling map on qubit {a}",
                    self.id
                )));
            }
        }
        for g in &self.basis_gates {
            if !g.is_unitary() {
                return Err(Error::Schema(format!(
                    "qpu {}: `{}` is not a basis gate",
                    self.id,
                    g.name()
                )));
            }
        }
        // Universality: a two-qubit entangler plus a single-qubit rotation
        // family the transpiler can target.
        let has_1q_family = (self.basis_gates.contains(&GateKind::RZ)
            && self.basis_gates.contains(&GateKind::SX)
            && self.basis_gates.contains(&GateKind::X))
            || (self.basis_gates.contains(&GateKind::RX)
                && self.basis_gates.contains(&GateKind::RY)
                && self.basis_gates.contains(&GateKind::RZ));
        if self.entangler().is_none() || !has_1q_family {
            return Err(Error::Schema(format!(
                "qpu {}: basis gates {:?} are not a supported universal set",
                self.id,
                self.basis_gates.iter().map(|g| g.name()).collect::<Vec<_>>()
            )));
        }
        self.noise.validate()
    }
}

/// Optical link between two QPUs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub a: String,
    pub b: String,
    pub length_km: f64,
}

/// Optical network: edge list plus the attenuation coefficient used by the
/// transmissivity model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub alpha: f64,
    #[serde(default)]
    pub edges: Vec<NetworkEdge>,
}

impl NetworkTopology {
    pub fn edge_between(&self, a: &str, b: &str) -> Option<&NetworkEdge> {
        self.edges
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }

    pub fn neighbors<'a>(&'a self, qpu: &'a str) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        self.edges.iter().filter_map(move |e| {
            if e.a == qpu {
                Some((e.b.as_str(), e.length_km))
            } else if e.b == qpu {
                Some((e.a.as_str(), e.length_km))
            } else {
                None
            }
        })
    }

    pub fn has_edges(&self, qpu: &str) -> bool {
        self.edges.iter().any(|e| e.a == qpu || e.b == qpu)
    }
}

/// User-facing P and M: data-qubit → partition-id, partition-id → qpu-id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionMap {
    /// Partition id per data qubit of the monolithic circuit.
    pub qubits: Vec<usize>,
    /// QPU id per partition.
    pub mapping: Vec<String>,
}

impl PartitionMap {
    pub fn num_partitions(&self) -> usize {
        self.mapping.len()
    }

    pub fn qpu_of_data_qubit<'a>(&'a self, qubit: usize) -> &'a str {
        &self.mapping[self.qubits[qubit]]
    }

    /// Data qubits of one partition, in index order.
    pub fn partition_qubits(&self, partition: usize) -> Vec<usize> {
        self.qubits
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == partition)
            .map(|(q, _)| q)
            .collect()
    }
}

/// The full architecture input: Q, N and optionally P/M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureSpec {
    /// Display name used in reports (preset name, file stem, or custom).
    #[serde(default)]
    pub name: String,
    pub qpus: Vec<QpuProfile>,
    pub network: NetworkTopology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionMap>,
}

impl ArchitectureSpec {
    pub fn from_toml(text: &str) -> Result<ArchitectureSpec> {
        let spec: ArchitectureSpec =
            toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("architecture serialization cannot fail")
    }

    /// Load from a shipped preset name (`arch-a` .. `arch-e`) or a config
    /// file path.
    pub fn load(name_or_path: &str) -> Result<ArchitectureSpec> {
        if let Some(preset) = presets::get(name_or_path) {
            return Ok(preset);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(Error::Schema(format!(
                "`{name_or_path}` is neither a preset ({}) nor an existing file",
                presets::NAMES.join(", ")
            )));
        }
        let mut spec = ArchitectureSpec::from_toml(&std::fs::read_to_string(path)?)?;
        if spec.name.is_empty() {
            spec.name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| name_or_path.to_string());
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qpus.is_empty() {
            return Err(Error::Schema("at least one QPU required".into()));
        }
        let mut ids = std::collections::HashSet::new();
        for qpu in &self.qpus {
            qpu.validate()?;
            if !ids.insert(qpu.id.as_str()) {
                return Err(Error::Schema(format!("duplicate QPU id `{}`", qpu.id)));
            }
        }
        if self.network.alpha < 0.0 {
            return Err(Error::Schema("alpha must be non-negative".into()));
        }
        for edge in &self.network.edges {
            if edge.a == edge.b {
                return Err(Error::Schema(format!("self-loop edge on `{}`", edge.a)));
            }
            if edge.length_km <= 0.0 {
                return Err(Error::Schema(format!(
                    "edge {}-{} has non-positive length",
                    edge.a, edge.b
                )));
            }
            for end in [&edge.a, &edge.b] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::Schema(format!("edge references unknown QPU `{end}`")));
                }
            }
        }
        if let Some(pm) = &self.partition {
            self.validate_partition_shape(pm)?;
        }
        Ok(())
    }

    /// Shape checks on a partition map: contiguous ids, known QPU targets,
    /// one QPU per partition, per-QPU qubit counts within raw capacity. The
    /// tighter capacity check including communication qubits happens after
    /// the constructor's allocation step.
    pub fn validate_partition_shape(&self, pm: &PartitionMap) -> Result<()> {
        for &p in &pm.qubits {
            if p >= pm.mapping.len() {
                return Err(Error::Schema(format!(
                    "partition id {p} has no mapping entry"
                )));
            }
        }
        for p in 0..pm.mapping.len() {
            if !pm.qubits.contains(&p) {
                return Err(Error::Schema(format!("partition {p} is empty (ids must be contiguous and used)")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (p, qpu_id) in pm.mapping.iter().enumerate() {
            let qpu = self.qpu(qpu_id)?;
            if !seen.insert(qpu_id.clone()) {
                return Err(Error::Schema(format!(
                    "QPU `{qpu_id}` is the target of more than one partition"
                )));
            }
            let count = pm.qubits.iter().filter(|&&x| x == p).count();
            if count > qpu.num_qubits {
                return Err(Error::Capacity(format!(
                    "partition {p} has {count} qubits but QPU `{qpu_id}` has only {}",
                    qpu.num_qubits
                )));
            }
        }
        Ok(())
    }

    pub fn qpu(&self, id: &str) -> Result<&QpuProfile> {
        self.qpus
            .iter()
            .find(|q| q.id == id)
            .ok_or_else(|| Error::Schema(format!("unknown QPU id `{id}`")))
    }

    /// Copy with every optical edge set to the given length.
    pub fn with_distance(&self, length_km: f64) -> ArchitectureSpec {
        let mut spec = self.clone();
        for edge in &mut spec.network.edges {
            edge.length_km = length_km;
        }
        spec
    }

    /// Copy with all device noise zeroed (noise-free validation runs).
    pub fn with_zero_noise(&self) -> ArchitectureSpec {
        let mut spec = self.clone();
        for qpu in &mut spec.qpus {
            qpu.noise = DeviceNoiseProfile::ZERO;
        }
        spec
    }
}

/// Strategy for computing a partition when none is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// Contiguous fill: qubits in index order to QPUs in declaration order.
    Default,
    /// Contiguous blocks sized proportionally to noise-weighted capacity, so
    /// multi-QPU architectures actually distribute work.
    Balanced,
}

fn comm_reserve_capacities(spec: &ArchitectureSpec, data_qubits: usize) -> Result<Vec<usize>> {
    // Reserve communication qubits pessimistically (2 per networked QPU);
    // relax to 1 when total capacity would not fit the circuit. Actual comm
    // needs are validated after the constructor's allocation step.
    for reserve in [2usize, 1] {
        let caps: Vec<usize> = spec
            .qpus
            .iter()
            .map(|q| {
                let r = if spec.network.has_edges(&q.id) { reserve } else { 0 };
                q.num_qubits.saturating_sub(r)
            })
            .collect();
        if caps.iter().sum::<usize>() >= data_qubits {
            return Ok(caps);
        }
    }
    Err(Error::Capacity(format!(
        "{data_qubits} data qubits exceed total usable QPU capacity (with 1 comm qubit reserved per networked QPU)"
    )))
}

fn blocks_to_partition(spec: &ArchitectureSpec, blocks: &[usize], n: usize) -> PartitionMap {
    let mut qubits = Vec::with_capacity(n);
    let mut mapping = Vec::new();
    for (qpu, &count) in spec.qpus.iter().zip(blocks) {
        if count == 0 {
            continue;
        }
        let pid = mapping.len();
        mapping.push(qpu.id.clone());
        qubits.extend(std::iter::repeat(pid).take(count));
    }
    PartitionMap { qubits, mapping }
}

/// Contiguous-fill partition: assign data qubits in index order to QPUs in
/// declaration order, each networked QPU reserving communication headroom.
pub fn default_partition(circuit: &Circuit, spec: &ArchitectureSpec) -> Result<PartitionMap> {
    let n = circuit.data_qubits().count();
    let caps = comm_reserve_capacities(spec, n)?;
    let mut blocks = vec![0usize; spec.qpus.len()];
    let mut remaining = n;
    for (i, &cap) in caps.iter().enumerate() {
        let take = cap.min(remaining);
        blocks[i] = take;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    Ok(blocks_to_partition(spec, &blocks, n))
}

/// Quality-weighted balanced partition: block sizes proportional to
/// `capacity / two-qubit error rate`, largest-remainder rounding, clamped to
/// per-QPU capacity.
pub fn balanced_partition(circuit: &Circuit, spec: &ArchitectureSpec) -> Result<PartitionMap> {
    let n = circuit.data_qubits().count();
    let caps = comm_reserve_capacities(spec, n)?;
    const EPS: f64 = 1e-6;
    let weights: Vec<f64> = spec
        .qpus
        .iter()
        .zip(&caps)
        .map(|(q, &cap)| cap as f64 / (q.noise.p2 + EPS))
        .collect();
    let total_w: f64 = weights.iter().sum();
    if total_w <= 0.0 {
        return default_partition(circuit, spec);
    }

    let ideal: Vec<f64> = weights.iter().map(|w| n as f64 * w / total_w).collect();
    let mut blocks: Vec<usize> = ideal
        .iter()
        .zip(&caps)
        .map(|(x, &cap)| (x.floor() as usize).min(cap))
        .collect();
    // Largest-remainder distribution of the leftover, respecting capacity.
    let mut assigned: usize = blocks.iter().sum();
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    while assigned < n {
        let mut progressed = false;
        for &i in &order {
            if assigned == n {
                break;
            }
            if blocks[i] < caps[i] {
                blocks[i] += 1;
                assigned += 1;
                progressed = true;
            }
        }
        if !progressed {
            return Err(Error::Capacity(format!(
                "cannot place {n} data qubits within usable capacity"
            )));
        }
    }
    Ok(blocks_to_partition(spec, &blocks, n))
}

pub fn partition_with_strategy(
    circuit: &Circuit,
    spec: &ArchitectureSpec,
    strategy: PartitionStrategy,
) -> Result<PartitionMap> {
    match strategy {
        PartitionStrategy::Default => default_partition(circuit, spec),
        PartitionStrategy::Balanced => balanced_partition(circuit, spec),
    }
}

pub mod presets {
    //! The five benchmarking architectures. Device noise profiles are
    //! parameterized surrogates (not vendor calibration data) chosen to
    //! preserve the qualitative error-rate ordering between backend types;
    //! every value can be overridden through a config file.

    use super::*;

    pub const NAMES: [&str; 5] = ["arch-a", "arch-b", "arch-c", "arch-d", "arch-e"];

    pub const DEFAULT_DISTANCE_KM: f64 = 0.2;
    pub const DEFAULT_ALPHA: f64 = 0.05;

    fn cambridge_like(id: &str) -> QpuProfile {
        // 28-qubit ring with three chords; stand-in for a large, noisier
        // superconducting device.
        let mut coupling: Vec<(usize, usize)> = (0..28).map(|i| (i, (i + 1) % 28)).collect();
        coupling.extend([(2, 16), (6, 20), (10, 24)]);
        QpuProfile {
            id: id.to_string(),
            num_qubits: 28,
            coupling_map: coupling,
            basis_gates: vec![GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX],
            noise: DeviceNoiseProfile {
                p1: 1e-3,
                p2: 2e-2,
                p_ro: 3e-2,
                p_reset: 0.0,
            },
        }
    }

    fn vigo_like(id: &str) -> QpuProfile {
        // 5-qubit T-shaped coupling; small, lower-noise superconducting
        // device.
        QpuProfile {
            id: id.to_string(),
            num_qubits: 5,
            coupling_map: vec![(0, 1), (1, 2), (1, 3), (3, 4)],
            basis_gates: vec![GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX],
            noise: DeviceNoiseProfile {
                p1: 5e-4,
                p2: 7e-3,
                p_ro: 2e-2,
                p_reset: 0.0,
            },
        }
    }

    fn aria_like(id: &str) -> QpuProfile {
        // 25-qubit all-to-all trapped-ion device with native RXX entangler.
        QpuProfile {
            id: id.to_string(),
            num_qubits: 25,
            coupling_map: Vec::new(),
            basis_gates: vec![GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::RXX],
            noise: DeviceNoiseProfile {
                p1: 5e-4,
                p2: 4e-3,
                p_ro: 5e-3,
                p_reset: 0.0,
            },
        }
    }

    fn edge(a: &str, b: &str) -> NetworkEdge {
        NetworkEdge {
            a: a.to_string(),
            b: b.to_string(),
            length_km: DEFAULT_DISTANCE_KM,
        }
    }

    pub fn get(name: &str) -> Option<ArchitectureSpec> {
        let mut spec = match name {
            // Monolithic baseline: one large, noisier QPU, no network.
            "arch-a" => ArchitectureSpec {
                qpus: vec![cambridge_like("cambridge-0")],
                network: NetworkTopology {
                    alpha: DEFAULT_ALPHA,
                    edges: Vec::new(),
                },
                partition: None,
                name: String::new(),
            },
            // Four small homogeneous QPUs, fully connected optical network.
            "arch-b" => {
                let ids = ["vigo-0", "vigo-1", "vigo-2", "vigo-3"];
                let mut edges = Vec::new();
                for i in 0..4 {
                    for j in i + 1..4 {
                        edges.push(edge(ids[i], ids[j]));
                    }
                }
                ArchitectureSpec {
                    qpus: ids.iter().map(|id| vigo_like(id)).collect(),
                    network: NetworkTopology {
                        alpha: DEFAULT_ALPHA,
                        edges,
                    },
                    partition: None,
                    name: String::new(),
                }
            }
            // Heterogeneous backend types: superconducting + trapped ion.
            "arch-c" => ArchitectureSpec {
                qpus: vec![cambridge_like("cambridge-0"), aria_like("aria-0")],
                network: NetworkTopology {
                    alpha: DEFAULT_ALPHA,
                    edges: vec![edge("cambridge-0", "aria-0")],
                },
                partition: None,
                name: String::new(),
            },
            // Heterogeneous sizes: large noisy QPU + small low-noise QPU.
            "arch-d" => ArchitectureSpec {
                qpus: vec![cambridge_like("cambridge-0"), vigo_like("vigo-0")],
                network: NetworkTopology {
                    alpha: DEFAULT_ALPHA,
                    edges: vec![edge("cambridge-0", "vigo-0")],
                },
                partition: None,
                name: String::new(),
            },
            // Two identical large QPUs.
            "arch-e" => ArchitectureSpec {
                qpus: vec![cambridge_like("cambridge-0"), cambridge_like("cambridge-1")],
                network: NetworkTopology {
                    alpha: DEFAULT_ALPHA,
                    edges: vec![edge("cambridge-0", "cambridge-1")],
                },
                partition: None,
                name: String::new(),
            },
            _ => return None,
        };
        spec.name = name.to_string();
        debug_assert!(spec.validate().is_ok());
        Some(spec)
    }
}
