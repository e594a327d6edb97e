//! Communication-integrated noise model: optical-loss transmissivity on EPR
//! links plus per-QPU device noise assigned to the assembled circuit.

use crate::arch::ArchitectureSpec;
use crate::assembler::AssembledCircuit;
use crate::circuit::GateKind;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameterized device calibration surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceNoiseProfile {
    /// Single-qubit depolarizing probability per gate.
    pub p1: f64,
    /// Two-qubit depolarizing probability per gate.
    pub p2: f64,
    /// Readout bit-flip probability per measurement.
    pub p_ro: f64,
    /// Reset error probability (qubit left unreset).
    #[serde(default)]
    pub p_reset: f64,
}

impl DeviceNoiseProfile {
    pub const ZERO: DeviceNoiseProfile = DeviceNoiseProfile {
        p1: 0.0,
        p2: 0.0,
        p_ro: 0.0,
        p_reset: 0.0,
    };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p_ro", self.p_ro),
            ("p_reset", self.p_reset),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Schema(format!("noise probability {name}={v} outside [0,1]")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.p_ro == 0.0 && self.p_reset == 0.0
    }
}

/// Optical channel transmissivity eta = exp(-alpha * L).
pub fn transmissivity(alpha: f64, length_km: f64) -> Result<f64> {
    if alpha < 0.0 || length_km < 0.0 {
        return Err(Error::Schema(format!(
            "transmissivity requires non-negative inputs (alpha={alpha}, length={length_km})"
        )));
    }
    Ok((-alpha * length_km).exp())
}

/// Noise profile of one optical link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkNoiseProfile {
    pub length_km: f64,
    pub alpha: f64,
    pub eta: f64,
    /// Depolarizing probability applied to the freshly prepared EPR pair.
    pub p_epr: f64,
}

/// Map a link's transmissivity to an EPR depolarizing probability:
/// `p_epr = kappa * (1 - eta)`. The coupling factor `kappa` is a tunable
/// surrogate for how channel loss degrades delivered pair quality.
pub fn link_noise(alpha: f64, length_km: f64, kappa: f64) -> Result<LinkNoiseProfile> {
    let eta = transmissivity(alpha, length_km)?;
    Ok(LinkNoiseProfile {
        length_km,
        alpha,
        eta,
        p_epr: kappa * (1.0 - eta),
    })
}

/// Error channel assigned to one instruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "kebab-case")]
pub enum ErrorChannel {
    None,
    Depolarizing1q { p: f64 },
    Depolarizing2q { p: f64 },
    ReadoutFlip { p: f64 },
    ResetError { p: f64 },
    EprDepolarizing { p: f64 },
}

impl ErrorChannel {
    pub fn probability(&self) -> f64 {
        match self {
            ErrorChannel::None => 0.0,
            ErrorChannel::Depolarizing1q { p }
            | ErrorChannel::Depolarizing2q { p }
            | ErrorChannel::ReadoutFlip { p }
            | ErrorChannel::ResetError { p }
            | ErrorChannel::EprDepolarizing { p } => *p,
        }
    }
}

/// Per-instruction channel assignment over an assembled circuit, indexed by
/// instruction position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub assignments: Vec<ErrorChannel>,
    /// Mean assigned probability over noisy (non-`None`) instructions.
    pub average_gate_noise: f64,
}

impl NoiseSpec {
    pub fn noise_free(len: usize) -> NoiseSpec {
        NoiseSpec {
            assignments: vec![ErrorChannel::None; len],
            average_gate_noise: 0.0,
        }
    }

    pub fn is_noise_free(&self) -> bool {
        self.assignments.iter().all(|a| matches!(a, ErrorChannel::None))
    }
}

fn channel_or_none(make: impl FnOnce(f64) -> ErrorChannel, p: f64) -> ErrorChannel {
    if p > 0.0 {
        make(p)
    } else {
        ErrorChannel::None
    }
}

/// Assign an error channel to every instruction of the assembled circuit.
///
/// Device noise attaches to instructions that originate in the transpiled
/// subcircuits (computational gates, data measurements, resets). The
/// communication payloads re-inserted by the assembler carry the optical
/// channel's depolarizing error on each EPR preparation; classically
/// conditioned correction gates carry the local single-qubit rate; the rest
/// of the communication machinery (comm-qubit measurements, the TeleGate and
/// Bell-measurement entangling gates, comm resets) is attributed to the link
/// channel and carries no separate device error. Classical message channels
/// are treated as error-free.
pub fn build_noise_spec(
    assembled: &AssembledCircuit,
    spec: &ArchitectureSpec,
    kappa: f64,
) -> Result<NoiseSpec> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Schema(format!("kappa={kappa} outside [0,1]")));
    }
    let circuit = &assembled.circuit;
    let mut assignments = Vec::with_capacity(circuit.instructions.len());

    for instr in &circuit.instructions {
        let channel = match instr.kind {
            GateKind::Barrier | GateKind::VirtualGate => ErrorChannel::None,
            _ if instr.tag.is_some() => {
                // Communication payload instruction.
                let tag = instr.tag.as_deref().unwrap();
                if tag.starts_with("epr:") && instr.kind == GateKind::CX {
                    // EPR preparation entangler spans the optical link.
                    let qa = &assembled.qpu_of_qubit[instr.qubits[0]];
                    let qb = &assembled.qpu_of_qubit[instr.qubits[1]];
                    if qa == qb {
                        return Err(Error::Internal(format!(
                            "epr-tagged CX does not span QPUs ({qa})"
                        )));
                    }
                    let edge = spec.network.edge_between(qa, qb).ok_or_else(|| {
                        Error::Internal(format!("no optical edge between {qa} and {qb}"))
                    })?;
                    let link = link_noise(spec.network.alpha, edge.length_km, kappa)?;
                    channel_or_none(|p| ErrorChannel::EprDepolarizing { p }, link.p_epr)
                } else if instr.condition.is_some() {
                    // Conditioned Pauli-frame correction: the quantum gate
                    // carries the local single-qubit rate.
                    let qpu = spec.qpu(&assembled.qpu_of_qubit[instr.qubits[0]])?;
                    channel_or_none(|p| ErrorChannel::Depolarizing1q { p }, qpu.noise.p1)
                } else {
                    ErrorChannel::None
                }
            }
            GateKind::Measure => {
                let qpu = spec.qpu(&assembled.qpu_of_qubit[instr.qubits[0]])?;
                channel_or_none(|p| ErrorChannel::ReadoutFlip { p }, qpu.noise.p_ro)
            }
            GateKind::Reset => {
                let qpu = spec.qpu(&assembled.qpu_of_qubit[instr.qubits[0]])?;
                channel_or_none(|p| ErrorChannel::ResetError { p }, qpu.noise.p_reset)
            }
            _ => {
                // Local unitary from a transpiled subcircuit.
                let qpu_a = &assembled.qpu_of_qubit[instr.qubits[0]];
                if instr.qubits.len() == 2 {
                    let qpu_b = &assembled.qpu_of_qubit[instr.qubits[1]];
                    if qpu_a != qpu_b {
                        return Err(Error::Internal(format!(
                            "untagged instruction {} spans QPUs {qpu_a} and {qpu_b}",
                            instr.kind.name()
                        )));
                    }
                    let qpu = spec.qpu(qpu_a)?;
                    channel_or_none(|p| ErrorChannel::Depolarizing2q { p }, qpu.noise.p2)
                } else {
                    let qpu = spec.qpu(qpu_a)?;
                    channel_or_none(|p| ErrorChannel::Depolarizing1q { p }, qpu.noise.p1)
                }
            }
        };
        assignments.push(channel);
    }

    let noisy: Vec<f64> = assignments
        .iter()
        .filter(|a| !matches!(a, ErrorChannel::None))
        .map(|a| a.probability())
        .collect();
    let average_gate_noise = if noisy.is_empty() {
        0.0
    } else {
        noisy.iter().sum::<f64>() / noisy.len() as f64
    };

    Ok(NoiseSpec {
        assignments,
        average_gate_noise,
    })
}
