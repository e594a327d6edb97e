//! Monte-Carlo trajectory sampling under a per-instruction noise spec.
//!
//! Each shot runs one stochastic trajectory: unitaries apply exactly, then
//! the instruction's assigned channel fires with its probability (random
//! Pauli insertion for depolarizing channels, recorded-bit flip for readout,
//! skipped re-initialization for reset error). Shots use independent
//! counter-derived RNG streams from one master seed, so results are
//! reproducible and independent of thread scheduling.

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::noise::{ErrorChannel, NoiseSpec};
use crate::sim::exact::Distribution;
use crate::sim::state::{Statevector, DEFAULT_QUBIT_LIMIT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// Outcome counts keyed like [`Distribution`].
pub type Counts = HashMap<u64, u64>;

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn apply_depolarizing_1q(sv: &mut Statevector, q: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    sv.apply_pauli(q, rng.gen_range(1..4u8))
}

fn apply_depolarizing_2q(
    sv: &mut Statevector,
    q0: usize,
    q1: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    // uniform over the 15 non-identity two-qubit Paulis
    let idx = rng.gen_range(1..16u8);
    sv.apply_pauli(q0, idx / 4)?;
    sv.apply_pauli(q1, idx % 4)
}

fn run_one_shot(
    circuit: &Circuit,
    noise: &NoiseSpec,
    num_output_clbits: usize,
    qubit_limit: usize,
    rng: &mut ChaCha8Rng,
) -> Result<u64> {
    let mut sv = Statevector::new(circuit.num_qubits, qubit_limit);
    let mut clbits = vec![0u8; circuit.num_clbits];

    for (i, instr) in circuit.instructions.iter().enumerate() {
        let channel = noise.assignments[i];
        match instr.kind {
            GateKind::Barrier | GateKind::VirtualGate => continue,
            GateKind::Measure => {
                for (&q, &c) in instr.qubits.iter().zip(&instr.clbits) {
                    let mut outcome = sv.measure(q, rng);
                    if let ErrorChannel::ReadoutFlip { p } = channel {
                        if rng.gen::<f64>() < p {
                            outcome = !outcome;
                        }
                    }
                    clbits[c] = outcome as u8;
                }
            }
            GateKind::Reset => {
                for &q in &instr.qubits {
                    let failed = matches!(channel, ErrorChannel::ResetError { p } if rng.gen::<f64>() < p);
                    if failed {
                        // re-initialization fails: qubit keeps its measured value
                        sv.measure(q, rng);
                    } else {
                        sv.reset(q, rng);
                    }
                }
            }
            _ => {
                if let Some(cond) = &instr.condition {
                    if clbits[cond.clbit] != cond.value {
                        continue;
                    }
                }
                sv.apply_unitary(instr)?;
                match channel {
                    ErrorChannel::Depolarizing1q { p } => {
                        if rng.gen::<f64>() < p {
                            apply_depolarizing_1q(&mut sv, instr.qubits[0], rng)?;
                        }
                    }
                    ErrorChannel::Depolarizing2q { p } | ErrorChannel::EprDepolarizing { p } => {
                        if rng.gen::<f64>() < p {
                            apply_depolarizing_2q(&mut sv, instr.qubits[0], instr.qubits[1], rng)?;
                        }
                    }
                    ErrorChannel::None => {}
                    other => {
                        return Err(Error::Internal(format!(
                            "channel {other:?} assigned to a unitary"
                        )));
                    }
                }
            }
        }
    }

    let mut key: u64 = 0;
    for (c, &v) in clbits.iter().take(num_output_clbits).enumerate() {
        if v != 0 {
            key |= 1 << c;
        }
    }
    Ok(key)
}

/// Run `shots` independent noisy trajectories and histogram the outcomes
/// over the first `num_output_clbits` classical bits.
pub fn run_shots(
    circuit: &Circuit,
    noise: &NoiseSpec,
    shots: u64,
    seed: u64,
    num_output_clbits: usize,
) -> Result<Counts> {
    run_shots_with_limit(circuit, noise, shots, seed, num_output_clbits, DEFAULT_QUBIT_LIMIT)
}

pub fn run_shots_with_limit(
    circuit: &Circuit,
    noise: &NoiseSpec,
    shots: u64,
    seed: u64,
    num_output_clbits: usize,
    qubit_limit: usize,
) -> Result<Counts> {
    if noise.assignments.len() != circuit.instructions.len() {
        return Err(Error::Internal(format!(
            "noise spec covers {} instructions, circuit has {}",
            noise.assignments.len(),
            circuit.instructions.len()
        )));
    }
    if num_output_clbits > 64 {
        return Err(Error::Internal(format!(
            "{num_output_clbits} output clbits exceed the 64-bit outcome key"
        )));
    }
    (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            run_one_shot(circuit, noise, num_output_clbits, qubit_limit, &mut rng)
        })
        .try_fold(Counts::new, |mut acc, key| {
            *acc.entry(key?).or_insert(0) += 1;
            Ok(acc)
        })
        .try_reduce(Counts::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

/// Sample counts directly from an exact outcome distribution. Used as the
/// noise-free fast path: the trajectory ensemble would reproduce exactly
/// this multinomial.
pub fn sample_counts(dist: &Distribution, shots: u64, seed: u64) -> Counts {
    let mut entries: Vec<(u64, f64)> = dist.iter().map(|(&k, &p)| (k, p)).collect();
    entries.sort_unstable_by_key(|&(k, _)| k);
    let mut cumulative = Vec::with_capacity(entries.len());
    let mut acc = 0.0;
    for &(_, p) in &entries {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Counts::new();
    for _ in 0..shots {
        let r: f64 = rng.gen::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c < r).min(entries.len() - 1);
        *counts.entry(entries[idx].0).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;
    use crate::noise::NoiseSpec;
    use crate::sim::exact::run_exact;

    fn bell_circuit() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.add(Instruction::h(0));
        c.add(Instruction::cx(0, 1));
        c.add(Instruction::measure(0, 0));
        c.add(Instruction::measure(1, 1));
        c
    }

    #[test]
    fn noise_free_matches_exact() {
        let c = bell_circuit();
        let noise = NoiseSpec::noise_free(c.instructions.len());
        let counts = run_shots(&c, &noise, 4000, 11, 2).unwrap();
        assert_eq!(counts.len(), 2);
        let p00 = counts[&0b00] as f64 / 4000.0;
        assert!((p00 - 0.5).abs() < 0.05);
        // perfect correlation without noise
        assert!(!counts.contains_key(&0b01));
        assert!(!counts.contains_key(&0b10));
    }

    #[test]
    fn reproducible_across_runs() {
        let c = bell_circuit();
        let noise = NoiseSpec::noise_free(c.instructions.len());
        let a = run_shots(&c, &noise, 500, 42, 2).unwrap();
        let b = run_shots(&c, &noise, 500, 42, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn readout_noise_flips_bits() {
        let mut c = Circuit::new(1, 1);
        c.add(Instruction::measure(0, 0)); // always 0 ideally
        let noise = NoiseSpec {
            assignments: vec![crate::noise::ErrorChannel::ReadoutFlip { p: 0.25 }],
            average_gate_noise: 0.25,
        };
        let counts = run_shots(&c, &noise, 8000, 3, 1).unwrap();
        let p1 = counts.get(&1).copied().unwrap_or(0) as f64 / 8000.0;
        assert!((p1 - 0.25).abs() < 0.03);
    }

    #[test]
    fn depolarizing_degrades_bell_correlation() {
        let c = bell_circuit();
        let mut noise = NoiseSpec::noise_free(c.instructions.len());
        noise.assignments[1] = crate::noise::ErrorChannel::Depolarizing2q { p: 0.3 };
        let counts = run_shots(&c, &noise, 8000, 5, 2).unwrap();
        let mismatched = counts.get(&0b01).copied().unwrap_or(0)
            + counts.get(&0b10).copied().unwrap_or(0);
        assert!(mismatched > 0, "depolarizing noise should break correlation");
    }

    #[test]
    fn sampled_counts_match_distribution() {
        let c = bell_circuit();
        let dist = run_exact(&c, 2).unwrap();
        let counts = sample_counts(&dist, 10_000, 9);
        assert_eq!(counts.values().sum::<u64>(), 10_000);
        let p00 = counts.get(&0).copied().unwrap_or(0) as f64 / 10_000.0;
        assert!((p00 - 0.5).abs() < 0.03);
    }
}
