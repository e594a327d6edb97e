//! Exact (noise-free) simulation with mid-circuit measurement.
//!
//! Mid-circuit measurements whose results feed classical conditions force
//! the simulator to follow both outcomes. Instead of a full density-matrix
//! treatment the engine keeps a weighted list of statevector branches and
//! merges branches whose observable futures coincide: same values on every
//! still-live classical bit, same qubit layout, and states equal up to a
//! global phase. For teleportation-style circuits the Pauli-frame
//! corrections collapse the post-measurement branches back onto each other,
//! so the branch count stays small regardless of how many communication
//! rounds the circuit performs.
//!
//! Terminal measurements — clbit never touched again, qubit never touched
//! again — are deferred and resolved at the end directly from the surviving
//! statevector, which avoids branching on the final data-register readout.

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::sim::state::{Statevector, DEFAULT_QUBIT_LIMIT};
use std::collections::HashMap;

/// Sparse outcome distribution keyed by packed clbit values (clbit k is
/// bit k of the key).
pub type Distribution = HashMap<u64, f64>;

const WEIGHT_EPS: f64 = 1e-12;
const MERGE_TOL: f64 = 1e-9;
const MAX_BRANCHES: usize = 4096;

#[derive(Clone)]
struct Branch {
    weight: f64,
    sv: Statevector,
    clbits: Vec<u8>,
    /// Deferred terminal measurements as (qubit, clbit) pairs, in program
    /// order.
    deferred: Vec<(usize, usize)>,
}

/// Per-clbit access timeline used for liveness and deferral analysis.
struct ClbitEvents {
    /// Sorted (instruction index, is_write) events per clbit.
    events: Vec<Vec<(usize, bool)>>,
}

impl ClbitEvents {
    fn analyze(circuit: &Circuit) -> ClbitEvents {
        let mut events = vec![Vec::new(); circuit.num_clbits];
        for (i, instr) in circuit.instructions.iter().enumerate() {
            if let Some(cond) = &instr.condition {
                events[cond.clbit].push((i, false));
            }
            if instr.kind == GateKind::Measure {
                for &c in &instr.clbits {
                    events[c].push((i, true));
                }
            }
        }
        ClbitEvents { events }
    }

    /// Whether clbit `c` has any access strictly after instruction `i`.
    fn accessed_after(&self, c: usize, i: usize) -> bool {
        self.events[c].last().is_some_and(|&(pos, _)| pos > i)
    }

    /// Whether the value of clbit `c` as of just after instruction `i` can
    /// still be observed: either some later read happens before the next
    /// write, or the value survives to the end of the program (no later
    /// write) and `c` is part of the output register.
    fn live_after(&self, c: usize, i: usize, num_output: usize) -> bool {
        for &(pos, is_write) in &self.events[c] {
            if pos <= i {
                continue;
            }
            return !is_write; // next access decides: read => live, write => dead
        }
        c < num_output
    }
}

fn qubit_untouched_after(circuit: &Circuit, qubit: usize, i: usize) -> bool {
    circuit.instructions[i + 1..].iter().all(|instr| {
        instr.kind == GateKind::Barrier || !instr.qubits.contains(&qubit)
    })
}

/// Merge branches that are observationally identical. `i` is the index of
/// the instruction just executed.
fn merge_branches(
    branches: Vec<Branch>,
    events: &ClbitEvents,
    i: usize,
    num_output: usize,
) -> Vec<Branch> {
    if branches.len() < 2 {
        return branches;
    }
    // Group by live clbit values + slot layout + deferred list, then compare
    // states up to global phase within each group.
    let mut groups: HashMap<Vec<u8>, Vec<Branch>> = HashMap::new();
    for b in branches {
        let mut key: Vec<u8> = b
            .clbits
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                if events.live_after(c, i, num_output) {
                    v
                } else {
                    2 // dead: value unobservable
                }
            })
            .collect();
        for s in b.sv.slots_signature() {
            key.push(match s {
                crate::sim::state::Slot::Classical(false) => 3,
                crate::sim::state::Slot::Classical(true) => 4,
                crate::sim::state::Slot::Active(bit) => 5 + *bit as u8,
            });
        }
        for &(q, c) in &b.deferred {
            key.extend_from_slice(&(q as u16).to_le_bytes());
            key.extend_from_slice(&(c as u16).to_le_bytes());
        }
        groups.entry(key).or_default().push(b);
    }
    let mut out = Vec::new();
    for (_, group) in groups {
        let mut reps: Vec<Branch> = Vec::new();
        for b in group {
            let mut merged = false;
            for rep in &mut reps {
                if let Some(ov) = rep.sv.overlap_abs(&b.sv) {
                    if (ov - 1.0).abs() < MERGE_TOL {
                        rep.weight += b.weight;
                        merged = true;
                        break;
                    }
                }
            }
            if !merged {
                reps.push(b);
            }
        }
        out.extend(reps);
    }
    out
}

/// Run the circuit exactly and return the outcome distribution over the
/// first `num_output_clbits` classical bits.
pub fn run_exact(circuit: &Circuit, num_output_clbits: usize) -> Result<Distribution> {
    run_exact_with_limit(circuit, num_output_clbits, DEFAULT_QUBIT_LIMIT)
}

pub fn run_exact_with_limit(
    circuit: &Circuit,
    num_output_clbits: usize,
    qubit_limit: usize,
) -> Result<Distribution> {
    if num_output_clbits > 64 {
        return Err(Error::Internal(format!(
            "{num_output_clbits} output clbits exceed the 64-bit outcome key"
        )));
    }
    let events = ClbitEvents::analyze(circuit);
    let mut branches = vec![Branch {
        weight: 1.0,
        sv: Statevector::new(circuit.num_qubits, qubit_limit),
        clbits: vec![0u8; circuit.num_clbits],
        deferred: Vec::new(),
    }];

    for (i, instr) in circuit.instructions.iter().enumerate() {
        match instr.kind {
            GateKind::Barrier | GateKind::VirtualGate => continue,
            GateKind::Measure => {
                for (k, (&q, &c)) in instr.qubits.iter().zip(&instr.clbits).enumerate() {
                    let deferrable = !events.accessed_after(c, i)
                        && qubit_untouched_after(circuit, q, i)
                        // later (q', c') pairs of this same instruction touch
                        // neither q nor c, so only earlier pairs matter
                        && instr.qubits[..k].iter().all(|&q2| q2 != q);
                    if deferrable {
                        for b in &mut branches {
                            b.deferred.push((q, c));
                        }
                        continue;
                    }
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for b in branches {
                        let p1 = b.sv.prob_one(q);
                        for outcome in [false, true] {
                            let p = if outcome { p1 } else { 1.0 - p1 };
                            if p <= WEIGHT_EPS {
                                continue;
                            }
                            let mut nb = b.clone();
                            nb.weight *= nb.sv.collapse(q, outcome);
                            nb.clbits[c] = outcome as u8;
                            next.push(nb);
                        }
                    }
                    branches = merge_branches(next, &events, i, num_output_clbits);
                    if branches.len() > MAX_BRANCHES {
                        return Err(Error::Internal(format!(
                            "measurement branching exceeded {MAX_BRANCHES} branches"
                        )));
                    }
                }
            }
            GateKind::Reset => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    for &q in &instr.qubits {
                        // both outcomes end in |0⟩; branches differ only in
                        // the residual entangled state and usually re-merge
                        let p1 = b.sv.prob_one(q);
                        for outcome in [false, true] {
                            let p = if outcome { p1 } else { 1.0 - p1 };
                            if p <= WEIGHT_EPS {
                                continue;
                            }
                            let mut nb = b.clone();
                            nb.weight *= nb.sv.collapse(q, outcome);
                            if outcome {
                                nb.sv.apply_unitary(&crate::circuit::Instruction::x(q))?;
                            }
                            next.push(nb);
                        }
                    }
                }
                branches = merge_branches(next, &events, i, num_output_clbits);
            }
            _ => {
                for b in &mut branches {
                    if let Some(cond) = &instr.condition {
                        if b.clbits[cond.clbit] != cond.value {
                            continue;
                        }
                    }
                    b.sv.apply_unitary(instr)?;
                }
            }
        }
    }

    // Resolve deferred measurements from the surviving statevectors.
    let mut dist: Distribution = HashMap::new();
    for b in &branches {
        let mut base: u64 = 0;
        for c in 0..num_output_clbits.min(b.clbits.len()) {
            if b.clbits[c] != 0 {
                base |= 1 << c;
            }
        }
        let out_deferred: Vec<(usize, usize)> = b
            .deferred
            .iter()
            .copied()
            .filter(|&(_, c)| c < num_output_clbits)
            .collect();
        let qubits: Vec<usize> = out_deferred.iter().map(|&(q, _)| q).collect();
        for (packed, p) in b.sv.distribution_over(&qubits) {
            let mut key = base;
            for (k, &(_, c)) in out_deferred.iter().enumerate() {
                if packed & (1 << k) != 0 {
                    key |= 1 << c;
                } else {
                    key &= !(1 << c);
                }
            }
            *dist.entry(key).or_insert(0.0) += b.weight * p;
        }
    }
    // Drop outcomes that only exist as floating-point residue, then
    // renormalize the tail loss (weights already sum to 1 up to pruning).
    dist.retain(|_, p| *p > WEIGHT_EPS);
    let total: f64 = dist.values().sum();
    if total > 0.0 && (total - 1.0).abs() > 1e-12 {
        for v in dist.values_mut() {
            *v /= total;
        }
    }
    Ok(dist)
}
