//! Fourth pipeline stage: merge the transpiled subcircuits back into one
//! executable circuit and derive its execution trace.
//!
//! Each subcircuit holds a cursor. Purely local instructions are emitted
//! immediately with globally remapped qubit indices; a cursor reaching a
//! virtual gate blocks on that gate's sync point. Once every side of a sync
//! point is blocked, the stored communication payload is emitted — its qubit
//! indices remapped through the correspondence between the placeholder's
//! original qubits and their post-routing positions — and all sides unblock.
//! Blocked cursors with no resolvable sync point mean the isolation was
//! malformed; that is reported as a deadlock naming the offending sync ids.

use crate::circuit::{
    build_dag, topological_order, Circuit, ExecutionTrace, GateKind, QubitRole,
};
use crate::constructor::GlobalLayout;
use crate::error::{Error, Result};
use crate::isolator::IsolationBundle;
use crate::transpiler::TranspiledSubcircuit;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssembledCircuit {
    /// Circuit over the global qubit space (QPU registers concatenated in
    /// declaration order) and the shared classical register.
    pub circuit: Circuit,
    /// Owning QPU id per global qubit.
    pub qpu_of_qubit: Vec<String>,
    pub trace: ExecutionTrace,
    pub num_data_clbits: usize,
}

/// One annotated execution-trace entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    /// Owning QPU, or `link` for instructions spanning two QPUs (EPR
    /// preparation entanglers).
    pub qpu: String,
    pub kind: String,
    pub qubits: Vec<usize>,
    pub sync_id: Option<String>,
}

/// Merge transpiled subcircuits with the stored sync payloads.
pub fn assemble(
    subs: &[TranspiledSubcircuit],
    bundle: &IsolationBundle,
    layout: &GlobalLayout,
) -> Result<AssembledCircuit> {
    let num_clbits = subs
        .first()
        .map(|s| s.circuit.num_clbits)
        .unwrap_or(0);
    let mut out = Circuit::new(layout.total_qubits, num_clbits);
    for l in &layout.qpus {
        for &local in &l.comm_locals {
            out.qubit_roles[l.offset + local] = QubitRole::Communication;
        }
    }

    let offset_of: HashMap<&str, usize> = layout
        .qpus
        .iter()
        .map(|l| (l.qpu_id.as_str(), l.offset))
        .collect();
    let sync_of: HashMap<&str, &crate::isolator::SyncPoint> = bundle
        .sync_points
        .iter()
        .map(|sp| (sp.sync_id.as_str(), sp))
        .collect();

    // cursor per subcircuit; blocked[i] = sync_id + the VG's physical qubits
    let mut cursors = vec![0usize; subs.len()];
    let mut blocked: Vec<Option<(String, Vec<usize>)>> = vec![None; subs.len()];
    let mut resolved: HashMap<String, usize> = HashMap::new();

    loop {
        let mut progressed = false;

        // advance every unblocked cursor to its next sync point
        for (i, sub) in subs.iter().enumerate() {
            if blocked[i].is_some() {
                continue;
            }
            let offset = *offset_of
                .get(sub.qpu_id.as_str())
                .ok_or_else(|| Error::Internal(format!("no layout for `{}`", sub.qpu_id)))?;
            while cursors[i] < sub.circuit.instructions.len() {
                let instr = &sub.circuit.instructions[cursors[i]];
                if instr.kind == GateKind::VirtualGate {
                    let sync_id = instr.tag.clone().ok_or_else(|| {
                        Error::Internal("virtual gate without a sync id".into())
                    })?;
                    blocked[i] = Some((sync_id, instr.qubits.clone()));
                    break;
                }
                let mut g = instr.clone();
                for q in &mut g.qubits {
                    *q += offset;
                }
                out.push(g)?;
                cursors[i] += 1;
                progressed = true;
            }
        }

        // all cursors exhausted?
        if (0..subs.len()).all(|i| blocked[i].is_none() && cursors[i] == subs[i].circuit.instructions.len())
        {
            break;
        }

        // resolvable sync points: every side blocked on the same id.
        // Several may be ready at once; take them in ascending sync_id order
        // for determinism.
        let mut ready: Vec<String> = Vec::new();
        {
            let mut waiting: HashMap<&str, usize> = HashMap::new();
            for b in blocked.iter().flatten() {
                *waiting.entry(b.0.as_str()).or_insert(0) += 1;
            }
            for (id, count) in waiting {
                let sp = sync_of
                    .get(id)
                    .ok_or_else(|| Error::Internal(format!("unknown sync id `{id}`")))?;
                if count == sp.case.num_sides() {
                    ready.push(id.to_string());
                }
            }
            ready.sort();
        }

        if ready.is_empty() {
            if progressed {
                continue;
            }
            let stuck: Vec<String> = blocked
                .iter()
                .flatten()
                .map(|(id, _)| id.clone())
                .collect();
            return Err(Error::Deadlock(stuck));
        }

        for id in ready {
            let sp = sync_of[id.as_str()];
            if resolved.contains_key(&id) {
                return Err(Error::Internal(format!("sync `{id}` resolved twice")));
            }
            // per-QPU map: original payload local qubit -> routed local qubit
            let mut remap: HashMap<(String, usize), usize> = HashMap::new();
            for side in &sp.sides {
                let (sub_idx, (_, routed_qubits)) = blocked
                    .iter()
                    .enumerate()
                    .filter_map(|(i, b)| b.as_ref().map(|b| (i, b)))
                    .find(|(i, b)| b.0 == id && subs[*i].qpu_id == side.qpu_id)
                    .ok_or_else(|| {
                        Error::Internal(format!(
                            "sync `{id}`: side `{}` not blocked",
                            side.qpu_id
                        ))
                    })?;
                if routed_qubits.len() != side.local_qubits.len() {
                    return Err(Error::Internal(format!(
                        "sync `{id}`: placeholder arity changed in transpilation"
                    )));
                }
                for (orig, routed) in side.local_qubits.iter().zip(routed_qubits) {
                    remap.insert((side.qpu_id.clone(), *orig), *routed);
                }
                let _ = sub_idx;
            }
            for instr in &sp.payload {
                let mut g = instr.clone();
                for q in &mut g.qubits {
                    let qpu = layout.qpu_id_of_global(*q).to_string();
                    let offset = offset_of[qpu.as_str()];
                    let local = *q - offset;
                    let routed = remap.get(&(qpu.clone(), local)).copied().ok_or_else(|| {
                        Error::Internal(format!(
                            "sync `{id}`: payload qubit {local} on `{qpu}` not covered by a placeholder"
                        ))
                    })?;
                    *q = offset + routed;
                }
                out.push(g)?;
            }
            resolved.insert(id.clone(), out.instructions.len());
            // unblock all sides and step past their placeholders
            for (i, b) in blocked.iter_mut().enumerate() {
                if b.as_ref().is_some_and(|(bid, _)| *bid == id) {
                    *b = None;
                    cursors[i] += 1;
                }
            }
        }
    }

    if resolved.len() != bundle.sync_points.len() {
        return Err(Error::Internal(format!(
            "{} of {} sync points resolved",
            resolved.len(),
            bundle.sync_points.len()
        )));
    }

    let trace = derive_trace(&out)?;
    Ok(AssembledCircuit {
        circuit: out,
        qpu_of_qubit: layout.qpu_of_qubit_vec(),
        trace,
        num_data_clbits: bundle.num_data_clbits,
    })
}

/// Execution order of the assembled circuit: layered breadth-first
/// topological sort of the dependency graph.
pub fn derive_trace(circuit: &Circuit) -> Result<ExecutionTrace> {
    topological_order(&build_dag(circuit))
}

/// Annotated trace entries (`link` marks cross-QPU instructions).
pub fn annotate_trace(assembled: &AssembledCircuit) -> Vec<TraceEntry> {
    assembled
        .trace
        .order
        .iter()
        .map(|&idx| {
            let instr = &assembled.circuit.instructions[idx];
            let qpus: Vec<&str> = instr
                .qubits
                .iter()
                .map(|&q| assembled.qpu_of_qubit[q].as_str())
                .collect();
            let qpu = if qpus.windows(2).all(|w| w[0] == w[1]) {
                qpus.first().copied().unwrap_or("").to_string()
            } else {
                "link".to_string()
            };
            TraceEntry {
                index: idx,
                qpu,
                kind: instr.kind.name().to_string(),
                qubits: instr.qubits.clone(),
                sync_id: instr.tag.clone(),
            }
        })
        .collect()
}

/// Trace export: one JSON object per line.
pub fn trace_jsonl(assembled: &AssembledCircuit) -> String {
    annotate_trace(assembled)
        .iter()
        .map(|e| serde_json::to_string(e).expect("trace entry serializes"))
        .collect::<Vec<_>>()
        .join("\n")
}
