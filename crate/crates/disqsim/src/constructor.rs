//! First pipeline stage: place the monolithic circuit onto the distributed
//! architecture.
//!
//! Cross-QPU two-qubit gates are rewritten into CX form, entanglement routes
//! are searched through the optical network, and each remote CX is expanded
//! into its communication payload: per-hop EPR pair preparation, Bell
//! measurements at intermediate QPUs that swap entanglement toward the
//! endpoints, and the gate-teleportation block that consumes the resulting
//! end-to-end pair. Communication qubits live at the top of each QPU's local
//! register and are reset after every remote gate so later gates can reuse
//! them.
//!
//! Payload instructions carry tags (`epr:…`, `es:…`, `tg:…`) so downstream
//! stages can tell communication machinery apart from computational gates.

use crate::arch::{ArchitectureSpec, NetworkTopology, PartitionMap};
use crate::circuit::{Circuit, GateKind, Instruction, QubitRole};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Indices of two-qubit unitaries whose operands sit on different QPUs.
pub fn identify_remote_gates(circuit: &Circuit, partition: &PartitionMap) -> Vec<usize> {
    circuit
        .instructions
        .iter()
        .enumerate()
        .filter(|(_, instr)| {
            instr.is_two_qubit_unitary()
                && partition.qpu_of_data_qubit(instr.qubits[0])
                    != partition.qpu_of_data_qubit(instr.qubits[1])
        })
        .map(|(i, _)| i)
        .collect()
}

/// Rewrite cross-QPU two-qubit gates so the only remote primitive left is
/// CX. Local gates pass through untouched.
pub fn decompose_to_remote_cnots(circuit: &Circuit, partition: &PartitionMap) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.num_qubits, circuit.num_clbits);
    out.qubit_roles = circuit.qubit_roles.clone();
    for instr in &circuit.instructions {
        let remote = instr.is_two_qubit_unitary()
            && partition.qpu_of_data_qubit(instr.qubits[0])
                != partition.qpu_of_data_qubit(instr.qubits[1]);
        if !remote {
            out.push(instr.clone())?;
            continue;
        }
        if instr.condition.is_some() {
            return Err(Error::UnsupportedRemoteGate(format!(
                "classically conditioned remote {}",
                instr.kind.name()
            )));
        }
        let (a, b) = (instr.qubits[0], instr.qubits[1]);
        match instr.kind {
            GateKind::CX => out.push(instr.clone())?,
            GateKind::CZ => {
                out.push(Instruction::h(b))?;
                out.push(Instruction::cx(a, b))?;
                out.push(Instruction::h(b))?;
            }
            GateKind::Swap => {
                out.push(Instruction::cx(a, b))?;
                out.push(Instruction::cx(b, a))?;
                out.push(Instruction::cx(a, b))?;
            }
            GateKind::RZZ => {
                out.push(Instruction::cx(a, b))?;
                out.push(Instruction::rz(instr.params[0], b))?;
                out.push(Instruction::cx(a, b))?;
            }
            GateKind::RXX => {
                out.push(Instruction::h(a))?;
                out.push(Instruction::h(b))?;
                out.push(Instruction::cx(a, b))?;
                out.push(Instruction::rz(instr.params[0], b))?;
                out.push(Instruction::cx(a, b))?;
                out.push(Instruction::h(a))?;
                out.push(Instruction::h(b))?;
            }
            other => {
                return Err(Error::UnsupportedRemoteGate(other.name().into()));
            }
        }
    }
    Ok(out)
}

/// Shortest entanglement route between two QPUs: depth-first enumeration of
/// simple paths, selecting minimum hop count, then minimum total fiber
/// length, then lexicographically smallest node sequence. Networks are
/// small, so exhaustive search stays cheap and fully deterministic.
pub fn route_es(network: &NetworkTopology, from: &str, to: &str) -> Result<Vec<String>> {
    if from == to {
        return Ok(vec![from.to_string()]);
    }
    fn dfs(
        network: &NetworkTopology,
        node: &str,
        to: &str,
        path: &mut Vec<String>,
        length: f64,
        best: &mut Option<(usize, f64, Vec<String>)>,
    ) {
        if node == to {
            let cand = (path.len() - 1, length, path.clone());
            let better = match best {
                None => true,
                Some((h, l, p)) => {
                    (cand.0, cand.1) < (*h, *l)
                        || (cand.0 == *h && cand.1 == *l && cand.2 < *p)
                }
            };
            if better {
                *best = Some(cand);
            }
            return;
        }
        let mut next: Vec<(String, f64)> = network
            .neighbors(node)
            .filter(|(n, _)| !path.iter().any(|p| p == n))
            .map(|(n, l)| (n.to_string(), l))
            .collect();
        next.sort_by(|a, b| a.0.cmp(&b.0));
        for (n, l) in next {
            path.push(n.clone());
            dfs(network, &n, to, path, length + l, best);
            path.pop();
        }
    }
    let mut best = None;
    let mut path = vec![from.to_string()];
    dfs(network, from, to, &mut path, 0.0, &mut best);
    best.map(|(_, _, p)| p).ok_or_else(|| Error::Unroutable {
        a: from.to_string(),
        b: to.to_string(),
    })
}

/// Where each QPU's register landed in the flattened global circuit.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QpuLayout {
    pub qpu_id: String,
    /// Global index of this QPU's local qubit 0.
    pub offset: usize,
    /// Full physical register width of the QPU.
    pub width: usize,
    /// (monolithic data qubit, local index) pairs, in monolithic order.
    pub data_locals: Vec<(usize, usize)>,
    /// Local indices of allocated communication qubits (directly above the
    /// data block).
    pub comm_locals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GlobalLayout {
    pub qpus: Vec<QpuLayout>,
    pub total_qubits: usize,
}

impl GlobalLayout {
    pub fn layout_of(&self, qpu_id: &str) -> Result<&QpuLayout> {
        self.qpus
            .iter()
            .find(|l| l.qpu_id == qpu_id)
            .ok_or_else(|| Error::Internal(format!("no layout for QPU `{qpu_id}`")))
    }

    /// Global index of a monolithic data qubit.
    pub fn global_of_data(&self, mono: usize) -> Result<usize> {
        for l in &self.qpus {
            for &(m, local) in &l.data_locals {
                if m == mono {
                    return Ok(l.offset + local);
                }
            }
        }
        Err(Error::Internal(format!("data qubit {mono} has no placement")))
    }

    pub fn qpu_id_of_global(&self, global: usize) -> &str {
        for l in &self.qpus {
            if global >= l.offset && global < l.offset + l.width {
                return &l.qpu_id;
            }
        }
        unreachable!("global qubit index out of layout range")
    }

    /// QPU id per global qubit, used by noise assignment and the assembler.
    pub fn qpu_of_qubit_vec(&self) -> Vec<String> {
        let mut v = Vec::with_capacity(self.total_qubits);
        for l in &self.qpus {
            v.extend(std::iter::repeat(l.qpu_id.clone()).take(l.width));
        }
        v
    }
}

/// Output of the construction stage: the distributed circuit in global
/// numbering, plus the placement and entanglement bookkeeping downstream
/// stages and reports need.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConstructedCircuit {
    pub circuit: Circuit,
    pub layout: GlobalLayout,
    pub partition: PartitionMap,
    /// Clbits `0..num_data_clbits` are the monolithic circuit's output
    /// register; the rest hold communication measurement results.
    pub num_data_clbits: usize,
    /// Raw EPR pairs consumed (one per hop per remote CX).
    pub epr_pairs: usize,
    pub remote_cnot_count: usize,
    /// Entanglement-swap operations performed.
    pub es_count: usize,
}

fn comm_global(layout: &GlobalLayout, qpu_id: &str, slot: usize) -> Result<usize> {
    let l = layout.layout_of(qpu_id)?;
    let local = l
        .comm_locals
        .get(slot)
        .copied()
        .ok_or_else(|| Error::Internal(format!("QPU `{qpu_id}` has no comm slot {slot}")))?;
    Ok(l.offset + local)
}

/// Run the full construction stage.
pub fn construct(
    mono: &Circuit,
    spec: &ArchitectureSpec,
    partition: &PartitionMap,
) -> Result<ConstructedCircuit> {
    spec.validate_partition_shape(partition)?;
    let n_data = mono.data_qubits().count();
    if partition.qubits.len() != n_data {
        return Err(Error::Schema(format!(
            "partition covers {} qubits, circuit has {n_data}",
            partition.qubits.len()
        )));
    }

    let decomposed = decompose_to_remote_cnots(mono, partition)?;

    // Pass 1: route every remote CX and size the comm-qubit allocation.
    let mut route_cache: HashMap<(String, String), Vec<String>> = HashMap::new();
    let mut comm_slots: HashMap<String, usize> = HashMap::new();
    let mut routes: HashMap<usize, Vec<String>> = HashMap::new();
    let mut epr_pairs = 0usize;
    for (i, instr) in decomposed.instructions.iter().enumerate() {
        if !(instr.kind == GateKind::CX
            && partition.qpu_of_data_qubit(instr.qubits[0])
                != partition.qpu_of_data_qubit(instr.qubits[1]))
        {
            continue;
        }
        let from = partition.qpu_of_data_qubit(instr.qubits[0]).to_string();
        let to = partition.qpu_of_data_qubit(instr.qubits[1]).to_string();
        let path = match route_cache.get(&(from.clone(), to.clone())) {
            Some(p) => p.clone(),
            None => {
                let p = route_es(&spec.network, &from, &to)?;
                route_cache.insert((from.clone(), to.clone()), p.clone());
                p
            }
        };
        epr_pairs += path.len() - 1;
        for (k, qpu) in path.iter().enumerate() {
            let need = if k == 0 || k == path.len() - 1 { 1 } else { 2 };
            let e = comm_slots.entry(qpu.clone()).or_insert(0);
            *e = (*e).max(need);
        }
        routes.insert(i, path);
    }

    // Build the global layout over all declared QPUs.
    let mut qpus = Vec::new();
    let mut offset = 0usize;
    for qpu in &spec.qpus {
        let data_monos: Vec<usize> = partition
            .mapping
            .iter()
            .position(|m| *m == qpu.id)
            .map(|pid| partition.partition_qubits(pid))
            .unwrap_or_default();
        let n_comm = comm_slots.get(&qpu.id).copied().unwrap_or(0);
        if data_monos.len() + n_comm > qpu.num_qubits {
            return Err(Error::Capacity(format!(
                "QPU `{}` needs {} data + {} communication qubits but has {}",
                qpu.id,
                data_monos.len(),
                n_comm,
                qpu.num_qubits
            )));
        }
        let data_locals: Vec<(usize, usize)> = data_monos
            .iter()
            .enumerate()
            .map(|(local, &m)| (m, local))
            .collect();
        // slot k sits directly above the data block, so remote-gate operands
        // start out near their communication qubit and routing stays short
        let comm_locals: Vec<usize> = (0..n_comm).map(|k| data_monos.len() + k).collect();
        qpus.push(QpuLayout {
            qpu_id: qpu.id.clone(),
            offset,
            width: qpu.num_qubits,
            data_locals,
            comm_locals,
        });
        offset += qpu.num_qubits;
    }
    let layout = GlobalLayout {
        qpus,
        total_qubits: offset,
    };

    // Pass 2: emit the distributed circuit.
    let num_data_clbits = mono.num_clbits;
    let mut out = Circuit::new(layout.total_qubits, num_data_clbits + 2 * epr_pairs);
    for l in &layout.qpus {
        for &local in &l.comm_locals {
            out.qubit_roles[l.offset + local] = QubitRole::Communication;
        }
    }

    let map_q = |q: usize| layout.global_of_data(q);
    let mut next_clbit = num_data_clbits;
    let mut gate_no = 0usize;
    let mut remote_cnot_count = 0usize;
    let mut es_count = 0usize;

    for (i, instr) in decomposed.instructions.iter().enumerate() {
        let Some(path) = routes.get(&i) else {
            let mut mapped = instr.clone();
            for q in &mut mapped.qubits {
                *q = map_q(*q)?;
            }
            out.push(mapped)?;
            continue;
        };
        remote_cnot_count += 1;
        let g = gate_no;
        gate_no += 1;
        let h = path.len() - 1;
        let ctrl = map_q(instr.qubits[0])?;
        let tgt = map_q(instr.qubits[1])?;

        // Pair i spans (left_i on path[i], right_i on path[i+1]). The first
        // QPU and the last hold one comm qubit (slot 0); intermediate QPUs
        // hold the right end of the previous pair (slot 0) and the left end
        // of the next (slot 1).
        let left = |i: usize| -> Result<usize> {
            comm_global(&layout, &path[i], if i == 0 { 0 } else { 1 })
        };
        let right = |i: usize| -> Result<usize> { comm_global(&layout, &path[i + 1], 0) };

        for hop in 0..h {
            let tag = format!("epr:rg{g}:hop{hop}");
            out.push(Instruction::h(left(hop)?).with_tag(tag.clone()))?;
            out.push(Instruction::cx(left(hop)?, right(hop)?).with_tag(tag))?;
        }

        // Swap entanglement toward the endpoints at each intermediate QPU.
        // The Pauli frame splits across the pair: the X correction lands on
        // the freshly joined half, the Z correction on the anchor half (Z on
        // either half of a Bell pair is the same state).
        let anchor = left(0)?;
        for j in 1..h {
            es_count += 1;
            let tag = format!("es:rg{g}:hop{j}");
            let b1 = right(j - 1)?;
            let b2 = left(j)?;
            let far = right(j)?;
            let (c1, c2) = (next_clbit, next_clbit + 1);
            next_clbit += 2;
            out.push(Instruction::cx(b1, b2).with_tag(tag.clone()))?;
            out.push(Instruction::h(b1).with_tag(tag.clone()))?;
            out.push(Instruction::measure(b1, c1).with_tag(tag.clone()))?;
            out.push(Instruction::measure(b2, c2).with_tag(tag.clone()))?;
            out.push(Instruction::x(far).with_condition(c2, 1).with_tag(tag.clone()))?;
            out.push(
                Instruction::gate(GateKind::Z, [anchor])
                    .with_condition(c1, 1)
                    .with_tag(tag.clone()),
            )?;
            out.push(Instruction::reset(b1).with_tag(tag.clone()))?;
            out.push(Instruction::reset(b2).with_tag(tag))?;
        }

        // Gate teleportation over the end-to-end pair.
        let tag = format!("tg:rg{g}");
        let e_a = left(0)?;
        let e_b = right(h - 1)?;
        let (c_a, c_b) = (next_clbit, next_clbit + 1);
        next_clbit += 2;
        out.push(Instruction::cx(ctrl, e_a).with_tag(tag.clone()))?;
        out.push(Instruction::measure(e_a, c_a).with_tag(tag.clone()))?;
        out.push(Instruction::x(e_b).with_condition(c_a, 1).with_tag(tag.clone()))?;
        out.push(Instruction::cx(e_b, tgt).with_tag(tag.clone()))?;
        out.push(Instruction::h(e_b).with_tag(tag.clone()))?;
        out.push(Instruction::measure(e_b, c_b).with_tag(tag.clone()))?;
        out.push(
            Instruction::gate(GateKind::Z, [ctrl])
                .with_condition(c_b, 1)
                .with_tag(tag.clone()),
        )?;
        out.push(Instruction::reset(e_a).with_tag(tag.clone()))?;
        out.push(Instruction::reset(e_b).with_tag(tag))?;
    }
    debug_assert_eq!(next_clbit, out.num_clbits);

    Ok(ConstructedCircuit {
        circuit: out,
        layout,
        partition: partition.clone(),
        num_data_clbits,
        epr_pairs,
        remote_cnot_count,
        es_count,
    })
}
