//! Second pipeline stage: cut the distributed circuit at its communication
//! payloads into per-QPU subcircuits.
//!
//! Each tagged payload unit (EPR preparation, entanglement swap, gate
//! teleportation) is removed and replaced by virtual-gate placeholders — one
//! per participating QPU, covering exactly the qubits the payload touches on
//! that QPU. A barrier is pinned in front of every placeholder so the
//! transpiler cannot commute local gates across the cut. The payload itself
//! is stored on a sync point for the assembler to re-insert after
//! transpilation.

use crate::circuit::{Circuit, GateKind, Instruction, QubitRole};
use crate::constructor::{ConstructedCircuit, GlobalLayout};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// The three link-cutting cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutCase {
    EprPair,
    TelegateMcPair,
    EsBellPair,
}

impl CutCase {
    pub fn from_sync_id(sync_id: &str) -> Result<CutCase> {
        match sync_id.split(':').next() {
            Some("epr") => Ok(CutCase::EprPair),
            Some("tg") => Ok(CutCase::TelegateMcPair),
            Some("es") => Ok(CutCase::EsBellPair),
            _ => Err(Error::Internal(format!("unrecognized sync id `{sync_id}`"))),
        }
    }

    /// Number of subcircuits a sync point of this case must appear on.
    pub fn num_sides(&self) -> usize {
        match self {
            CutCase::EprPair | CutCase::TelegateMcPair => 2,
            CutCase::EsBellPair => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Repeater,
    EndpointA,
    EndpointB,
}

/// One virtual-gate placeholder on one subcircuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualGateRecord {
    pub sync_id: String,
    pub case: CutCase,
    pub side: Side,
    pub qpu_id: String,
    /// Qubits (subcircuit-local indices) the payload touches on this QPU,
    /// in first-use order. The assembler relies on this order to remap the
    /// payload through the transpiler's final qubit placement.
    pub local_qubits: Vec<usize>,
}

/// One removed communication payload and its placeholder group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncPoint {
    pub sync_id: String,
    pub case: CutCase,
    /// The replaced instructions, global numbering, program order.
    pub payload: Vec<Instruction>,
    pub sides: Vec<VirtualGateRecord>,
}

/// One QPU's isolated subcircuit in local qubit numbering. Classical bits
/// keep their global indices (the classical register is shared).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCircuit {
    pub qpu_id: String,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsolationBundle {
    pub subcircuits: Vec<SubCircuit>,
    /// Sync points in global program order.
    pub sync_points: Vec<SyncPoint>,
    pub num_data_clbits: usize,
}

fn side_label(case: CutCase, index: usize) -> Side {
    match (case, index) {
        (CutCase::EprPair, 0) => Side::Left,
        (CutCase::EprPair, _) => Side::Right,
        (CutCase::TelegateMcPair, 0) => Side::EndpointA,
        (CutCase::TelegateMcPair, _) => Side::EndpointB,
        (CutCase::EsBellPair, 0) => Side::Repeater,
        (CutCase::EsBellPair, 1) => Side::EndpointB,
        (CutCase::EsBellPair, _) => Side::EndpointA,
    }
}

/// Cut one payload unit: group its qubits by QPU, emit a pinned VG per QPU.
fn cut_unit(
    sync_id: &str,
    unit: &[Instruction],
    layout: &GlobalLayout,
    subs: &mut HashMap<String, Circuit>,
) -> Result<SyncPoint> {
    let case = CutCase::from_sync_id(sync_id)?;
    // participating QPUs in a case-specific canonical order
    let mut qubits_by_qpu: Vec<(String, Vec<usize>)> = Vec::new();
    let mut note = |global: usize| {
        let qpu = layout.qpu_id_of_global(global).to_string();
        match qubits_by_qpu.iter_mut().find(|(id, _)| *id == qpu) {
            Some((_, qs)) => {
                if !qs.contains(&global) {
                    qs.push(global);
                }
            }
            None => qubits_by_qpu.push((qpu, vec![global])),
        }
    };
    for instr in unit {
        for &q in &instr.qubits {
            note(q);
        }
    }
    match case {
        CutCase::EsBellPair => {
            // canonical order: repeater (the 2-qubit side), X-correction
            // endpoint, Z-correction (anchor) endpoint
            qubits_by_qpu.sort_by_key(|(_, qs)| std::cmp::Reverse(qs.len()));
            // after the repeater, order endpoint_b (X) before endpoint_a (Z)
            let x_target = unit
                .iter()
                .find(|i| i.kind == GateKind::X && i.condition.is_some())
                .map(|i| i.qubits[0])
                .ok_or_else(|| Error::Internal(format!("`{sync_id}`: no X correction")))?;
            if qubits_by_qpu.len() == 3 && !qubits_by_qpu[1].1.contains(&x_target) {
                qubits_by_qpu.swap(1, 2);
            }
        }
        // first-touch order is already canonical: the unit's first
        // instruction starts on the left / control side
        CutCase::EprPair | CutCase::TelegateMcPair => {}
    }
    if qubits_by_qpu.len() != case.num_sides() {
        return Err(Error::Internal(format!(
            "`{sync_id}`: payload spans {} QPUs, case requires {}",
            qubits_by_qpu.len(),
            case.num_sides()
        )));
    }

    let mut sides = Vec::new();
    for (k, (qpu_id, globals)) in qubits_by_qpu.iter().enumerate() {
        let offset = layout.layout_of(qpu_id)?.offset;
        let locals: Vec<usize> = globals.iter().map(|g| g - offset).collect();
        let sub = subs.get_mut(qpu_id).expect("subcircuit exists per QPU");
        let all: Vec<usize> = (0..sub.num_qubits).collect();
        sub.push(Instruction::barrier(all).with_tag(sync_id.to_string()))?;
        sub.push(
            Instruction::gate(GateKind::VirtualGate, locals.clone())
                .with_tag(sync_id.to_string()),
        )?;
        sides.push(VirtualGateRecord {
            sync_id: sync_id.to_string(),
            case,
            side: side_label(case, k),
            qpu_id: qpu_id.clone(),
            local_qubits: locals,
        });
    }
    Ok(SyncPoint {
        sync_id: sync_id.to_string(),
        case,
        payload: unit.to_vec(),
        sides,
    })
}

/// Run the isolation stage.
pub fn isolate(constructed: &ConstructedCircuit) -> Result<IsolationBundle> {
    let layout = &constructed.layout;
    let mut subs: HashMap<String, Circuit> = HashMap::new();
    for l in &layout.qpus {
        let mut c = Circuit::new(l.width, constructed.circuit.num_clbits);
        for &local in &l.comm_locals {
            c.qubit_roles[local] = QubitRole::Communication;
        }
        subs.insert(l.qpu_id.clone(), c);
    }

    let mut sync_points = Vec::new();
    let mut unit: Vec<Instruction> = Vec::new();
    let mut unit_tag: Option<String> = None;

    let flush =
        |unit: &mut Vec<Instruction>, tag: &mut Option<String>, subs: &mut HashMap<String, Circuit>, sync_points: &mut Vec<SyncPoint>| -> Result<()> {
            if let Some(t) = tag.take() {
                sync_points.push(cut_unit(&t, unit, layout, subs)?);
                unit.clear();
            }
            Ok(())
        };

    for instr in &constructed.circuit.instructions {
        match &instr.tag {
            Some(tag) => {
                if unit_tag.as_deref() != Some(tag.as_str()) {
                    flush(&mut unit, &mut unit_tag, &mut subs, &mut sync_points)?;
                    unit_tag = Some(tag.clone());
                }
                unit.push(instr.clone());
            }
            None => {
                flush(&mut unit, &mut unit_tag, &mut subs, &mut sync_points)?;
                // purely local instruction: reindex into its QPU; barriers
                // may span QPUs and are split per QPU
                let mut by_qpu: HashMap<&str, Vec<usize>> = HashMap::new();
                for &q in &instr.qubits {
                    by_qpu.entry(layout.qpu_id_of_global(q)).or_default().push(q);
                }
                if instr.kind != GateKind::Barrier && by_qpu.len() != 1 {
                    return Err(Error::Internal(format!(
                        "local instruction {} spans multiple QPUs",
                        instr.kind.name()
                    )));
                }
                for (qpu_id, globals) in by_qpu {
                    let offset = layout.layout_of(qpu_id)?.offset;
                    let mut mapped = instr.clone();
                    mapped.qubits = globals.iter().map(|g| g - offset).collect();
                    subs.get_mut(qpu_id).unwrap().push(mapped)?;
                }
            }
        }
    }
    flush(&mut unit, &mut unit_tag, &mut subs, &mut sync_points)?;

    let subcircuits = layout
        .qpus
        .iter()
        .map(|l| SubCircuit {
            qpu_id: l.qpu_id.clone(),
            circuit: subs.remove(&l.qpu_id).unwrap(),
        })
        .collect();
    let bundle = IsolationBundle {
        subcircuits,
        sync_points,
        num_data_clbits: constructed.num_data_clbits,
    };
    validate_isolation(&bundle, constructed)?;
    Ok(bundle)
}

/// Structural invariants of an isolation bundle:
/// sync-point multiplicity per case, barrier pinning in front of every
/// virtual gate, and conservation of the local instructions.
pub fn validate_isolation(
    bundle: &IsolationBundle,
    constructed: &ConstructedCircuit,
) -> Result<()> {
    let fail = |msg: String| Err(Error::Internal(format!("isolation violation: {msg}")));

    // sync multiplicity
    for sp in &bundle.sync_points {
        if sp.payload.is_empty() {
            return fail(format!("`{}` has an empty payload", sp.sync_id));
        }
        let mut appearing = 0;
        for sub in &bundle.subcircuits {
            let here = sub
                .circuit
                .instructions
                .iter()
                .filter(|i| {
                    i.kind == GateKind::VirtualGate && i.tag.as_deref() == Some(&sp.sync_id)
                })
                .count();
            if here > 1 {
                return fail(format!(
                    "`{}` appears {here} times on `{}`",
                    sp.sync_id, sub.qpu_id
                ));
            }
            appearing += here;
        }
        if appearing != sp.case.num_sides() {
            return fail(format!(
                "dangling sync: `{}` appears on {appearing} subcircuits, case requires {}",
                sp.sync_id,
                sp.case.num_sides()
            ));
        }
    }

    // barrier pinning
    for sub in &bundle.subcircuits {
        for (i, instr) in sub.circuit.instructions.iter().enumerate() {
            if instr.kind == GateKind::VirtualGate {
                let pinned = i > 0 && sub.circuit.instructions[i - 1].kind == GateKind::Barrier;
                if !pinned {
                    return fail(format!(
                        "unpinned VG `{}` on `{}`",
                        instr.tag.as_deref().unwrap_or("?"),
                        sub.qpu_id
                    ));
                }
            }
        }
    }

    // conservation: local (untagged) instructions across all subcircuits
    // must equal the constructed circuit's untagged instructions, reindexed
    let mut got: Vec<String> = Vec::new();
    for sub in &bundle.subcircuits {
        let offset = constructed.layout.layout_of(&sub.qpu_id)?.offset;
        for instr in &sub.circuit.instructions {
            if instr.tag.is_some() || instr.kind == GateKind::VirtualGate {
                continue;
            }
            let mut g = instr.clone();
            for q in &mut g.qubits {
                *q += offset;
            }
            got.push(format!("{g:?}"));
        }
    }
    let mut expected: Vec<String> = Vec::new();
    for instr in &constructed.circuit.instructions {
        if instr.tag.is_none() {
            expected.push(format!("{instr:?}"));
        }
    }
    got.sort();
    expected.sort();
    if got != expected {
        return fail("local instruction multiset changed across the cut".into());
    }
    Ok(())
}
