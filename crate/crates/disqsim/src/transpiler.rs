//! Third pipeline stage: lower each isolated subcircuit to its QPU's basis
//! gates and coupling constraints.
//!
//! Two-qubit gates are rewritten onto the backend's native entangler (CX or
//! RXX), non-adjacent operands are brought together with inserted SWAPs, and
//! remaining single-qubit gates are synthesized into the backend's rotation
//! family. Communication qubits are pinned: they never move during routing,
//! so the assembler can still find them at the register positions the
//! construction stage assigned. Virtual gates travel through transpilation
//! as opaque placeholders — multi-qubit ones demand operand adjacency just
//! like a real entangler, because the payload they stand for contains one.

use crate::arch::QpuProfile;
use crate::circuit::{Circuit, GateKind, Instruction, QubitRole};
use crate::error::{Error, Result};
use crate::isolator::{IsolationBundle, SubCircuit};
use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisFamily {
    /// {rz, sx, x} + CX entangler.
    RzSxX,
    /// {rx, ry, rz} + RXX entangler.
    RxRyRz,
}

fn basis_family(qpu: &QpuProfile) -> Result<BasisFamily> {
    if qpu.basis_gates.contains(&GateKind::SX) {
        Ok(BasisFamily::RzSxX)
    } else if qpu.basis_gates.contains(&GateKind::RY) {
        Ok(BasisFamily::RxRyRz)
    } else {
        Err(Error::Schema(format!(
            "qpu {}: unsupported single-qubit basis family",
            qpu.id
        )))
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TranspiledSubcircuit {
    pub qpu_id: String,
    pub circuit: Circuit,
    /// Logical local index -> physical local index at circuit start.
    pub initial_layout: Vec<usize>,
    /// Logical local index -> physical local index after all routing.
    pub final_permutation: Vec<usize>,
}

/// Emit a CX on physical operands in the target basis. On RXX backends the
/// entangler is dressed: CX = H_c · RXX(π/2) · H_c · H_t · RZ(-π/2)⊗2 · H_t
/// (up to global phase); the H's are lowered later.
fn emit_cx(out: &mut Vec<Instruction>, c: usize, t: usize, family: BasisFamily) {
    match family {
        BasisFamily::RzSxX => out.push(Instruction::cx(c, t)),
        BasisFamily::RxRyRz => {
            out.push(Instruction::h(c));
            out.push(Instruction::rot(GateKind::RXX, FRAC_PI_2, [c, t]));
            out.push(Instruction::h(c));
            out.push(Instruction::h(t));
            out.push(Instruction::rz(-FRAC_PI_2, c));
            out.push(Instruction::rz(-FRAC_PI_2, t));
            out.push(Instruction::h(t));
        }
    }
}

/// Rewrite all two-qubit unitaries onto the native entangler. Single-qubit
/// gates pass through for the later synthesis stage.
fn lower_two_qubit(instr: &Instruction, family: BasisFamily, out: &mut Vec<Instruction>) {
    let keep_native = match family {
        BasisFamily::RzSxX => instr.kind == GateKind::CX,
        BasisFamily::RxRyRz => instr.kind == GateKind::RXX,
    };
    if keep_native {
        out.push(instr.clone());
        return;
    }
    let (a, b) = (instr.qubits[0], instr.qubits[1]);
    match instr.kind {
        GateKind::CX => emit_cx(out, a, b, family),
        GateKind::CZ => {
            out.push(Instruction::h(b));
            emit_cx(out, a, b, family);
            out.push(Instruction::h(b));
        }
        GateKind::Swap => {
            emit_cx(out, a, b, family);
            emit_cx(out, b, a, family);
            emit_cx(out, a, b, family);
        }
        GateKind::RZZ => {
            emit_cx(out, a, b, family);
            out.push(Instruction::rz(instr.params[0], b));
            emit_cx(out, a, b, family);
        }
        GateKind::RXX => {
            // only reached on CX backends
            out.push(Instruction::h(a));
            out.push(Instruction::h(b));
            emit_cx(out, a, b, family);
            out.push(Instruction::rz(instr.params[0], b));
            emit_cx(out, a, b, family);
            out.push(Instruction::h(a));
            out.push(Instruction::h(b));
        }
        _ => unreachable!("not a two-qubit unitary"),
    }
}

/// Synthesize one single-qubit gate into the basis rotation family (up to
/// global phase, which classical conditioning cannot observe).
fn lower_one_qubit(instr: &Instruction, family: BasisFamily, out: &mut Vec<Instruction>) {
    let q = instr.qubits[0];
    let push = |out: &mut Vec<Instruction>, kind: GateKind, theta: Option<f64>| {
        let mut g = match theta {
            Some(t) => Instruction::rot(kind, t, [q]),
            None => Instruction::gate(kind, [q]),
        };
        g.condition = instr.condition;
        out.push(g);
    };
    use GateKind::*;
    match family {
        BasisFamily::RzSxX => {
            // helper sequences in circuit order
            let h_seq = [(RZ, Some(FRAC_PI_2)), (SX, None), (RZ, Some(FRAC_PI_2))];
            let rx_seq = |theta: f64| {
                [
                    (RZ, Some(FRAC_PI_2)),
                    (SX, None),
                    (RZ, Some(theta + PI)),
                    (SX, None),
                    (RZ, Some(FRAC_PI_2)),
                ]
            };
            match instr.kind {
                RZ | SX | X => out.push(instr.clone()),
                Z => push(out, RZ, Some(PI)),
                S => push(out, RZ, Some(FRAC_PI_2)),
                Sdg => push(out, RZ, Some(-FRAC_PI_2)),
                T => push(out, RZ, Some(PI / 4.0)),
                Tdg => push(out, RZ, Some(-PI / 4.0)),
                Y => {
                    push(out, RZ, Some(PI));
                    push(out, X, None);
                }
                H => {
                    for (k, t) in h_seq {
                        push(out, k, t);
                    }
                }
                // RX(θ) = H·RZ(θ)·H with the inner RZ angles merged
                RX => {
                    for (k, t) in rx_seq(instr.params[0]) {
                        push(out, k, t);
                    }
                }
                // RY(θ) = RZ(-π/2)·RX(θ)·RZ(π/2) in circuit order
                RY => {
                    push(out, RZ, Some(-FRAC_PI_2));
                    for (k, t) in rx_seq(instr.params[0]) {
                        push(out, k, t);
                    }
                    push(out, RZ, Some(FRAC_PI_2));
                }
                _ => unreachable!("not a single-qubit unitary"),
            }
        }
        BasisFamily::RxRyRz => match instr.kind {
            RX | RY | RZ => out.push(instr.clone()),
            X => push(out, RX, Some(PI)),
            Y => push(out, RY, Some(PI)),
            Z => push(out, RZ, Some(PI)),
            S => push(out, RZ, Some(FRAC_PI_2)),
            Sdg => push(out, RZ, Some(-FRAC_PI_2)),
            T => push(out, RZ, Some(PI / 4.0)),
            Tdg => push(out, RZ, Some(-PI / 4.0)),
            SX => push(out, RX, Some(FRAC_PI_2)),
            H => {
                push(out, RZ, Some(PI));
                push(out, RY, Some(FRAC_PI_2));
            }
            _ => unreachable!("not a single-qubit unitary"),
        },
    }
}

/// Coupling-aware placement: tracks the logical↔physical correspondence and
/// inserts SWAP chains (as entangler triples) to make two-qubit operands
/// adjacent. Physical positions holding communication qubits are pinned.
struct Router<'a> {
    qpu: &'a QpuProfile,
    family: BasisFamily,
    /// logical -> physical
    phys: Vec<usize>,
    /// physical -> logical
    logical: Vec<usize>,
    pinned: Vec<bool>,
}

impl<'a> Router<'a> {
    fn new(qpu: &'a QpuProfile, family: BasisFamily, roles: &[QubitRole]) -> Router<'a> {
        let n = qpu.num_qubits;
        Router {
            qpu,
            family,
            phys: (0..n).collect(),
            logical: (0..n).collect(),
            pinned: roles.iter().map(|r| *r == QubitRole::Communication).collect(),
        }
    }

    /// Shortest physical path between two positions; intermediate nodes must
    /// be unpinned. Deterministic (neighbors scanned in index order).
    fn bfs_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.qpu.num_qubits;
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for v in 0..n {
                if prev[v] == usize::MAX
                    && self.qpu.coupled(u, v)
                    && (v == to || !self.pinned[v])
                {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    fn swap_positions(&mut self, out: &mut Vec<Instruction>, a: usize, b: usize) {
        emit_cx(out, a, b, self.family);
        emit_cx(out, b, a, self.family);
        emit_cx(out, a, b, self.family);
        let (la, lb) = (self.logical[a], self.logical[b]);
        self.logical.swap(a, b);
        self.phys[la] = b;
        self.phys[lb] = a;
    }

    /// Make the physical positions of two logical operands adjacent,
    /// emitting SWAPs as needed, and return the final physical pair.
    fn make_adjacent(
        &mut self,
        out: &mut Vec<Instruction>,
        la: usize,
        lb: usize,
    ) -> Result<(usize, usize)> {
        let (pa, pb) = (self.phys[la], self.phys[lb]);
        if self.qpu.coupled(pa, pb) {
            return Ok((pa, pb));
        }
        let unroutable = || Error::Unroutable {
            a: format!("{}:{pa}", self.qpu.id),
            b: format!("{}:{pb}", self.qpu.id),
        };
        // Move the unpinned operand along a shortest path toward the other.
        let (mover, target, mover_first) = if !self.pinned[pa] {
            (pa, pb, true)
        } else if !self.pinned[pb] {
            (pb, pa, false)
        } else {
            return Err(unroutable());
        };
        let path = self.bfs_path(mover, target).ok_or_else(unroutable)?;
        // walk to the position adjacent to the target
        for w in path.windows(2).take(path.len() - 2) {
            self.swap_positions(out, w[0], w[1]);
        }
        let (npa, npb) = (self.phys[la], self.phys[lb]);
        debug_assert!(self.qpu.coupled(npa, npb));
        if mover_first {
            debug_assert_eq!(npb, target);
        }
        Ok((npa, npb))
    }
}

/// Transpile one subcircuit for its QPU.
pub fn transpile(sub: &SubCircuit, qpu: &QpuProfile, opt_level: u8) -> Result<TranspiledSubcircuit> {
    if sub.circuit.num_qubits != qpu.num_qubits {
        return Err(Error::Internal(format!(
            "subcircuit width {} does not match QPU `{}` width {}",
            sub.circuit.num_qubits, qpu.id, qpu.num_qubits
        )));
    }
    let family = basis_family(qpu)?;

    // Stage 1: entangler lowering.
    let mut staged: Vec<Instruction> = Vec::new();
    for instr in &sub.circuit.instructions {
        if instr.kind.is_two_qubit_unitary() {
            lower_two_qubit(instr, family, &mut staged);
        } else {
            staged.push(instr.clone());
        }
    }

    // Stage 2: routing.
    let mut router = Router::new(qpu, family, &sub.circuit.qubit_roles);
    let initial_layout = router.phys.clone();
    let mut routed: Vec<Instruction> = Vec::new();
    for instr in &staged {
        match instr.kind {
            GateKind::Barrier => {
                let mut g = instr.clone();
                g.qubits = instr.qubits.iter().map(|&q| router.phys[q]).collect();
                routed.push(g);
            }
            GateKind::VirtualGate => {
                let mut g = instr.clone();
                if instr.qubits.len() == 2 {
                    let (pa, pb) = router.make_adjacent(&mut routed, instr.qubits[0], instr.qubits[1])?;
                    g.qubits = vec![pa, pb];
                } else {
                    g.qubits = instr.qubits.iter().map(|&q| router.phys[q]).collect();
                }
                routed.push(g);
            }
            k if k.is_two_qubit_unitary() => {
                let (pa, pb) = router.make_adjacent(&mut routed, instr.qubits[0], instr.qubits[1])?;
                let mut g = instr.clone();
                g.qubits = vec![pa, pb];
                routed.push(g);
            }
            _ => {
                let mut g = instr.clone();
                g.qubits = instr.qubits.iter().map(|&q| router.phys[q]).collect();
                routed.push(g);
            }
        }
    }
    let final_permutation = router.phys.clone();

    // Stage 3: single-qubit synthesis.
    let mut lowered: Vec<Instruction> = Vec::new();
    for instr in &routed {
        if instr.kind.is_unitary() && instr.qubits.len() == 1 && !qpu.basis_gates.contains(&instr.kind)
        {
            lower_one_qubit(instr, family, &mut lowered);
        } else {
            lowered.push(instr.clone());
        }
    }

    // Stage 4: peephole cleanup.
    let instructions = if opt_level >= 1 {
        optimize(lowered)
    } else {
        lowered
    };

    let mut circuit = Circuit::new(qpu.num_qubits, sub.circuit.num_clbits);
    circuit.qubit_roles = sub.circuit.qubit_roles.clone();
    for instr in instructions {
        circuit.push(instr)?;
    }
    Ok(TranspiledSubcircuit {
        qpu_id: sub.qpu_id.clone(),
        circuit,
        initial_layout,
        final_permutation,
    })
}

const ANGLE_EPS: f64 = 1e-12;

fn is_rotation(kind: GateKind) -> bool {
    matches!(kind, GateKind::RX | GateKind::RY | GateKind::RZ)
}

fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t > PI {
        t -= two_pi;
    } else if t < -PI {
        t += two_pi;
    }
    t
}

/// Peephole optimization to fixpoint: merge adjacent same-axis rotations,
/// drop zero rotations, cancel adjacent self-inverse pairs. Barriers,
/// virtual gates, measurements, resets and classical conditions block
/// everything (conditioned gates are never merged or cancelled).
fn optimize(mut instrs: Vec<Instruction>) -> Vec<Instruction> {
    loop {
        let before = instrs.len();
        instrs = optimize_pass(instrs);
        if instrs.len() == before {
            return instrs;
        }
    }
}

fn blocks(instr: &Instruction) -> bool {
    !instr.kind.is_unitary() || instr.condition.is_some()
}

fn optimize_pass(instrs: Vec<Instruction>) -> Vec<Instruction> {
    let mut out: Vec<Instruction> = Vec::with_capacity(instrs.len());
    'next: for instr in instrs {
        if blocks(&instr) {
            out.push(instr);
            continue;
        }
        // drop no-op rotations
        if is_rotation(instr.kind) && normalize_angle(instr.params[0]).abs() < ANGLE_EPS {
            continue;
        }
        // look back past instructions on disjoint qubits
        for k in (0..out.len()).rev() {
            let prevk = &out[k];
            if blocks(prevk) && prevk.qubits.iter().any(|q| instr.qubits.contains(q)) {
                break;
            }
            if blocks(prevk) {
                continue;
            }
            let overlap = prevk.qubits.iter().any(|q| instr.qubits.contains(q));
            if !overlap {
                continue;
            }
            if prevk.qubits != instr.qubits {
                break;
            }
            // same operands, both unconditioned unitaries
            if is_rotation(instr.kind) && prevk.kind == instr.kind {
                let merged = normalize_angle(prevk.params[0] + instr.params[0]);
                if merged.abs() < ANGLE_EPS {
                    out.remove(k);
                } else {
                    out[k].params[0] = merged;
                }
                continue 'next;
            }
            let self_inverse = matches!(
                instr.kind,
                GateKind::H | GateKind::X | GateKind::Y | GateKind::Z | GateKind::CX
                    | GateKind::CZ | GateKind::Swap
            );
            if self_inverse && prevk.kind == instr.kind {
                out.remove(k);
                continue 'next;
            }
            break;
        }
        out.push(instr);
    }
    out
}

/// Transpile every subcircuit of an isolation bundle.
pub fn transpile_bundle(
    bundle: &IsolationBundle,
    spec: &crate::arch::ArchitectureSpec,
    opt_level: u8,
) -> Result<Vec<TranspiledSubcircuit>> {
    bundle
        .subcircuits
        .iter()
        .map(|sub| transpile(sub, spec.qpu(&sub.qpu_id)?, opt_level))
        .collect()
}
