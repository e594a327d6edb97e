//! Circuit intermediate representation: gate alphabet, instructions,
//! dependency-DAG construction and circuit metrics.
//!
//! All pipeline stages (monolithic, logical-DQC, isolated, assembled) share
//! the same [`Circuit`] type. Circuits are immutable once built and safe to
//! share across threads.

mod json;
mod qasm;

pub use json::{parse_json, serialize_json};
pub use qasm::parse_qasm;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The gate alphabet. Rotation kinds carry their angles in
/// [`Instruction::params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    RX,
    RY,
    RZ,
    SX,
    CX,
    CZ,
    Swap,
    RZZ,
    RXX,
    Measure,
    Reset,
    Barrier,
    #[serde(rename = "vg")]
    VirtualGate,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::SX => "sx",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
            GateKind::Swap => "swap",
            GateKind::RZZ => "rzz",
            GateKind::RXX => "rxx",
            GateKind::Measure => "measure",
            GateKind::Reset => "reset",
            GateKind::Barrier => "barrier",
            GateKind::VirtualGate => "vg",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "h" => GateKind::H,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "rx" => GateKind::RX,
            "ry" => GateKind::RY,
            "rz" => GateKind::RZ,
            "sx" => GateKind::SX,
            "cx" => GateKind::CX,
            "cz" => GateKind::CZ,
            "swap" => GateKind::Swap,
            "rzz" => GateKind::RZZ,
            "rxx" => GateKind::RXX,
            "measure" => GateKind::Measure,
            "reset" => GateKind::Reset,
            "barrier" => GateKind::Barrier,
            "vg" => GateKind::VirtualGate,
            _ => return None,
        })
    }

    /// Number of rotation parameters the kind expects.
    pub fn num_params(&self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::RZZ | GateKind::RXX => 1,
            _ => 0,
        }
    }

    /// Fixed arity, or `None` for variadic kinds (barrier, virtual gate,
    /// measure, reset).
    pub fn fixed_arity(&self) -> Option<usize> {
        match self {
            GateKind::H
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::S
            | GateKind::Sdg
            | GateKind::T
            | GateKind::Tdg
            | GateKind::RX
            | GateKind::RY
            | GateKind::RZ
            | GateKind::SX => Some(1),
            GateKind::CX | GateKind::CZ | GateKind::Swap | GateKind::RZZ | GateKind::RXX => Some(2),
            GateKind::Measure | GateKind::Reset | GateKind::Barrier | GateKind::VirtualGate => None,
        }
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(
            self,
            GateKind::Measure | GateKind::Reset | GateKind::Barrier | GateKind::VirtualGate
        )
    }

    pub fn is_two_qubit_unitary(&self) -> bool {
        matches!(
            self,
            GateKind::CX | GateKind::CZ | GateKind::Swap | GateKind::RZZ | GateKind::RXX
        )
    }
}

/// Single-clbit equality condition (`if (c == v)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub clbit: usize,
    pub value: u8,
}

/// One circuit instruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clbits: Vec<usize>,
    #[serde(default)]
    pub condition: Option<Condition>,
    #[serde(default)]
    pub tag: Option<String>,
}

impl Instruction {
    pub fn gate(kind: GateKind, qubits: impl Into<Vec<usize>>) -> Instruction {
        Instruction {
            kind,
            params: Vec::new(),
            qubits: qubits.into(),
            clbits: Vec::new(),
            condition: None,
            tag: None,
        }
    }

    pub fn rot(kind: GateKind, theta: f64, qubits: impl Into<Vec<usize>>) -> Instruction {
        Instruction {
            kind,
            params: vec![theta],
            qubits: qubits.into(),
            clbits: Vec::new(),
            condition: None,
            tag: None,
        }
    }

    pub fn h(q: usize) -> Instruction {
        Instruction::gate(GateKind::H, [q])
    }

    pub fn x(q: usize) -> Instruction {
        Instruction::gate(GateKind::X, [q])
    }

    pub fn cx(c: usize, t: usize) -> Instruction {
        Instruction::gate(GateKind::CX, [c, t])
    }

    pub fn rz(theta: f64, q: usize) -> Instruction {
        Instruction::rot(GateKind::RZ, theta, [q])
    }

    pub fn measure(q: usize, c: usize) -> Instruction {
        Instruction {
            kind: GateKind::Measure,
            params: Vec::new(),
            qubits: vec![q],
            clbits: vec![c],
            condition: None,
            tag: None,
        }
    }

    pub fn reset(q: usize) -> Instruction {
        Instruction::gate(GateKind::Reset, [q])
    }

    pub fn barrier(qubits: impl Into<Vec<usize>>) -> Instruction {
        Instruction::gate(GateKind::Barrier, qubits)
    }

    pub fn with_condition(mut self, clbit: usize, value: u8) -> Instruction {
        self.condition = Some(Condition { clbit, value });
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Instruction {
        self.tag = Some(tag.into());
        self
    }

    pub fn is_two_qubit_unitary(&self) -> bool {
        self.kind.is_two_qubit_unitary()
    }
}

/// Per-qubit role within a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Data,
    Communication,
}

/// Ordered instruction sequence over qubit and classical-bit registers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub qubit_roles: Vec<QubitRole>,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Circuit {
        Circuit {
            num_qubits,
            num_clbits,
            qubit_roles: vec![QubitRole::Data; num_qubits],
            instructions: Vec::new(),
        }
    }

    /// Append an instruction after validating its indices and arity.
    pub fn push(&mut self, instr: Instruction) -> Result<()> {
        self.check_instruction(&instr)?;
        self.instructions.push(instr);
        Ok(())
    }

    /// Append without returning; panics on invalid instructions. Intended for
    /// programmatic construction where indices are known valid.
    pub fn add(&mut self, instr: Instruction) {
        self.push(instr).expect("invalid instruction");
    }

    fn check_instruction(&self, instr: &Instruction) -> Result<()> {
        if let Some(arity) = instr.kind.fixed_arity() {
            if instr.qubits.len() != arity {
                return Err(Error::InvalidInstruction(format!(
                    "{} expects {} qubit(s), got {}",
                    instr.kind.name(),
                    arity,
                    instr.qubits.len()
                )));
            }
        } else if instr.qubits.is_empty() {
            return Err(Error::InvalidInstruction(format!(
                "{} needs at least one qubit",
                instr.kind.name()
            )));
        }
        if instr.params.len() != instr.kind.num_params() {
            return Err(Error::InvalidInstruction(format!(
                "{} expects {} parameter(s), got {}",
                instr.kind.name(),
                instr.kind.num_params(),
                instr.params.len()
            )));
        }
        if instr.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInstruction(format!(
                "{} has a non-finite rotation angle",
                instr.kind.name()
            )));
        }
        for &q in &instr.qubits {
            if q >= self.num_qubits {
                return Err(Error::IndexOutOfRange(format!(
                    "qubit {} (register has {})",
                    q, self.num_qubits
                )));
            }
        }
        let mut sorted = instr.qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != instr.qubits.len() {
            return Err(Error::InvalidInstruction(
                "duplicate qubit index within one instruction".into(),
            ));
        }
        for &c in &instr.clbits {
            if c >= self.num_clbits {
                return Err(Error::IndexOutOfRange(format!(
                    "clbit {} (register has {})",
                    c, self.num_clbits
                )));
            }
        }
        if instr.kind == GateKind::Measure && instr.clbits.len() != instr.qubits.len() {
            return Err(Error::InvalidInstruction(
                "measure writes exactly one clbit per measured qubit".into(),
            ));
        }
        if let Some(cond) = &instr.condition {
            if !instr.kind.is_unitary() {
                return Err(Error::InvalidInstruction(
                    "condition only permitted on unitary kinds".into(),
                ));
            }
            if cond.clbit >= self.num_clbits {
                return Err(Error::IndexOutOfRange(format!(
                    "condition clbit {} (register has {})",
                    cond.clbit, self.num_clbits
                )));
            }
            if cond.value > 1 {
                return Err(Error::InvalidInstruction(
                    "condition value must be 0 or 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Validate all instructions (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        if self.qubit_roles.len() != self.num_qubits {
            return Err(Error::InvalidInstruction(format!(
                "qubit_roles has {} entries for {} qubits",
                self.qubit_roles.len(),
                self.num_qubits
            )));
        }
        for instr in &self.instructions {
            self.check_instruction(instr)?;
        }
        Ok(())
    }

    pub fn data_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.qubit_roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == QubitRole::Data)
            .map(|(i, _)| i)
    }
}

/// Gate dependency graph: edges run producer -> consumer along shared qubits
/// and shared clbits.
#[derive(Debug, Clone)]
pub struct DependencyDag {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
}

impl DependencyDag {
    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    /// Test helper: inject an extra edge (used to exercise cycle detection).
    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.edges.push((from, to));
        self.succs[from].push(to);
        self.preds[to].push(from);
    }
}

/// Build the dependency DAG of a circuit. Qubit ordering makes each qubit's
/// instruction subsequence a path; clbit accesses order writes against reads.
pub fn build_dag(circuit: &Circuit) -> DependencyDag {
    let n = circuit.instructions.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut last_on_qubit: Vec<Option<usize>> = vec![None; circuit.num_qubits];
    // For clbits: consecutive accesses ordered unless both are reads.
    let mut last_cl_write: Vec<Option<usize>> = vec![None; circuit.num_clbits];
    let mut cl_reads_since_write: Vec<Vec<usize>> = vec![Vec::new(); circuit.num_clbits];

    for (i, instr) in circuit.instructions.iter().enumerate() {
        for &q in &instr.qubits {
            if let Some(prev) = last_on_qubit[q] {
                edges.push((prev, i));
            }
            last_on_qubit[q] = Some(i);
        }
        if let Some(cond) = &instr.condition {
            if let Some(w) = last_cl_write[cond.clbit] {
                edges.push((w, i));
            }
            cl_reads_since_write[cond.clbit].push(i);
        }
        if instr.kind == GateKind::Measure {
            for &c in &instr.clbits {
                if let Some(w) = last_cl_write[c] {
                    edges.push((w, i));
                }
                for &r in &cl_reads_since_write[c] {
                    edges.push((r, i));
                }
                cl_reads_since_write[c].clear();
                last_cl_write[c] = Some(i);
            }
        }
    }

    edges.sort_unstable();
    edges.dedup();
    let mut succs = vec![Vec::new(); n];
    let mut preds = vec![Vec::new(); n];
    for &(u, v) in &edges {
        succs[u].push(v);
        preds[v].push(u);
    }
    DependencyDag {
        num_nodes: n,
        edges,
        succs,
        preds,
    }
}

/// Totally ordered instruction schedule extracted from a dependency DAG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    /// Instruction indices in execution order.
    pub order: Vec<usize>,
}

/// Kahn-style layer-by-layer BFS topological sort, ties broken by original
/// instruction index. Deterministic.
pub fn topological_order(dag: &DependencyDag) -> Result<ExecutionTrace> {
    let n = dag.num_nodes;
    let mut indeg: Vec<usize> = (0..n).map(|i| dag.predecessors(i).len()).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    layer.sort_unstable();
    let mut order = Vec::with_capacity(n);
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &u in &layer {
            order.push(u);
            for &v in dag.successors(u) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    next.push(v);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        layer = next;
    }
    if order.len() != n {
        // Report one cycle among the remaining nodes.
        let remaining: Vec<usize> = (0..n).filter(|&i| indeg[i] > 0).collect();
        return Err(Error::Cycle(find_cycle(dag, &remaining)));
    }
    Ok(ExecutionTrace { order })
}

fn find_cycle(dag: &DependencyDag, remaining: &[usize]) -> Vec<usize> {
    use std::collections::HashSet;
    let live: HashSet<usize> = remaining.iter().copied().collect();
    // Walk successors inside the live set until a node repeats.
    let mut path = Vec::new();
    let mut seen = HashSet::new();
    let mut cur = remaining[0];
    loop {
        if seen.contains(&cur) {
            let start = path.iter().position(|&x| x == cur).unwrap();
            return path[start..].to_vec();
        }
        seen.insert(cur);
        path.push(cur);
        cur = *dag
            .successors(cur)
            .iter()
            .find(|s| live.contains(s))
            .expect("remaining node with no live successor");
    }
}

/// Structural circuit metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub qubits: usize,
    pub depth: usize,
    pub two_qubit_count: usize,
    pub igd: f64,
}

/// Compute depth (longest DAG path counting non-barrier, non-virtual
/// instructions), two-qubit gate count and interaction graph density.
///
/// IGD is computed on data qubits over unique qubit pairs touched by
/// two-qubit unitaries; circuits with fewer than two data qubits get 0.
pub fn circuit_metrics(circuit: &Circuit) -> CircuitMetrics {
    let dag = build_dag(circuit);
    let order = topological_order(&dag).expect("circuit instruction order is acyclic");

    let weight = |i: usize| -> usize {
        match circuit.instructions[i].kind {
            GateKind::Barrier | GateKind::VirtualGate => 0,
            _ => 1,
        }
    };
    let mut longest = vec![0usize; circuit.instructions.len()];
    let mut depth = 0;
    for &i in &order.order {
        let base = dag
            .predecessors(i)
            .iter()
            .map(|&p| longest[p])
            .max()
            .unwrap_or(0);
        longest[i] = base + weight(i);
        depth = depth.max(longest[i]);
    }

    let two_qubit_count = circuit
        .instructions
        .iter()
        .filter(|i| i.is_two_qubit_unitary())
        .count();

    let mut pairs = std::collections::HashSet::new();
    for instr in &circuit.instructions {
        if instr.is_two_qubit_unitary() {
            let (a, b) = (instr.qubits[0], instr.qubits[1]);
            if circuit.qubit_roles[a] == QubitRole::Data && circuit.qubit_roles[b] == QubitRole::Data
            {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let n_data = circuit.data_qubits().count();
    let igd = if n_data < 2 {
        0.0
    } else {
        pairs.len() as f64 / (n_data * (n_data - 1) / 2) as f64
    };

    CircuitMetrics {
        qubits: circuit.num_qubits,
        depth,
        two_qubit_count,
        igd,
    }
}
