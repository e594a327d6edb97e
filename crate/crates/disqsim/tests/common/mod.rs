//! Independent reference implementations used to cross-check the library:
//! a dense unitary builder, a density-matrix channel simulator and an
//! entanglement-cost instruction scan. These deliberately share no code with
//! the crate's simulator or constructor.

#![allow(dead_code)]

use disqsim::arch::{ArchitectureSpec, PartitionMap};
use disqsim::circuit::{Circuit, GateKind, Instruction};
use disqsim::noise::{ErrorChannel, NoiseSpec};
use num_complex::Complex64 as C;
use std::collections::{HashMap, VecDeque};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub type Mat2 = [[C; 2]; 2];
pub type Mat4 = [[C; 4]; 4];

pub fn mat1(kind: GateKind, params: &[f64]) -> Mat2 {
    use std::f64::consts::FRAC_1_SQRT_2 as R;
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match kind {
        GateKind::H => [[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]],
        GateKind::X => [[z, o], [o, z]],
        GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        GateKind::Z => [[o, z], [z, c(-1.0, 0.0)]],
        GateKind::S => [[o, z], [z, c(0.0, 1.0)]],
        GateKind::Sdg => [[o, z], [z, c(0.0, -1.0)]],
        GateKind::T => [[o, z], [z, C::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Tdg => [[o, z], [z, C::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]],
        GateKind::SX => [
            [c(0.5, 0.5), c(0.5, -0.5)],
            [c(0.5, -0.5), c(0.5, 0.5)],
        ],
        GateKind::RX => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::RY => {
            let (s, co) = (params[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::RZ => [
            [C::from_polar(1.0, -params[0] / 2.0), z],
            [z, C::from_polar(1.0, params[0] / 2.0)],
        ],
        other => panic!("no 1q matrix for {other:?}"),
    }
}

/// Two-qubit matrix in the local basis `s = b0 + 2*b1` where `b0` is the
/// state of `qubits[0]` (the control for CX) and `b1` of `qubits[1]`.
pub fn mat2(kind: GateKind, params: &[f64]) -> Mat4 {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let mut m = [[z; 4]; 4];
    match kind {
        GateKind::CX => {
            // |c t>: flips t when c = 1, i.e. s = 1 <-> s = 3
            m[0][0] = o;
            m[2][2] = o;
            m[3][1] = o;
            m[1][3] = o;
        }
        GateKind::CZ => {
            for s in 0..4 {
                m[s][s] = if s == 3 { c(-1.0, 0.0) } else { o };
            }
        }
        GateKind::Swap => {
            m[0][0] = o;
            m[3][3] = o;
            m[2][1] = o;
            m[1][2] = o;
        }
        GateKind::RZZ => {
            for s in 0..4 {
                let parity = ((s & 1) ^ (s >> 1)) as f64;
                let phase = if parity == 0.0 { -1.0 } else { 1.0 };
                m[s][s] = C::from_polar(1.0, phase * params[0] / 2.0);
            }
        }
        GateKind::RXX => {
            let (s_, co) = (params[0] / 2.0).sin_cos();
            for s in 0..4 {
                m[s][s] = c(co, 0.0);
                m[s][3 - s] = c(0.0, -s_);
            }
        }
        other => panic!("no 2q matrix for {other:?}"),
    }
    m
}

/// Left-multiply an arbitrary 2x2 at qubit `q` into a dense state vector.
pub fn apply_mat1_vec(state: &mut [C], q: usize, m: &Mat2) {
    let mask = 1usize << q;
    for i in 0..state.len() {
        if i & mask == 0 {
            let (a, b) = (state[i], state[i | mask]);
            state[i] = m[0][0] * a + m[0][1] * b;
            state[i | mask] = m[1][0] * a + m[1][1] * b;
        }
    }
}

pub fn apply_mat2_vec(state: &mut [C], q0: usize, q1: usize, m: &Mat4) {
    let (m0, m1) = (1usize << q0, 1usize << q1);
    for i in 0..state.len() {
        if i & m0 == 0 && i & m1 == 0 {
            let idx = [i, i | m0, i | m1, i | m0 | m1];
            let v: Vec<C> = idx.iter().map(|&j| state[j]).collect();
            for (s, &j) in idx.iter().enumerate() {
                state[j] = (0..4).map(|t| m[s][t] * v[t]).sum();
            }
        }
    }
}

pub fn apply_instr_vec(state: &mut [C], instr: &Instruction) {
    match instr.kind {
        GateKind::Barrier => {}
        k if k.is_two_qubit_unitary() => {
            apply_mat2_vec(state, instr.qubits[0], instr.qubits[1], &mat2(k, &instr.params))
        }
        k if k.is_unitary() => apply_mat1_vec(state, instr.qubits[0], &mat1(k, &instr.params)),
        other => panic!("apply_instr_vec cannot handle {other:?}"),
    }
}

/// Full unitary of a measurement-free circuit, column-major: `u[col][row]`.
pub fn unitary_of(circuit: &Circuit) -> Vec<Vec<C>> {
    let dim = 1usize << circuit.num_qubits;
    (0..dim)
        .map(|j| {
            let mut state = vec![c(0.0, 0.0); dim];
            state[j] = c(1.0, 0.0);
            for instr in &circuit.instructions {
                apply_instr_vec(&mut state, instr);
            }
            state
        })
        .collect()
}

/// Max |a - phase*b| over all entries after aligning the global phase on the
/// largest entry of `b`.
pub fn unitary_distance_up_to_phase(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let mut best = (0usize, 0usize, 0.0f64);
    for (j, col) in b.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best.2 {
                best = (i, j, v.norm());
            }
        }
    }
    let phase = a[best.1][best.0] / b[best.1][best.0];
    let phase = phase / c(phase.norm(), 0.0);
    let mut max = 0.0f64;
    for (ca, cb) in a.iter().zip(b) {
        for (va, vb) in ca.iter().zip(cb) {
            max = max.max((va - phase * vb).norm());
        }
    }
    max
}

// ---------------------------------------------------------------------------
// Density-matrix channel simulator (exact noisy reference for small circuits)
// ---------------------------------------------------------------------------

pub struct DensityOracle {
    pub n: usize,
    dim: usize,
    /// row-major rho[r * dim + c]
    rho: Vec<C>,
}

impl DensityOracle {
    pub fn new(n: usize) -> DensityOracle {
        let dim = 1usize << n;
        let mut rho = vec![c(0.0, 0.0); dim * dim];
        rho[0] = c(1.0, 0.0);
        DensityOracle { n, dim, rho }
    }

    fn left_mul_mat1(&mut self, q: usize, m: &Mat2) {
        for col in 0..self.dim {
            let mut v: Vec<C> = (0..self.dim).map(|r| self.rho[r * self.dim + col]).collect();
            apply_mat1_vec(&mut v, q, m);
            for r in 0..self.dim {
                self.rho[r * self.dim + col] = v[r];
            }
        }
    }

    fn left_mul_mat2(&mut self, q0: usize, q1: usize, m: &Mat4) {
        for col in 0..self.dim {
            let mut v: Vec<C> = (0..self.dim).map(|r| self.rho[r * self.dim + col]).collect();
            apply_mat2_vec(&mut v, q0, q1, m);
            for r in 0..self.dim {
                self.rho[r * self.dim + col] = v[r];
            }
        }
    }

    fn adjoint(&mut self) {
        let mut out = vec![c(0.0, 0.0); self.dim * self.dim];
        for r in 0..self.dim {
            for cc in 0..self.dim {
                out[cc * self.dim + r] = self.rho[r * self.dim + cc].conj();
            }
        }
        self.rho = out;
    }

    fn conj_mat1(&mut self, q: usize, m: &Mat2) {
        // rho -> M rho M^dagger
        self.left_mul_mat1(q, m);
        self.adjoint();
        self.left_mul_mat1(q, m);
        self.adjoint();
    }

    fn conj_mat2(&mut self, q0: usize, q1: usize, m: &Mat4) {
        self.left_mul_mat2(q0, q1, m);
        self.adjoint();
        self.left_mul_mat2(q0, q1, m);
        self.adjoint();
    }

    pub fn apply_unitary(&mut self, instr: &Instruction) {
        match instr.kind {
            GateKind::Barrier => {}
            k if k.is_two_qubit_unitary() => {
                self.conj_mat2(instr.qubits[0], instr.qubits[1], &mat2(k, &instr.params))
            }
            k if k.is_unitary() => self.conj_mat1(instr.qubits[0], &mat1(k, &instr.params)),
            other => panic!("not a unitary: {other:?}"),
        }
    }

    fn mix(states: Vec<(f64, Vec<C>)>) -> Vec<C> {
        let dim2 = states[0].1.len();
        let mut out = vec![c(0.0, 0.0); dim2];
        for (w, rho) in states {
            for (o, v) in out.iter_mut().zip(rho) {
                *o += c(w, 0.0) * v;
            }
        }
        out
    }

    pub fn depolarize_1q(&mut self, q: usize, p: f64) {
        let base = self.rho.clone();
        let mut parts = vec![(1.0 - p, base.clone())];
        for pauli in [GateKind::X, GateKind::Y, GateKind::Z] {
            self.rho = base.clone();
            self.conj_mat1(q, &mat1(pauli, &[]));
            parts.push((p / 3.0, self.rho.clone()));
        }
        self.rho = Self::mix(parts);
    }

    pub fn depolarize_2q(&mut self, q0: usize, q1: usize, p: f64) {
        let paulis = [None, Some(GateKind::X), Some(GateKind::Y), Some(GateKind::Z)];
        let base = self.rho.clone();
        let mut parts = vec![(1.0 - p, base.clone())];
        for (i, pa) in paulis.iter().enumerate() {
            for (j, pb) in paulis.iter().enumerate() {
                if i == 0 && j == 0 {
                    continue;
                }
                self.rho = base.clone();
                if let Some(k) = pa {
                    self.conj_mat1(q0, &mat1(*k, &[]));
                }
                if let Some(k) = pb {
                    self.conj_mat1(q1, &mat1(*k, &[]));
                }
                parts.push((p / 15.0, self.rho.clone()));
            }
        }
        self.rho = Self::mix(parts);
    }

    /// Reset channel with failure probability `p`: with probability `1-p`
    /// the qubit is projected and reinitialized to |0>, with probability `p`
    /// the reinitialization is skipped and the qubit keeps its (dephased)
    /// measured value.
    pub fn reset_error(&mut self, q: usize, p: f64) {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        // Kraus sets applied as rho -> sum_K K rho K^dagger
        let reset: [Mat2; 2] = [[[o, z], [z, z]], [[z, o], [z, z]]];
        let dephase: [Mat2; 2] = [[[o, z], [z, z]], [[z, z], [z, o]]];
        let base = self.rho.clone();
        let mut parts = Vec::new();
        for (w, set) in [(1.0 - p, &reset), (p, &dephase)] {
            for k in set {
                self.rho = base.clone();
                self.left_mul_mat1(q, k);
                self.adjoint();
                self.left_mul_mat1(q, k);
                self.adjoint();
                parts.push((w, self.rho.clone()));
            }
        }
        self.rho = Self::mix(parts);
    }

    /// Terminal-measurement outcome distribution over clbit keys, readout
    /// flips applied as classical mixing.
    pub fn distribution(
        &self,
        measured: &[(usize, usize)],
        readout_flip: &[(usize, f64)],
    ) -> HashMap<u64, f64> {
        let mut dist: HashMap<u64, f64> = HashMap::new();
        for zst in 0..self.dim {
            let p = self.rho[zst * self.dim + zst].re;
            if p <= 0.0 {
                continue;
            }
            let mut key = 0u64;
            for &(q, cl) in measured {
                if zst & (1 << q) != 0 {
                    key |= 1 << cl;
                }
            }
            *dist.entry(key).or_insert(0.0) += p;
        }
        for &(cl, p) in readout_flip {
            if p == 0.0 {
                continue;
            }
            let mut next: HashMap<u64, f64> = HashMap::new();
            for (&k, &w) in &dist {
                *next.entry(k).or_insert(0.0) += w * (1.0 - p);
                *next.entry(k ^ (1 << cl)).or_insert(0.0) += w * p;
            }
            dist = next;
        }
        dist
    }
}

/// Run a small circuit with terminal measurements through the density-matrix
/// oracle under a per-instruction channel assignment.
pub fn density_oracle_distribution(circuit: &Circuit, noise: &NoiseSpec) -> HashMap<u64, f64> {
    assert_eq!(noise.assignments.len(), circuit.instructions.len());
    let mut oracle = DensityOracle::new(circuit.num_qubits);
    let mut measured: Vec<(usize, usize)> = Vec::new();
    let mut readout: Vec<(usize, f64)> = Vec::new();
    for (i, instr) in circuit.instructions.iter().enumerate() {
        let channel = noise.assignments[i];
        match instr.kind {
            GateKind::Barrier | GateKind::VirtualGate => {}
            GateKind::Measure => {
                for (&q, &cl) in instr.qubits.iter().zip(&instr.clbits) {
                    measured.push((q, cl));
                    if let ErrorChannel::ReadoutFlip { p } = channel {
                        readout.push((cl, p));
                    }
                }
            }
            GateKind::Reset => {
                let p = match channel {
                    ErrorChannel::ResetError { p } => p,
                    ErrorChannel::None => 0.0,
                    other => panic!("bad reset channel {other:?}"),
                };
                for &q in &instr.qubits {
                    oracle.reset_error(q, p);
                }
            }
            _ => {
                assert!(instr.condition.is_none(), "oracle does not model conditions");
                oracle.apply_unitary(instr);
                match channel {
                    ErrorChannel::None => {}
                    ErrorChannel::Depolarizing1q { p } => oracle.depolarize_1q(instr.qubits[0], p),
                    ErrorChannel::Depolarizing2q { p } | ErrorChannel::EprDepolarizing { p } => {
                        oracle.depolarize_2q(instr.qubits[0], instr.qubits[1], p)
                    }
                    other => panic!("bad unitary channel {other:?}"),
                }
            }
        }
    }
    oracle.distribution(&measured, &readout)
}

// ---------------------------------------------------------------------------
// Entanglement-cost instruction scan
// ---------------------------------------------------------------------------

/// Hop count between two QPUs by breadth-first search over the optical edge
/// list.
pub fn bfs_hops(spec: &ArchitectureSpec, from: &str, to: &str) -> Option<usize> {
    if from == to {
        return Some(0);
    }
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in &spec.network.edges {
        adj.entry(&e.a).or_default().push(&e.b);
        adj.entry(&e.b).or_default().push(&e.a);
    }
    let mut dist: HashMap<&str, usize> = HashMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        for &v in adj.get(u).into_iter().flatten() {
            if !dist.contains_key(v) {
                if v == to {
                    return Some(d + 1);
                }
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    None
}

/// Total EPR pairs a circuit must consume on a given partition: every
/// cross-QPU two-qubit unitary costs (remote CX count of its kind) x (hops
/// between the two QPUs).
pub fn epr_cost_scan(circuit: &Circuit, partition: &PartitionMap, spec: &ArchitectureSpec) -> usize {
    let mut total = 0;
    for instr in &circuit.instructions {
        if !instr.is_two_qubit_unitary() {
            continue;
        }
        let a = partition.qpu_of_data_qubit(instr.qubits[0]);
        let b = partition.qpu_of_data_qubit(instr.qubits[1]);
        if a == b {
            continue;
        }
        let remote_cx = match instr.kind {
            GateKind::CX | GateKind::CZ => 1,
            GateKind::RZZ | GateKind::RXX => 2,
            GateKind::Swap => 3,
            _ => unreachable!(),
        };
        let hops = bfs_hops(spec, a, b).expect("partition spans a disconnected network");
        total += remote_cx * hops;
    }
    total
}
