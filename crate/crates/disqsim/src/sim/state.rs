//! Dense statevector with lazy qubit activation.
//!
//! Qubits start in a classical |0⟩/|1⟩ slot and only join the dense
//! amplitude vector when a gate forces superposition or entanglement.
//! Measurement and reset collapse a qubit back to a classical slot and
//! compact the vector, so the live dimension tracks the entangled width of
//! the circuit rather than its total register size. This is what makes
//! trajectory sampling of communication-heavy circuits affordable.

use crate::circuit::{GateKind, Instruction};
use crate::error::{Error, Result};
use crate::sim::gates::{self, Mat2, Mat4};
use num_complex::Complex64 as C;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Classical(bool),
    Active(usize),
}

#[derive(Debug, Clone)]
pub struct Statevector {
    amps: Vec<C>,
    slots: Vec<Slot>,
    /// Qubit id per active bit position.
    active: Vec<usize>,
    /// Maximum simultaneously active qubits.
    limit: usize,
}

pub const DEFAULT_QUBIT_LIMIT: usize = 26;

impl Statevector {
    pub fn new(num_qubits: usize, limit: usize) -> Statevector {
        Statevector {
            amps: vec![C::new(1.0, 0.0)],
            slots: vec![Slot::Classical(false); num_qubits],
            active: Vec::new(),
            limit,
        }
    }

    pub fn num_active(&self) -> usize {
        self.active.len()
    }

    pub fn slot(&self, qubit: usize) -> Slot {
        self.slots[qubit]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn activate(&mut self, qubit: usize) -> Result<usize> {
        match self.slots[qubit] {
            Slot::Active(bit) => Ok(bit),
            Slot::Classical(value) => {
                if self.active.len() >= self.limit {
                    return Err(Error::QubitLimit {
                        needed: self.active.len() + 1,
                        limit: self.limit,
                    });
                }
                let bit = self.active.len();
                let len = self.amps.len();
                if value {
                    // state ⊗ |1⟩ with the new bit as the highest position
                    let mut new = vec![C::new(0.0, 0.0); 2 * len];
                    new[len..].copy_from_slice(&self.amps);
                    self.amps = new;
                } else {
                    self.amps.resize(2 * len, C::new(0.0, 0.0));
                }
                self.active.push(qubit);
                self.slots[qubit] = Slot::Active(bit);
                Ok(bit)
            }
        }
    }

    /// Remove an active bit whose qubit has collapsed to `value`. The caller
    /// must already have projected the state onto that value.
    fn deactivate(&mut self, qubit: usize, value: bool) {
        let bit = match self.slots[qubit] {
            Slot::Active(bit) => bit,
            Slot::Classical(_) => {
                self.slots[qubit] = Slot::Classical(value);
                return;
            }
        };
        let len = self.amps.len();
        let mask = 1usize << bit;
        let low_mask = mask - 1;
        let mut new = Vec::with_capacity(len / 2);
        let v = if value { mask } else { 0 };
        for i in 0..len / 2 {
            let idx = ((i & !low_mask) << 1) | v | (i & low_mask);
            new.push(self.amps[idx]);
        }
        self.amps = new;
        self.active.remove(bit);
        self.slots[qubit] = Slot::Classical(value);
        for (pos, &q) in self.active.iter().enumerate().skip(bit) {
            self.slots[q] = Slot::Active(pos);
        }
    }

    fn apply_mat1(&mut self, qubit: usize, m: &Mat2) -> Result<()> {
        let bit = self.activate(qubit)?;
        let mask = 1usize << bit;
        let low = mask - 1;
        for k in 0..self.amps.len() / 2 {
            let i0 = ((k & !low) << 1) | (k & low);
            let i1 = i0 | mask;
            let a = self.amps[i0];
            let b = self.amps[i1];
            self.amps[i0] = m[0][0] * a + m[0][1] * b;
            self.amps[i1] = m[1][0] * a + m[1][1] * b;
        }
        Ok(())
    }

    /// Indices with zeros at both active bit positions (`lo < hi` as masks).
    #[inline]
    fn spread2(k: usize, lo: usize, hi: usize) -> usize {
        let t = ((k & !(lo - 1)) << 1) | (k & (lo - 1));
        ((t & !(hi - 1)) << 1) | (t & (hi - 1))
    }

    fn apply_mat2(&mut self, q0: usize, q1: usize, m: &Mat4) -> Result<()> {
        let b0 = self.activate(q0)?;
        let b1 = self.activate(q1)?;
        let m0 = 1usize << b0;
        let m1 = 1usize << b1;
        let (lo, hi) = (m0.min(m1), m0.max(m1));
        for k in 0..self.amps.len() / 4 {
            let i00 = Self::spread2(k, lo, hi);
            let i01 = i00 | m1;
            let i10 = i00 | m0;
            let i11 = i00 | m0 | m1;
            let a = [self.amps[i00], self.amps[i01], self.amps[i10], self.amps[i11]];
            for (r, &idx) in [i00, i01, i10, i11].iter().enumerate() {
                self.amps[idx] =
                    m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
            }
        }
        self.try_deactivate_classical(q0);
        self.try_deactivate_classical(q1);
        Ok(())
    }

    /// If an active qubit's nonzero support lies entirely on one side, the
    /// qubit is unentangled and classical; compact it out of the dense
    /// vector. Swap chains lowered to CX triples constantly push data
    /// through scratch positions and leave exact zeros behind, so without
    /// this sweep the live dimension grows to the full register width.
    fn try_deactivate_classical(&mut self, qubit: usize) {
        let Slot::Active(bit) = self.slots[qubit] else { return };
        let mask = 1usize << bit;
        let low = mask - 1;
        let zero = C::new(0.0, 0.0);
        let mut any0 = false;
        let mut any1 = false;
        for k in 0..self.amps.len() / 2 {
            let i0 = ((k & !low) << 1) | (k & low);
            any0 |= self.amps[i0] != zero;
            any1 |= self.amps[i0 | mask] != zero;
            if any0 && any1 {
                return;
            }
        }
        if any0 != any1 {
            self.deactivate(qubit, any1);
        }
    }

    /// Diagonal single-qubit gate on an already-active qubit.
    fn apply_diag1(&mut self, bit: usize, d0: C, d1: C) {
        let mask = 1usize << bit;
        let low = mask - 1;
        let one = C::new(1.0, 0.0);
        for k in 0..self.amps.len() / 2 {
            let i0 = ((k & !low) << 1) | (k & low);
            if d0 != one {
                self.amps[i0] *= d0;
            }
            if d1 != one {
                self.amps[i0 | mask] *= d1;
            }
        }
    }

    /// X on an already-active qubit: pairwise amplitude swap.
    fn apply_x_active(&mut self, bit: usize) {
        let mask = 1usize << bit;
        let low = mask - 1;
        for k in 0..self.amps.len() / 2 {
            let i0 = ((k & !low) << 1) | (k & low);
            self.amps.swap(i0, i0 | mask);
        }
    }

    /// Apply a unitary instruction, exploiting classical slots where the
    /// gate action stays classical (Pauli-X flips, classical CX controls,
    /// diagonal phases).
    pub fn apply_unitary(&mut self, instr: &Instruction) -> Result<()> {
        debug_assert!(instr.kind.is_unitary());
        match instr.kind {
            GateKind::X => match self.slots[instr.qubits[0]] {
                Slot::Classical(v) => {
                    self.slots[instr.qubits[0]] = Slot::Classical(!v);
                    return Ok(());
                }
                Slot::Active(bit) => {
                    self.apply_x_active(bit);
                    return Ok(());
                }
            },
            // Diagonal 1q gates contribute only a global phase on a
            // classical slot; probabilities are unaffected.
            GateKind::Z | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg
            | GateKind::RZ => match self.slots[instr.qubits[0]] {
                Slot::Classical(_) => return Ok(()),
                Slot::Active(bit) => {
                    let m = gates::mat1(instr.kind, &instr.params)
                        .expect("diagonal gates have 1q matrices");
                    self.apply_diag1(bit, m[0][0], m[1][1]);
                    return Ok(());
                }
            },
            GateKind::CX => {
                if let Slot::Classical(c) = self.slots[instr.qubits[0]] {
                    if c {
                        return self.apply_unitary(&Instruction::x(instr.qubits[1]));
                    }
                    return Ok(());
                }
                if let (Slot::Active(bc), Slot::Active(bt)) =
                    (self.slots[instr.qubits[0]], self.slots[instr.qubits[1]])
                {
                    // swap target pairs in the control-set subspace
                    let (mc, mt) = (1usize << bc, 1usize << bt);
                    let (lo, hi) = (mc.min(mt), mc.max(mt));
                    for k in 0..self.amps.len() / 4 {
                        let i = Self::spread2(k, lo, hi) | mc;
                        self.amps.swap(i, i | mt);
                    }
                    self.try_deactivate_classical(instr.qubits[0]);
                    self.try_deactivate_classical(instr.qubits[1]);
                    return Ok(());
                }
            }
            GateKind::CZ => {
                let (a, b) = (instr.qubits[0], instr.qubits[1]);
                for (cl, other) in [(a, b), (b, a)] {
                    if let Slot::Classical(v) = self.slots[cl] {
                        if v {
                            return self.apply_unitary(&Instruction::gate(GateKind::Z, [other]));
                        }
                        return Ok(());
                    }
                }
                if let (Slot::Active(b0), Slot::Active(b1)) = (self.slots[a], self.slots[b]) {
                    let (m0, m1) = (1usize << b0, 1usize << b1);
                    let (lo, hi) = (m0.min(m1), m0.max(m1));
                    for k in 0..self.amps.len() / 4 {
                        let i = Self::spread2(k, lo, hi) | m0 | m1;
                        self.amps[i] = -self.amps[i];
                    }
                    return Ok(());
                }
            }
            GateKind::Swap => {
                let (a, b) = (instr.qubits[0], instr.qubits[1]);
                let (sa, sb) = (self.slots[a], self.slots[b]);
                self.slots[a] = sb;
                self.slots[b] = sa;
                if let Slot::Active(bit) = self.slots[a] {
                    self.active[bit] = a;
                }
                if let Slot::Active(bit) = self.slots[b] {
                    self.active[bit] = b;
                }
                return Ok(());
            }
            GateKind::RZZ => {
                let (a, b) = (instr.qubits[0], instr.qubits[1]);
                for (cl, other) in [(a, b), (b, a)] {
                    if let Slot::Classical(v) = self.slots[cl] {
                        let theta = if v { -instr.params[0] } else { instr.params[0] };
                        if matches!(self.slots[other], Slot::Classical(_)) {
                            return Ok(()); // pure global phase
                        }
                        return self.apply_unitary(&Instruction::rz(theta, other));
                    }
                }
                if let (Slot::Active(b0), Slot::Active(b1)) = (self.slots[a], self.slots[b]) {
                    // diag(e^{-iθ/2}, e^{iθ/2}, e^{iθ/2}, e^{-iθ/2}) by the
                    // parity of the two bits
                    let (m0, m1) = (1usize << b0, 1usize << b1);
                    let even = C::from_polar(1.0, -instr.params[0] / 2.0);
                    let odd = C::from_polar(1.0, instr.params[0] / 2.0);
                    for (i, amp) in self.amps.iter_mut().enumerate() {
                        let parity = ((i & m0 != 0) as u8) ^ ((i & m1 != 0) as u8);
                        *amp *= if parity == 1 { odd } else { even };
                    }
                    return Ok(());
                }
            }
            _ => {}
        }
        match instr.qubits.len() {
            1 => {
                let m = gates::mat1(instr.kind, &instr.params)
                    .ok_or_else(|| Error::Internal(format!("no 1q matrix for {}", instr.kind.name())))?;
                self.apply_mat1(instr.qubits[0], &m)
            }
            2 => {
                let m = gates::mat2(instr.kind, &instr.params)
                    .ok_or_else(|| Error::Internal(format!("no 2q matrix for {}", instr.kind.name())))?;
                self.apply_mat2(instr.qubits[0], instr.qubits[1], &m)
            }
            n => Err(Error::Internal(format!("unitary on {n} qubits"))),
        }
    }

    /// Probability of measuring |1⟩ on a qubit.
    pub fn prob_one(&self, qubit: usize) -> f64 {
        match self.slots[qubit] {
            Slot::Classical(v) => {
                if v {
                    1.0
                } else {
                    0.0
                }
            }
            Slot::Active(bit) => {
                let mask = 1usize << bit;
                self.amps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & mask != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum()
            }
        }
    }

    /// Project a qubit onto `outcome`, renormalize and collapse the qubit
    /// back to a classical slot. Returns the pre-projection probability of
    /// that outcome.
    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> f64 {
        match self.slots[qubit] {
            Slot::Classical(v) => {
                if v == outcome {
                    1.0
                } else {
                    0.0
                }
            }
            Slot::Active(bit) => {
                let p1 = self.prob_one(qubit);
                let p = if outcome { p1 } else { 1.0 - p1 };
                if p <= 0.0 {
                    return 0.0;
                }
                let mask = 1usize << bit;
                let want = if outcome { mask } else { 0 };
                let scale = 1.0 / p.sqrt();
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == want {
                        *a *= scale;
                    } else {
                        *a = C::new(0.0, 0.0);
                    }
                }
                self.deactivate(qubit, outcome);
                p
            }
        }
    }

    /// Sample a measurement outcome, collapsing the state.
    pub fn measure(&mut self, qubit: usize, rng: &mut impl Rng) -> bool {
        let p1 = self.prob_one(qubit);
        let outcome = rng.gen::<f64>() < p1;
        self.collapse(qubit, outcome);
        outcome
    }

    /// Reset a qubit to |0⟩ (measure-and-flip semantics).
    pub fn reset(&mut self, qubit: usize, rng: &mut impl Rng) {
        self.measure(qubit, rng);
        self.slots[qubit] = Slot::Classical(false);
    }

    /// Apply a Pauli (1 = X, 2 = Y, 3 = Z) for trajectory noise sampling.
    pub fn apply_pauli(&mut self, qubit: usize, pauli: u8) -> Result<()> {
        let kind = match pauli {
            0 => return Ok(()),
            1 => GateKind::X,
            2 => GateKind::Y,
            3 => GateKind::Z,
            _ => return Err(Error::Internal(format!("pauli index {pauli}"))),
        };
        self.apply_unitary(&Instruction::gate(kind, [qubit]))
    }

    /// Joint outcome distribution over the given qubits (in the given
    /// order: qubit k supplies bit k of the key). Classical slots contribute
    /// their fixed value.
    pub fn distribution_over(&self, qubits: &[usize]) -> Vec<(u64, f64)> {
        let mut fixed: u64 = 0;
        let mut active_bits: Vec<(usize, usize)> = Vec::new(); // (key bit, state bit)
        for (k, &q) in qubits.iter().enumerate() {
            match self.slots[q] {
                Slot::Classical(v) => {
                    if v {
                        fixed |= 1 << k;
                    }
                }
                Slot::Active(bit) => active_bits.push((k, bit)),
            }
        }
        let mut map: std::collections::HashMap<u64, f64> = std::collections::HashMap::new();
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            let mut key = fixed;
            for &(k, bit) in &active_bits {
                if i & (1 << bit) != 0 {
                    key |= 1 << k;
                }
            }
            *map.entry(key).or_insert(0.0) += w;
        }
        let mut out: Vec<(u64, f64)> = map.into_iter().collect();
        out.sort_unstable_by_key(|&(k, _)| k);
        out
    }

    /// |⟨self|other⟩| for branch merging; requires identical slot layouts.
    pub fn overlap_abs(&self, other: &Statevector) -> Option<f64> {
        if self.slots != other.slots || self.amps.len() != other.amps.len() {
            return None;
        }
        let ip: C = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Some(ip.norm())
    }

    pub fn slots_signature(&self) -> &[Slot] {
        &self.slots
    }
}
