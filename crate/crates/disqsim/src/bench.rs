//! Benchmark circuit generators with fixed parameters, so golden results
//! are reproducible run to run.

use crate::circuit::{Circuit, GateKind, Instruction};
use crate::error::{Error, Result};
use crate::sim::{run_exact, top_outcome};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkName {
    Ghz,
    Tfim,
    Qaoa,
    Vqe,
    FullAdder,
    QecSteane,
}

impl BenchmarkName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkName::Ghz => "ghz",
            BenchmarkName::Tfim => "tfim",
            BenchmarkName::Qaoa => "qaoa",
            BenchmarkName::Vqe => "vqe",
            BenchmarkName::FullAdder => "fulladder",
            BenchmarkName::QecSteane => "qec-steane",
        }
    }

    pub fn from_str(name: &str) -> Option<BenchmarkName> {
        Some(match name {
            "ghz" => BenchmarkName::Ghz,
            "tfim" => BenchmarkName::Tfim,
            "qaoa" => BenchmarkName::Qaoa,
            "vqe" => BenchmarkName::Vqe,
            "fulladder" => BenchmarkName::FullAdder,
            "qec-steane" => BenchmarkName::QecSteane,
            _ => return None,
        })
    }

    pub fn default_qubits(&self) -> usize {
        match self {
            BenchmarkName::Ghz => 16,
            BenchmarkName::Tfim => 12,
            BenchmarkName::Qaoa => 8,
            BenchmarkName::Vqe => 10,
            BenchmarkName::FullAdder => 12,
            BenchmarkName::QecSteane => 13,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchmarkSpec {
    pub name: BenchmarkName,
    pub qubits: usize,
}

impl BenchmarkSpec {
    pub fn new(name: BenchmarkName) -> BenchmarkSpec {
        BenchmarkSpec {
            name,
            qubits: name.default_qubits(),
        }
    }
}

/// The six default benchmark instances.
pub fn default_suite() -> Vec<BenchmarkSpec> {
    [
        BenchmarkName::Ghz,
        BenchmarkName::Tfim,
        BenchmarkName::Qaoa,
        BenchmarkName::Vqe,
        BenchmarkName::FullAdder,
        BenchmarkName::QecSteane,
    ]
    .into_iter()
    .map(BenchmarkSpec::new)
    .collect()
}

fn measure_all(c: &mut Circuit) {
    for q in 0..c.num_qubits {
        c.add(Instruction::measure(q, q));
    }
}

/// GHZ state preparation: H + CX chain.
pub fn ghz(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Schema("ghz requires at least 2 qubits".into()));
    }
    let mut c = Circuit::new(n, n);
    c.add(Instruction::h(0));
    for q in 0..n - 1 {
        c.add(Instruction::cx(q, q + 1));
    }
    measure_all(&mut c);
    Ok(c)
}

#[derive(Deserialize)]
struct TfimParams {
    steps: usize,
    rzz_angle: f64,
    rx_angle: f64,
}

/// Trotterized transverse-field Ising chain with shipped fixed parameters.
pub fn tfim(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Schema("tfim requires at least 2 qubits".into()));
    }
    let params: TfimParams = toml::from_str(include_str!("../params/tfim.toml"))
        .map_err(|e| Error::Schema(format!("tfim parameter file: {e}")))?;
    let mut c = Circuit::new(n, n);
    for q in 0..n {
        c.add(Instruction::h(q));
    }
    for _ in 0..params.steps {
        for q in 0..n - 1 {
            c.add(Instruction::rot(GateKind::RZZ, params.rzz_angle, [q, q + 1]));
        }
        for q in 0..n {
            c.add(Instruction::rot(GateKind::RX, params.rx_angle, [q]));
        }
    }
    measure_all(&mut c);
    Ok(c)
}

/// Complete-graph MaxCut QAOA ansatz, p = 2, fixed angles.
pub fn qaoa(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Schema("qaoa requires at least 2 qubits".into()));
    }
    let gammas = [0.4, 0.9];
    let betas = [0.7, 0.3];
    let mut c = Circuit::new(n, n);
    for q in 0..n {
        c.add(Instruction::h(q));
    }
    for layer in 0..2 {
        for a in 0..n {
            for b in a + 1..n {
                c.add(Instruction::rot(GateKind::RZZ, gammas[layer], [a, b]));
            }
        }
        for q in 0..n {
            c.add(Instruction::rot(GateKind::RX, 2.0 * betas[layer], [q]));
        }
    }
    measure_all(&mut c);
    Ok(c)
}

/// Hardware-efficient VQE ansatz: RY layer, CX chain, RY layer; fixed
/// angles.
pub fn vqe(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Schema("vqe requires at least 2 qubits".into()));
    }
    let mut c = Circuit::new(n, n);
    for q in 0..n {
        c.add(Instruction::rot(GateKind::RY, 0.2 + 0.1 * q as f64, [q]));
    }
    for q in 0..n - 1 {
        c.add(Instruction::cx(q, q + 1));
    }
    for q in 0..n {
        c.add(Instruction::rot(GateKind::RY, 0.15 + 0.05 * q as f64, [q]));
    }
    measure_all(&mut c);
    Ok(c)
}

/// Standard 6-CX Toffoli decomposition.
fn ccx(c: &mut Circuit, a: usize, b: usize, t: usize) {
    use GateKind::*;
    c.add(Instruction::h(t));
    c.add(Instruction::cx(b, t));
    c.add(Instruction::gate(Tdg, [t]));
    c.add(Instruction::cx(a, t));
    c.add(Instruction::gate(T, [t]));
    c.add(Instruction::cx(b, t));
    c.add(Instruction::gate(Tdg, [t]));
    c.add(Instruction::cx(a, t));
    c.add(Instruction::gate(T, [b]));
    c.add(Instruction::gate(T, [t]));
    c.add(Instruction::h(t));
    c.add(Instruction::cx(a, b));
    c.add(Instruction::gate(T, [a]));
    c.add(Instruction::gate(Tdg, [b]));
    c.add(Instruction::cx(a, b));
}

/// Ripple-carry adder (MAJ/UMA construction) computing b ← a + b + cin on
/// an interleaved layout (cin, b0, a0, b1, a1, …, cout), with fixed inputs
/// a = 1, b = 1, cin = 1. Deterministic output.
pub fn fulladder(n: usize) -> Result<Circuit> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Schema(
            "fulladder requires an even qubit count ≥ 4 (cin + bit pairs + cout)".into(),
        ));
    }
    let bits = (n - 2) / 2;
    let cin = 0;
    let b = |i: usize| 1 + 2 * i;
    let a = |i: usize| 2 + 2 * i;
    let cout = n - 1;
    let carry = |i: usize| if i == 0 { cin } else { a(i - 1) };

    let mut c = Circuit::new(n, n);
    // inputs a = 1, b = 1, cin = 1
    c.add(Instruction::x(cin));
    c.add(Instruction::x(b(0)));
    c.add(Instruction::x(a(0)));

    let maj = |c: &mut Circuit, i: usize| {
        c.add(Instruction::cx(a(i), b(i)));
        c.add(Instruction::cx(a(i), carry(i)));
        ccx(c, carry(i), b(i), a(i));
    };
    let uma = |c: &mut Circuit, i: usize| {
        ccx(c, carry(i), b(i), a(i));
        c.add(Instruction::cx(a(i), carry(i)));
        c.add(Instruction::cx(carry(i), b(i)));
    };

    for i in 0..bits {
        maj(&mut c, i);
    }
    c.add(Instruction::cx(a(bits - 1), cout));
    for i in (0..bits).rev() {
        uma(&mut c, i);
    }
    measure_all(&mut c);
    Ok(c)
}

/// Steane [[7,1,3]] |0⟩ encoding plus one syndrome-extraction round with 6
/// ancillas. The encoder prepares the uniform superposition over the 8
/// codewords; all stabilizer measurements read 0 deterministically.
pub fn qec_steane(n: usize) -> Result<Circuit> {
    if n != 13 {
        return Err(Error::Schema(
            "qec-steane is defined on 13 qubits (7 data + 6 ancilla)".into(),
        ));
    }
    // parity-check supports of the [7,4] Hamming code (0-indexed)
    const STABS: [[usize; 4]; 3] = [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]];
    let mut c = Circuit::new(13, 13);
    // encoder: H on the pivot of each generator row, CX fan-out
    for (pivot, row) in [(0usize, STABS[0]), (1, STABS[1]), (3, STABS[2])] {
        c.add(Instruction::h(pivot));
        for &q in row.iter().filter(|&&q| q != pivot) {
            c.add(Instruction::cx(pivot, q));
        }
    }
    // X-stabilizer round (ancillas 7..10)
    for (k, row) in STABS.iter().enumerate() {
        let anc = 7 + k;
        c.add(Instruction::h(anc));
        for &q in row {
            c.add(Instruction::cx(anc, q));
        }
        c.add(Instruction::h(anc));
    }
    // Z-stabilizer round (ancillas 10..13)
    for (k, row) in STABS.iter().enumerate() {
        let anc = 10 + k;
        for &q in row {
            c.add(Instruction::cx(q, anc));
        }
    }
    measure_all(&mut c);
    Ok(c)
}

/// Generate a benchmark circuit.
pub fn generate(spec: &BenchmarkSpec) -> Result<Circuit> {
    match spec.name {
        BenchmarkName::Ghz => ghz(spec.qubits),
        BenchmarkName::Tfim => tfim(spec.qubits),
        BenchmarkName::Qaoa => qaoa(spec.qubits),
        BenchmarkName::Vqe => vqe(spec.qubits),
        BenchmarkName::FullAdder => fulladder(spec.qubits),
        BenchmarkName::QecSteane => qec_steane(spec.qubits),
    }
}

/// Golden result: most probable outcome of the noise-free exact simulation
/// (computed, never hard-coded).
pub fn golden(spec: &BenchmarkSpec) -> Result<(u64, f64)> {
    let c = generate(spec)?;
    let dist = run_exact(&c, c.num_clbits)?;
    top_outcome(&dist).ok_or_else(|| Error::Internal("empty outcome distribution".into()))
}
