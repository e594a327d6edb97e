//! End-to-end acceptance gate. Each criterion prints one PASS/FAIL line;
//! run with `cargo test --test acceptance -- --nocapture` to see them all.

mod common;

use disqsim::arch::{
    presets, ArchitectureSpec, NetworkEdge, NetworkTopology, PartitionMap, QpuProfile,
};
use disqsim::assembler::assemble;
use disqsim::bench::{self, BenchmarkName, BenchmarkSpec};
use disqsim::circuit::{circuit_metrics, Circuit, GateKind, Instruction};
use disqsim::constructor::{construct, GlobalLayout, QpuLayout};
use disqsim::isolator::{CutCase, IsolationBundle, Side, SubCircuit, SyncPoint, VirtualGateRecord};
use disqsim::noise::{transmissivity, DeviceNoiseProfile, ErrorChannel, NoiseSpec};
use disqsim::pipeline::{self, PipelineOptions};
use disqsim::sim::{format_bitstring, run_exact, run_shots};
use disqsim::transpiler::{transpile, transpile_bundle};
use disqsim::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

type CheckResult = Result<String, String>;

fn distributed_archs() -> Vec<ArchitectureSpec> {
    ["arch-b", "arch-c", "arch-d", "arch-e"]
        .iter()
        .map(|n| presets::get(n).unwrap())
        .collect()
}

fn noise_free_opts() -> PipelineOptions {
    PipelineOptions {
        kappa: 0.0,
        ..PipelineOptions::default()
    }
}

/// Noise-free distributed runs reproduce the monolithic distribution exactly
/// (L-inf <= 1e-9) and shot-mode top-state frequencies stay within 3 sigma;
/// the whole sweep finishes within five minutes.
fn c01_noise_free_equivalence() -> CheckResult {
    let start = Instant::now();
    let mut worst_linf = 0.0f64;
    let mut worst_shot_sigma = 0.0f64;
    for spec in distributed_archs() {
        let spec = spec.with_zero_noise();
        for b in bench::default_suite() {
            let mono = bench::generate(&b).map_err(|e| e.to_string())?;
            let width = mono.num_clbits;
            let ideal = run_exact(&mono, width).map_err(|e| e.to_string())?;

            let opts = PipelineOptions { exact: true, ..noise_free_opts() };
            let rep = pipeline::run_benchmark(&b, &spec, &opts).map_err(|e| {
                format!("{} on {}: {e}", b.name.as_str(), spec.name)
            })?;
            let ideal_map: std::collections::BTreeMap<String, f64> = ideal
                .iter()
                .map(|(&k, &p)| (format_bitstring(k, width), p))
                .collect();
            let keys: std::collections::BTreeSet<&String> =
                ideal_map.keys().chain(rep.distribution.keys()).collect();
            for key in keys {
                let want = ideal_map.get(key).copied().unwrap_or(0.0);
                let got = rep.distribution.get(key).copied().unwrap_or(0.0);
                worst_linf = worst_linf.max((got - want).abs());
            }
            if worst_linf > 1e-9 {
                return Err(format!(
                    "{} on {}: exact L-inf {worst_linf:.3e} exceeds 1e-9",
                    b.name.as_str(),
                    spec.name
                ));
            }

            let shot_opts = PipelineOptions { shots: 10_000, ..noise_free_opts() };
            let rep = pipeline::run_benchmark(&b, &spec, &shot_opts).map_err(|e| e.to_string())?;
            let (top, p_top) = bench::golden(&b).map_err(|e| e.to_string())?;
            let observed = rep
                .distribution
                .get(&format_bitstring(top, width))
                .copied()
                .unwrap_or(0.0);
            let sigma = (p_top * (1.0 - p_top) / 10_000.0).sqrt();
            let dev = (observed - p_top).abs();
            if dev > 3.0 * sigma + 1e-12 {
                return Err(format!(
                    "{} on {}: shot top-state prob {observed:.4} vs ideal {p_top:.4} deviates {:.1} sigma",
                    b.name.as_str(),
                    spec.name,
                    dev / sigma.max(1e-12)
                ));
            }
            if sigma > 0.0 {
                worst_shot_sigma = worst_shot_sigma.max(dev / sigma);
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() > 300 {
        return Err(format!("sweep took {elapsed:.0?} (> 5 min)"));
    }
    Ok(format!(
        "6 benchmarks x 4 architectures, worst exact L-inf {worst_linf:.2e}, worst shot deviation {worst_shot_sigma:.2} sigma, {elapsed:.1?}"
    ))
}

/// GHZ-16 splits its weight 50/50 and the 12-qubit adder is deterministic,
/// both monolithically and through the distributed pipeline.
fn c02_golden_outcomes() -> CheckResult {
    let ghz = BenchmarkSpec::new(BenchmarkName::Ghz);
    let (_, p_ghz) = bench::golden(&ghz).map_err(|e| e.to_string())?;
    if (p_ghz - 0.5).abs() > 1e-9 {
        return Err(format!("ghz-16 top prob {p_ghz} != 0.5"));
    }
    let adder = BenchmarkSpec::new(BenchmarkName::FullAdder);
    let (state, p_add) = bench::golden(&adder).map_err(|e| e.to_string())?;
    if (p_add - 1.0).abs() > 1e-9 {
        return Err(format!("fulladder-12 top prob {p_add} != 1.0"));
    }
    // and the distributed realization agrees
    let spec = presets::get("arch-b").unwrap().with_zero_noise();
    let opts = PipelineOptions { exact: true, ..noise_free_opts() };
    let rep = pipeline::run_benchmark(&ghz, &spec, &opts).map_err(|e| e.to_string())?;
    if (rep.top_prob - 0.5).abs() > 1e-9 {
        return Err(format!("distributed ghz-16 top prob {}", rep.top_prob));
    }
    let rep = pipeline::run_benchmark(&adder, &spec, &opts).map_err(|e| e.to_string())?;
    if (rep.top_prob - 1.0).abs() > 1e-9 {
        return Err(format!("distributed fulladder-12 top prob {}", rep.top_prob));
    }
    Ok(format!(
        "ghz-16 p={p_ghz:.9}, fulladder-12 state {state:#b} p={p_add:.9}, reproduced on arch-b"
    ))
}

/// Optical transmissivity reference values.
fn c03_transmissivity() -> CheckResult {
    let short = transmissivity(0.05, 0.2).map_err(|e| e.to_string())?;
    let long = transmissivity(0.05, 2.0).map_err(|e| e.to_string())?;
    if (short - 0.990049834).abs() > 1e-9 {
        return Err(format!("eta(0.05, 0.2) = {short:.10}"));
    }
    if (long - 0.904837418).abs() > 1e-9 {
        return Err(format!("eta(0.05, 2.0) = {long:.10}"));
    }
    Ok(format!("eta(0.05,0.2)={short:.9}, eta(0.05,2.0)={long:.9}"))
}

fn all_to_all_qpu(id: &str, n: usize) -> QpuProfile {
    QpuProfile {
        id: id.into(),
        num_qubits: n,
        coupling_map: Vec::new(),
        basis_gates: vec![GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX],
        noise: DeviceNoiseProfile::ZERO,
    }
}

fn random_topology(rng: &mut ChaCha8Rng) -> ArchitectureSpec {
    let n_qpus = rng.gen_range(2..=4usize);
    let ring = n_qpus >= 3 && rng.gen_bool(0.5);
    let qpus: Vec<QpuProfile> = (0..n_qpus)
        .map(|i| all_to_all_qpu(&format!("node-{i}"), 12))
        .collect();
    let mut edges: Vec<NetworkEdge> = (0..n_qpus - 1)
        .map(|i| NetworkEdge {
            a: format!("node-{i}"),
            b: format!("node-{}", i + 1),
            length_km: 0.2,
        })
        .collect();
    if ring {
        edges.push(NetworkEdge {
            a: format!("node-{}", n_qpus - 1),
            b: "node-0".into(),
            length_km: 0.2,
        });
    }
    ArchitectureSpec {
        name: if ring { "ring" } else { "line" }.into(),
        qpus,
        network: NetworkTopology { alpha: 0.05, edges },
        partition: None,
    }
}

fn random_partition(rng: &mut ChaCha8Rng, n_qubits: usize, spec: &ArchitectureSpec) -> PartitionMap {
    let k = spec.qpus.len().min(n_qubits);
    // every partition non-empty, the rest spread at random
    let mut qubits: Vec<usize> = (0..n_qubits)
        .map(|q| if q < k { q } else { rng.gen_range(0..k) })
        .collect();
    for i in (1..n_qubits).rev() {
        let j = rng.gen_range(0..=i);
        qubits.swap(i, j);
    }
    PartitionMap {
        qubits,
        mapping: spec.qpus.iter().take(k).map(|q| q.id.clone()).collect(),
    }
}

fn random_circuit(rng: &mut ChaCha8Rng, n_qubits: usize, n_gates: usize) -> Circuit {
    let one_q = [GateKind::H, GateKind::X, GateKind::RZ, GateKind::RY, GateKind::SX];
    let two_q = [GateKind::CX, GateKind::CZ, GateKind::Swap, GateKind::RZZ, GateKind::RXX];
    let mut c = Circuit::new(n_qubits, 0);
    for _ in 0..n_gates {
        if n_qubits >= 2 && rng.gen_bool(0.5) {
            let kind = two_q[rng.gen_range(0..two_q.len())];
            let a = rng.gen_range(0..n_qubits);
            let mut b = rng.gen_range(0..n_qubits);
            while b == a {
                b = rng.gen_range(0..n_qubits);
            }
            match kind.num_params() {
                0 => c.add(Instruction::gate(kind, [a, b])),
                _ => c.add(Instruction::rot(kind, rng.gen_range(-PI..PI), [a, b])),
            }
        } else {
            let kind = one_q[rng.gen_range(0..one_q.len())];
            let q = rng.gen_range(0..n_qubits);
            match kind.num_params() {
                0 => c.add(Instruction::gate(kind, [q])),
                _ => c.add(Instruction::rot(kind, rng.gen_range(-PI..PI), [q])),
            }
        }
    }
    c
}

/// Reported EPR consumption equals an independent instruction scan
/// (remote-CX multiplicity x hop count) on 50 random circuit/topology/
/// partition triples.
fn c04_epr_accounting() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut total_pairs = 0usize;
    for trial in 0..50 {
        let spec = random_topology(&mut rng);
        let n_qubits = rng.gen_range(2..=10usize);
        let n_gates = rng.gen_range(1..=40usize);
        let mono = random_circuit(&mut rng, n_qubits, n_gates);
        let pm = random_partition(&mut rng, n_qubits, &spec);
        let built = construct(&mono, &spec, &pm)
            .map_err(|e| format!("trial {trial}: construction failed: {e}"))?;
        let expected = common::epr_cost_scan(&mono, &pm, &spec);
        if built.epr_pairs != expected {
            return Err(format!(
                "trial {trial} ({}, {n_qubits}q/{n_gates}g): reported {} EPR pairs, scan says {expected}",
                spec.name, built.epr_pairs
            ));
        }
        total_pairs += expected;
    }
    Ok(format!("50 random triples, {total_pairs} EPR pairs accounted exactly"))
}

/// Generator shapes: ghz-16 size/2q-count/interaction density, qaoa-8
/// complete-graph density.
fn c05_generator_metrics() -> CheckResult {
    let ghz = bench::generate(&BenchmarkSpec { name: BenchmarkName::Ghz, qubits: 16 })
        .map_err(|e| e.to_string())?;
    let m = circuit_metrics(&ghz);
    if m.qubits != 16 || m.two_qubit_count != 15 || (m.igd - 0.125).abs() > 1e-12 {
        return Err(format!(
            "ghz-16: qubits {} two-qubit {} igd {}",
            m.qubits, m.two_qubit_count, m.igd
        ));
    }
    let qaoa = bench::generate(&BenchmarkSpec { name: BenchmarkName::Qaoa, qubits: 8 })
        .map_err(|e| e.to_string())?;
    let m2 = circuit_metrics(&qaoa);
    if m2.qubits != 8 || (m2.igd - 1.0).abs() > 1e-12 {
        return Err(format!("qaoa-8: qubits {} igd {}", m2.qubits, m2.igd));
    }
    Ok(format!(
        "ghz-16: 16q/15x2q/igd {:.3}; qaoa-8: 8q/igd {:.2}",
        m.igd, m2.igd
    ))
}

fn fidelity_of(bench_spec: &BenchmarkSpec, arch: &ArchitectureSpec, shots: u64, seed: u64) -> Result<f64, String> {
    let opts = PipelineOptions { shots, seed, ..PipelineOptions::default() };
    pipeline::run_benchmark(bench_spec, arch, &opts)
        .map(|r| r.fidelity)
        .map_err(|e| format!("{} on {}: {e}", bench_spec.name.as_str(), arch.name))
}

/// At the default 0.2 km link distance the distributed low-noise backends
/// beat the monolithic noisy baseline on every benchmark.
fn c06_distributed_beats_monolithic() -> CheckResult {
    let arch_a = presets::get("arch-a").unwrap();
    let arch_b = presets::get("arch-b").unwrap();
    let arch_d = presets::get("arch-d").unwrap();
    let mut lines = Vec::new();
    for b in bench::default_suite() {
        let fa = fidelity_of(&b, &arch_a, 2000, 11)?;
        let fb = fidelity_of(&b, &arch_b, 2000, 11)?;
        let fd = fidelity_of(&b, &arch_d, 2000, 11)?;
        if fb <= fa {
            return Err(format!(
                "{}: fidelity(arch-b)={fb:.4} <= fidelity(arch-a)={fa:.4}",
                b.name.as_str()
            ));
        }
        if fd <= fa {
            return Err(format!(
                "{}: fidelity(arch-d)={fd:.4} <= fidelity(arch-a)={fa:.4}",
                b.name.as_str()
            ));
        }
        lines.push(format!("{} a={fa:.3} b={fb:.3} d={fd:.3}", b.name.as_str()));
    }
    Ok(lines.join("; "))
}

/// Longer optical links never help: fidelity at 0.2 km >= fidelity at 2 km.
fn c07_distance_monotonicity() -> CheckResult {
    let base = presets::get("arch-b").unwrap();
    let mut lines = Vec::new();
    for name in [BenchmarkName::Ghz, BenchmarkName::Qaoa] {
        let b = BenchmarkSpec::new(name);
        let near = fidelity_of(&b, &base.with_distance(0.2), 10_000, 7)?;
        let far = fidelity_of(&b, &base.with_distance(2.0), 10_000, 7)?;
        if near < far {
            return Err(format!(
                "{}: fidelity(0.2km)={near:.4} < fidelity(2.0km)={far:.4}",
                name.as_str()
            ));
        }
        lines.push(format!("{} 0.2km={near:.3} 2.0km={far:.3}", name.as_str()));
    }
    Ok(lines.join("; "))
}

struct NoisyFixture {
    label: &'static str,
    circuit: Circuit,
    noise: NoiseSpec,
    width: usize,
}

fn noisy_fixtures() -> Vec<NoisyFixture> {
    let mut out = Vec::new();

    // depolarized superposition + noisy readout
    let mut c = Circuit::new(1, 1);
    c.add(Instruction::h(0));
    c.add(Instruction::measure(0, 0));
    out.push(NoisyFixture {
        label: "h+depol1q+readout",
        circuit: c,
        noise: NoiseSpec {
            assignments: vec![
                ErrorChannel::Depolarizing1q { p: 0.3 },
                ErrorChannel::ReadoutFlip { p: 0.1 },
            ],
            average_gate_noise: 0.2,
        },
        width: 1,
    });

    // Bell pair with a depolarized entangler and asymmetric readout
    let mut c = Circuit::new(2, 2);
    c.add(Instruction::h(0));
    c.add(Instruction::cx(0, 1));
    c.add(Instruction::measure(0, 0));
    c.add(Instruction::measure(1, 1));
    out.push(NoisyFixture {
        label: "bell+depol2q",
        circuit: c,
        noise: NoiseSpec {
            assignments: vec![
                ErrorChannel::None,
                ErrorChannel::Depolarizing2q { p: 0.2 },
                ErrorChannel::ReadoutFlip { p: 0.05 },
                ErrorChannel::None,
            ],
            average_gate_noise: 0.125,
        },
        width: 2,
    });

    // reset that fails with probability 0.4 leaves the excited state behind
    let mut c = Circuit::new(1, 1);
    c.add(Instruction::x(0));
    c.add(Instruction::reset(0));
    c.add(Instruction::measure(0, 0));
    out.push(NoisyFixture {
        label: "x+faulty-reset",
        circuit: c,
        noise: NoiseSpec {
            assignments: vec![
                ErrorChannel::None,
                ErrorChannel::ResetError { p: 0.4 },
                ErrorChannel::None,
            ],
            average_gate_noise: 0.4,
        },
        width: 1,
    });

    // three qubits mixing all channel kinds
    let mut c = Circuit::new(3, 3);
    c.add(Instruction::rot(GateKind::RY, 0.7, [0]));
    c.add(Instruction::cx(0, 1));
    c.add(Instruction::h(2));
    c.add(Instruction::cx(1, 2));
    c.add(Instruction::measure(0, 0));
    c.add(Instruction::measure(1, 1));
    c.add(Instruction::measure(2, 2));
    out.push(NoisyFixture {
        label: "3q-mixed-channels",
        circuit: c,
        noise: NoiseSpec {
            assignments: vec![
                ErrorChannel::Depolarizing1q { p: 0.1 },
                ErrorChannel::Depolarizing2q { p: 0.15 },
                ErrorChannel::None,
                ErrorChannel::EprDepolarizing { p: 0.3 },
                ErrorChannel::ReadoutFlip { p: 0.02 },
                ErrorChannel::ReadoutFlip { p: 0.02 },
                ErrorChannel::None,
            ],
            average_gate_noise: 0.118,
        },
        width: 3,
    });

    out
}

/// Trajectory sampling agrees with the density-matrix channel oracle within
/// 3 sigma per outcome at 100k shots.
fn c08_trajectories_match_density_oracle() -> CheckResult {
    const SHOTS: u64 = 100_000;
    let mut worst = 0.0f64;
    for fixture in noisy_fixtures() {
        let expected = common::density_oracle_distribution(&fixture.circuit, &fixture.noise);
        let counts = run_shots(&fixture.circuit, &fixture.noise, SHOTS, 88, fixture.width)
            .map_err(|e| format!("{}: {e}", fixture.label))?;
        let keys: std::collections::BTreeSet<u64> =
            expected.keys().copied().chain(counts.keys().copied()).collect();
        for key in keys {
            let p = expected.get(&key).copied().unwrap_or(0.0);
            let observed = counts.get(&key).copied().unwrap_or(0) as f64 / SHOTS as f64;
            let sigma = (p * (1.0 - p) / SHOTS as f64).sqrt();
            let dev = (observed - p).abs();
            if dev > 3.0 * sigma + 1e-9 {
                return Err(format!(
                    "{}: outcome {key:0width$b} observed {observed:.5} vs oracle {p:.5} ({:.1} sigma)",
                    fixture.label,
                    dev / sigma.max(1e-12),
                    width = fixture.width
                ));
            }
            if sigma > 0.0 {
                worst = worst.max(dev / sigma);
            }
        }
    }
    Ok(format!("4 fixtures x 100k shots, worst outcome deviation {worst:.2} sigma"))
}

/// Transpiled circuits are unitarily equivalent to their sources up to global
/// phase and the recorded output permutation, on both basis families.
fn c09_transpiler_unitary_equivalence() -> CheckResult {
    let vigo_coupling = vec![(0, 1), (1, 2), (1, 3), (3, 4)];
    let families = [
        (
            "rz-sx-x-cx",
            QpuProfile {
                id: "fam-cx".into(),
                num_qubits: 5,
                coupling_map: vigo_coupling.clone(),
                basis_gates: vec![GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX],
                noise: DeviceNoiseProfile::ZERO,
            },
        ),
        (
            "rx-ry-rz-rxx",
            QpuProfile {
                id: "fam-rxx".into(),
                num_qubits: 5,
                coupling_map: vigo_coupling,
                basis_gates: vec![GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::RXX],
                noise: DeviceNoiseProfile::ZERO,
            },
        ),
    ];
    let mut worst = 0.0f64;
    for (label, qpu) in families {
        let mut rng = ChaCha8Rng::seed_from_u64(90);
        for trial in 0..100 {
            // 4-qubit logical circuits on a 5-wire device
            let mut logical = Circuit::new(5, 0);
            for instr in random_circuit(&mut rng, 4, 12).instructions {
                logical.add(instr);
            }
            let sub = SubCircuit { qpu_id: qpu.id.clone(), circuit: logical.clone() };
            let t = transpile(&sub, &qpu, 1)
                .map_err(|e| format!("{label} trial {trial}: {e}"))?;
            if t.initial_layout != vec![0, 1, 2, 3, 4] {
                return Err(format!("{label} trial {trial}: non-identity initial layout"));
            }
            let u_logical = common::unitary_of(&logical);
            let u_routed = common::unitary_of(&t.circuit);
            // expected = permutation o logical: bit l moves to bit perm[l]
            let dim = 32usize;
            let perm_state = |x: usize| -> usize {
                let mut y = 0usize;
                for l in 0..5 {
                    if x & (1 << l) != 0 {
                        y |= 1 << t.final_permutation[l];
                    }
                }
                y
            };
            let mut expected = vec![vec![num_complex::Complex64::new(0.0, 0.0); dim]; dim];
            for col in 0..dim {
                for row in 0..dim {
                    expected[col][perm_state(row)] = u_logical[col][row];
                }
            }
            let dist = common::unitary_distance_up_to_phase(&u_routed, &expected);
            if dist > 1e-9 {
                return Err(format!(
                    "{label} trial {trial}: unitary mismatch {dist:.3e} (permutation {:?})",
                    t.final_permutation
                ));
            }
            worst = worst.max(dist);
        }
    }
    Ok(format!("2 basis families x 100 random circuits, worst entry error {worst:.2e}"))
}

fn crossed_placeholder_bundle() -> (GlobalLayout, IsolationBundle, ArchitectureSpec) {
    // Two sync points whose single-qubit placeholders appear in opposite
    // order on the two subcircuits. Each claims a two-sided case, so no
    // resolution order exists.
    let layout = GlobalLayout {
        qpus: vec![
            QpuLayout {
                qpu_id: "q0".into(),
                offset: 0,
                width: 1,
                data_locals: vec![(0, 0)],
                comm_locals: vec![],
            },
            QpuLayout {
                qpu_id: "q1".into(),
                offset: 1,
                width: 1,
                data_locals: vec![(1, 0)],
                comm_locals: vec![],
            },
        ],
        total_qubits: 2,
    };
    let mk_sub = |qpu: &str, first: &str, second: &str| {
        let mut c = Circuit::new(1, 0);
        for id in [first, second] {
            c.add(Instruction::barrier([0]).with_tag(id.to_string()));
            c.add(Instruction::gate(GateKind::VirtualGate, [0]).with_tag(id.to_string()));
        }
        SubCircuit { qpu_id: qpu.into(), circuit: c }
    };
    let mk_sync = |id: &str| SyncPoint {
        sync_id: id.into(),
        case: CutCase::EprPair,
        payload: vec![Instruction::h(0).with_tag(id.to_string())],
        sides: vec![
            VirtualGateRecord {
                sync_id: id.into(),
                case: CutCase::EprPair,
                side: Side::Left,
                qpu_id: "q0".into(),
                local_qubits: vec![0],
            },
            VirtualGateRecord {
                sync_id: id.into(),
                case: CutCase::EprPair,
                side: Side::Right,
                qpu_id: "q1".into(),
                local_qubits: vec![0],
            },
        ],
    };
    let bundle = IsolationBundle {
        subcircuits: vec![
            mk_sub("q0", "epr:a", "epr:b"),
            mk_sub("q1", "epr:b", "epr:a"),
        ],
        sync_points: vec![mk_sync("epr:a"), mk_sync("epr:b")],
        num_data_clbits: 0,
    };
    let spec = ArchitectureSpec {
        name: "crossed".into(),
        qpus: vec![all_to_all_qpu("q0", 1), all_to_all_qpu("q1", 1)],
        network: NetworkTopology {
            alpha: 0.05,
            edges: vec![NetworkEdge { a: "q0".into(), b: "q1".into(), length_km: 0.2 }],
        },
        partition: None,
    };
    (layout, bundle, spec)
}

/// The crossed-placeholder fixture is rejected as a deadlock, while every
/// benchmark x architecture cell assembles cleanly.
fn c10_deadlock_detection() -> CheckResult {
    let (layout, bundle, spec) = crossed_placeholder_bundle();
    let transpiled = transpile_bundle(&bundle, &spec, 0).map_err(|e| e.to_string())?;
    match assemble(&transpiled, &bundle, &layout) {
        Err(Error::Deadlock(ids)) if ids.len() == 2 => {}
        Err(other) => return Err(format!("expected a deadlock, got: {other}")),
        Ok(_) => return Err("crossed placeholders assembled without a deadlock".into()),
    }

    let mut cells = 0;
    for name in presets::NAMES {
        let spec = presets::get(name).unwrap();
        for b in bench::default_suite() {
            let arts = pipeline::build_artifacts(
                &bench::generate(&b).map_err(|e| e.to_string())?,
                &spec,
                &PipelineOptions::default(),
            )
            .map_err(|e| format!("{} on {name}: {e}", b.name.as_str()))?;
            if arts
                .assembled
                .circuit
                .instructions
                .iter()
                .any(|i| i.kind == GateKind::VirtualGate)
            {
                return Err(format!(
                    "{} on {name}: placeholder left in the assembled circuit",
                    b.name.as_str()
                ));
            }
            cells += 1;
        }
    }
    Ok(format!(
        "crossed fixture deadlocks as required; {cells} benchmark x architecture cells assemble cleanly"
    ))
}

#[test]
fn acceptance() {
    let checks: [(&str, fn() -> CheckResult); 10] = [
        ("criterion 01 noise-free distributed equivalence", c01_noise_free_equivalence),
        ("criterion 02 golden benchmark outcomes", c02_golden_outcomes),
        ("criterion 03 transmissivity reference values", c03_transmissivity),
        ("criterion 04 EPR-pair accounting", c04_epr_accounting),
        ("criterion 05 generator metrics", c05_generator_metrics),
        ("criterion 06 distributed beats monolithic", c06_distributed_beats_monolithic),
        ("criterion 07 link-distance monotonicity", c07_distance_monotonicity),
        ("criterion 08 trajectories vs density oracle", c08_trajectories_match_density_oracle),
        ("criterion 09 transpiler unitary equivalence", c09_transpiler_unitary_equivalence),
        ("criterion 10 deadlock detection", c10_deadlock_detection),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed: {failures:?}");
}
