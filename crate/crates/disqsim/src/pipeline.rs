//! End-to-end driver: partition → construct → isolate → transpile → assemble
//! → noise assignment → simulate, producing a serializable report.
//!
//! Each intermediate stage can be dumped to JSON and later resumed from; a
//! resumed run reproduces the identical final report because the simulation
//! path only looks at the assembled circuit, its noise assignment, and the
//! structural metrics frozen into the dump.

use crate::arch::{partition_with_strategy, ArchitectureSpec, PartitionStrategy};
use crate::assembler::{assemble, trace_jsonl, AssembledCircuit};
use crate::bench::{self, BenchmarkSpec};
use crate::circuit::{circuit_metrics, Circuit};
use crate::constructor::{construct, ConstructedCircuit};
use crate::error::{Error, Result};
use crate::isolator::{isolate, IsolationBundle};
use crate::noise::{build_noise_spec, NoiseSpec};
use crate::sim::{
    bhattacharyya_fidelity, counts_to_distribution, format_bitstring, run_exact_with_limit,
    run_shots_with_limit, sample_counts, top_outcome, Distribution, DEFAULT_QUBIT_LIMIT,
};
use crate::transpiler::{transpile_bundle, TranspiledSubcircuit};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMetric {
    /// `(sum_i sqrt(p_i q_i))^2` over the noisy and ideal distributions.
    Bhattacharyya,
    /// Noisy probability of the ideal most-likely state, divided by its
    /// ideal probability.
    TopStateRatio,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub shots: u64,
    pub seed: u64,
    /// Exact mode: report the noise-free output distribution directly.
    pub exact: bool,
    /// Scales the per-pair entangled-link error probability.
    pub kappa: f64,
    pub opt_level: u8,
    pub fidelity_metric: FidelityMetric,
    pub partition_strategy: PartitionStrategy,
    pub qubit_limit: usize,
}

impl Default for PipelineOptions {
    fn default() -> PipelineOptions {
        PipelineOptions {
            shots: 10_000,
            seed: 7,
            exact: false,
            kappa: 1.0,
            opt_level: 1,
            fidelity_metric: FidelityMetric::Bhattacharyya,
            partition_strategy: PartitionStrategy::Balanced,
            qubit_limit: DEFAULT_QUBIT_LIMIT,
        }
    }
}

/// Structural quantities fixed before simulation. `qubits` and `igd` describe
/// the source circuit; the rest describe the distributed realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureMetrics {
    pub qubits: usize,
    pub igd: f64,
    pub epr_pairs_consumed: usize,
    pub comm_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetrics {
    pub qubits: usize,
    pub depth: usize,
    pub two_qubit_count: usize,
    pub igd: f64,
    pub epr_pairs_consumed: usize,
    pub comm_qubits: usize,
    pub average_gate_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub architecture: Option<String>,
    pub mode: String,
    pub distribution: BTreeMap<String, f64>,
    pub top_state: String,
    pub top_prob: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub metrics: ReportMetrics,
    pub shots: u64,
    pub seed: u64,
}

pub struct PipelineArtifacts {
    pub constructed: ConstructedCircuit,
    pub bundle: IsolationBundle,
    pub transpiled: Vec<TranspiledSubcircuit>,
    pub assembled: AssembledCircuit,
    pub noise: NoiseSpec,
    pub structure: StructureMetrics,
}

fn comm_qubit_count(constructed: &ConstructedCircuit) -> usize {
    constructed.layout.qpus.iter().map(|l| l.comm_locals.len()).sum()
}

/// Run the compilation stages (everything up to, but not including, the
/// simulation) on a monolithic circuit.
pub fn build_artifacts(
    mono: &Circuit,
    spec: &ArchitectureSpec,
    opts: &PipelineOptions,
) -> Result<PipelineArtifacts> {
    mono.validate()?;
    spec.validate()?;
    // an explicit placement in the architecture wins over any strategy
    let partition = match &spec.partition {
        Some(pm) => pm.clone(),
        None => partition_with_strategy(mono, spec, opts.partition_strategy)?,
    };
    let constructed = construct(mono, spec, &partition)?;
    let bundle = isolate(&constructed)?;
    let transpiled = transpile_bundle(&bundle, spec, opts.opt_level)?;
    let assembled = assemble(&transpiled, &bundle, &constructed.layout)?;
    let noise = build_noise_spec(&assembled, spec, opts.kappa)?;
    let source = circuit_metrics(mono);
    let structure = StructureMetrics {
        qubits: source.qubits,
        igd: source.igd,
        epr_pairs_consumed: constructed.epr_pairs,
        comm_qubits: comm_qubit_count(&constructed),
    };
    Ok(PipelineArtifacts { constructed, bundle, transpiled, assembled, noise, structure })
}

fn distribution_to_map(dist: &Distribution, width: usize) -> BTreeMap<String, f64> {
    dist.iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(&k, &p)| (format_bitstring(k, width), p))
        .collect()
}

fn fidelity_of(metric: FidelityMetric, noisy: &Distribution, ideal: &Distribution) -> f64 {
    match metric {
        FidelityMetric::Bhattacharyya => bhattacharyya_fidelity(noisy, ideal),
        FidelityMetric::TopStateRatio => {
            let Some((top, p_ideal)) = top_outcome(ideal) else { return 1.0 };
            if p_ideal <= 0.0 {
                return 1.0;
            }
            (noisy.get(&top).copied().unwrap_or(0.0) / p_ideal).min(1.0)
        }
    }
}

/// Simulate an assembled circuit under a noise assignment and fill a report.
pub fn simulate(
    assembled: &AssembledCircuit,
    noise: &NoiseSpec,
    structure: &StructureMetrics,
    opts: &PipelineOptions,
) -> Result<SimulationReport> {
    let width = assembled.num_data_clbits;
    let ideal = run_exact_with_limit(&assembled.circuit, width, opts.qubit_limit)?;

    let (mode, dist, fidelity, shots) = if opts.exact {
        ("exact".to_string(), ideal.clone(), 1.0, 0)
    } else {
        let counts = if noise.is_noise_free() {
            // Noise-free trajectories sample the exact distribution; skip the
            // per-shot statevector walk.
            sample_counts(&ideal, opts.shots, opts.seed)
        } else {
            run_shots_with_limit(
                &assembled.circuit,
                noise,
                opts.shots,
                opts.seed,
                width,
                opts.qubit_limit,
            )?
        };
        let dist = counts_to_distribution(&counts);
        let f = fidelity_of(opts.fidelity_metric, &dist, &ideal);
        ("shots".to_string(), dist, f, opts.shots)
    };

    let (top, top_prob) = top_outcome(&dist).unwrap_or((0, 1.0));
    let exec = circuit_metrics(&assembled.circuit);
    Ok(SimulationReport {
        schema: 1,
        benchmark: None,
        architecture: None,
        mode,
        distribution: distribution_to_map(&dist, width),
        top_state: format_bitstring(top, width),
        top_prob,
        fidelity,
        infidelity: 1.0 - fidelity,
        metrics: ReportMetrics {
            qubits: structure.qubits,
            depth: exec.depth,
            two_qubit_count: exec.two_qubit_count,
            igd: structure.igd,
            epr_pairs_consumed: structure.epr_pairs_consumed,
            comm_qubits: structure.comm_qubits,
            average_gate_noise: noise.average_gate_noise,
        },
        shots,
        seed: opts.seed,
    })
}

/// Full pipeline on a monolithic circuit.
pub fn run(mono: &Circuit, spec: &ArchitectureSpec, opts: &PipelineOptions) -> Result<SimulationReport> {
    let arts = build_artifacts(mono, spec, opts)?;
    let mut report = simulate(&arts.assembled, &arts.noise, &arts.structure, opts)?;
    report.architecture = Some(spec.name.clone());
    Ok(report)
}

pub const STAGE_NAMES: [&str; 6] =
    ["dqc-logical", "isolated", "transpiled", "assembled", "trace", "noisespec"];

/// Self-contained dump of one pipeline stage plus everything needed to resume
/// from it. Later stages carry the earlier artifacts they depend on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageDump {
    pub schema: u32,
    pub stage: String,
    pub architecture: ArchitectureSpec,
    pub structure: StructureMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constructed: Option<ConstructedCircuit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isolated: Option<IsolationBundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transpiled: Option<Vec<TranspiledSubcircuit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assembled: Option<AssembledCircuit>,
    /// Rendered execution trace, one JSON object per line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
}

/// Extract the named stage from computed artifacts.
pub fn dump_stage(
    arts: &PipelineArtifacts,
    spec: &ArchitectureSpec,
    stage: &str,
) -> Result<StageDump> {
    let mut dump = StageDump {
        schema: 1,
        stage: stage.to_string(),
        architecture: spec.clone(),
        structure: arts.structure,
        constructed: None,
        isolated: None,
        transpiled: None,
        assembled: None,
        trace: None,
        noise: None,
    };
    // Each arm includes everything resume() needs for the stages that remain.
    match stage {
        "dqc-logical" => dump.constructed = Some(arts.constructed.clone()),
        "isolated" => {
            dump.constructed = Some(arts.constructed.clone());
            dump.isolated = Some(arts.bundle.clone());
        }
        "transpiled" => {
            dump.constructed = Some(arts.constructed.clone());
            dump.isolated = Some(arts.bundle.clone());
            dump.transpiled = Some(arts.transpiled.clone());
        }
        "assembled" => dump.assembled = Some(arts.assembled.clone()),
        "trace" => {
            dump.assembled = Some(arts.assembled.clone());
            dump.trace = Some(trace_jsonl(&arts.assembled));
        }
        "noisespec" => {
            dump.assembled = Some(arts.assembled.clone());
            dump.noise = Some(arts.noise.clone());
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown stage `{other}` (expected one of {})",
                STAGE_NAMES.join(", ")
            )))
        }
    }
    Ok(dump)
}

/// Resume the pipeline from a stage dump and produce the final report.
pub fn resume(dump: &StageDump, opts: &PipelineOptions) -> Result<SimulationReport> {
    let spec = &dump.architecture;
    spec.validate()?;
    let assembled = match &dump.assembled {
        Some(a) => a.clone(),
        None => {
            let constructed = dump.constructed.as_ref().ok_or_else(|| {
                Error::Schema(format!("stage dump `{}` carries no artifacts", dump.stage))
            })?;
            let bundle = match &dump.isolated {
                Some(b) => b.clone(),
                None => isolate(constructed)?,
            };
            let transpiled = match &dump.transpiled {
                Some(t) => t.clone(),
                None => transpile_bundle(&bundle, spec, opts.opt_level)?,
            };
            assemble(&transpiled, &bundle, &constructed.layout)?
        }
    };
    let noise = match &dump.noise {
        Some(n) => n.clone(),
        None => build_noise_spec(&assembled, spec, opts.kappa)?,
    };
    let mut report = simulate(&assembled, &noise, &dump.structure, opts)?;
    report.architecture = Some(spec.name.clone());
    Ok(report)
}

/// Generate a named benchmark and run it through the full pipeline.
pub fn run_benchmark(
    bench_spec: &BenchmarkSpec,
    spec: &ArchitectureSpec,
    opts: &PipelineOptions,
) -> Result<SimulationReport> {
    let mono = bench::generate(bench_spec)?;
    let mut report = run(&mono, spec, opts)?;
    report.benchmark = Some(bench_spec.name.as_str().to_string());
    Ok(report)
}

/// One benchmark × architecture × link-distance sweep cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRow {
    pub benchmark: String,
    pub architecture: String,
    pub distance_km: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average_gate_noise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epr_pairs_consumed: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_qubit_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comm_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sweep benchmarks × architectures × link distances. Each cell gets a seed
/// derived from the master seed and its enumeration index; cell failures are
/// recorded in the row instead of aborting the sweep.
pub fn run_matrix(
    benches: &[BenchmarkSpec],
    archs: &[ArchitectureSpec],
    distances_km: &[f64],
    opts: &PipelineOptions,
) -> Vec<MatrixRow> {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for b in benches {
        for a in archs {
            for &d in distances_km {
                let cell_opts = PipelineOptions { seed: opts.seed + index, ..*opts };
                index += 1;
                let arch = a.with_distance(d);
                let mut row = MatrixRow {
                    benchmark: b.name.as_str().to_string(),
                    architecture: a.name.clone(),
                    distance_km: d,
                    seed: cell_opts.seed,
                    fidelity: None,
                    infidelity: None,
                    average_gate_noise: None,
                    epr_pairs_consumed: None,
                    depth: None,
                    two_qubit_count: None,
                    comm_qubits: None,
                    top_state: None,
                    top_prob: None,
                    error: None,
                };
                match run_benchmark(b, &arch, &cell_opts) {
                    Ok(rep) => {
                        row.fidelity = Some(rep.fidelity);
                        row.infidelity = Some(rep.infidelity);
                        row.average_gate_noise = Some(rep.metrics.average_gate_noise);
                        row.epr_pairs_consumed = Some(rep.metrics.epr_pairs_consumed);
                        row.depth = Some(rep.metrics.depth);
                        row.two_qubit_count = Some(rep.metrics.two_qubit_count);
                        row.comm_qubits = Some(rep.metrics.comm_qubits);
                        row.top_state = Some(rep.top_state);
                        row.top_prob = Some(rep.top_prob);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::presets;
    use crate::bench::BenchmarkName;
    use crate::circuit::Instruction;

    fn opts_noise_free() -> PipelineOptions {
        PipelineOptions { kappa: 0.0, exact: true, ..PipelineOptions::default() }
    }

    #[test]
    fn ghz_on_distributed_arch_exact() {
        let spec = presets::get("arch-b").unwrap().with_zero_noise();
        let b = BenchmarkSpec::new(BenchmarkName::Ghz);
        let rep = run_benchmark(&b, &spec, &opts_noise_free()).unwrap();
        assert_eq!(rep.mode, "exact");
        assert_eq!(rep.metrics.qubits, 16);
        assert!(rep.metrics.epr_pairs_consumed > 0);
        let ones = "1".repeat(16);
        let zeros = "0".repeat(16);
        assert!((rep.distribution[&ones] - 0.5).abs() < 1e-9);
        assert!((rep.distribution[&zeros] - 0.5).abs() < 1e-9);
        assert!((rep.top_prob - 0.5).abs() < 1e-9);
        assert_eq!(rep.fidelity, 1.0);
    }

    #[test]
    fn noise_free_shot_mode_samples_exact_distribution() {
        let spec = presets::get("arch-b").unwrap().with_zero_noise();
        let b = BenchmarkSpec::new(BenchmarkName::Ghz);
        let opts = PipelineOptions { kappa: 0.0, shots: 4000, ..PipelineOptions::default() };
        let rep = run_benchmark(&b, &spec, &opts).unwrap();
        assert_eq!(rep.mode, "shots");
        assert_eq!(rep.shots, 4000);
        // only the two GHZ codewords can appear
        assert!(rep.distribution.len() <= 2);
        assert!(rep.top_prob > 0.4 && rep.top_prob < 0.6);
    }

    #[test]
    fn stage_dumps_resume_to_identical_report() {
        let spec = presets::get("arch-b").unwrap();
        let mono = crate::bench::ghz(4).unwrap();
        let opts = PipelineOptions { shots: 500, ..PipelineOptions::default() };
        let arts = build_artifacts(&mono, &spec, &opts).unwrap();
        let direct = simulate(&arts.assembled, &arts.noise, &arts.structure, &opts).unwrap();
        for stage in STAGE_NAMES {
            let dump = dump_stage(&arts, &spec, stage).unwrap();
            let json = serde_json::to_string(&dump).unwrap();
            let parsed: StageDump = serde_json::from_str(&json).unwrap();
            let resumed = resume(&parsed, &opts).unwrap();
            assert_eq!(resumed.distribution, direct.distribution, "stage {stage}");
            assert_eq!(resumed.fidelity, direct.fidelity, "stage {stage}");
            assert_eq!(resumed.metrics, direct.metrics, "stage {stage}");
        }
    }

    #[test]
    fn unknown_stage_rejected() {
        let spec = presets::get("arch-a").unwrap();
        let mono = crate::bench::ghz(2).unwrap();
        let arts = build_artifacts(&mono, &spec, &PipelineOptions::default()).unwrap();
        assert!(dump_stage(&arts, &spec, "bogus").is_err());
    }

    #[test]
    fn matrix_records_failures_without_aborting() {
        // GHZ-16 cannot fit a single 5-qubit device: the cell must carry an
        // error while the run on the large device succeeds.
        let big = presets::get("arch-a").unwrap();
        let mut small = presets::get("arch-b").unwrap();
        small.qpus.truncate(1);
        small.network.edges.clear();
        small.name = "tiny".into();
        let b = vec![BenchmarkSpec::new(BenchmarkName::Ghz)];
        let opts = PipelineOptions { shots: 200, ..PipelineOptions::default() };
        let rows = run_matrix(&b, &[big, small], &[0.2], &opts);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_none() && rows[0].fidelity.is_some());
        assert!(rows[1].error.is_some() && rows[1].fidelity.is_none());
        // per-cell seeds are distinct and derived from the master seed
        assert_eq!(rows[0].seed + 1, rows[1].seed);
    }

    #[test]
    fn top_state_ratio_metric() {
        let ideal: Distribution = [(0u64, 0.4), (3u64, 0.6)].into_iter().collect();
        let noisy: Distribution = [(3u64, 0.45), (1u64, 0.55)].into_iter().collect();
        let f = fidelity_of(FidelityMetric::TopStateRatio, &noisy, &ideal);
        assert!((f - 0.75).abs() < 1e-12);
    }

    #[test]
    fn explicit_partition_overrides_strategy() {
        let mut spec = presets::get("arch-b").unwrap().with_zero_noise();
        // pin both qubits of a Bell pair onto two specific devices
        spec.partition = Some(crate::arch::PartitionMap {
            qubits: vec![0, 1],
            mapping: vec!["vigo-1".into(), "vigo-3".into()],
        });
        let mono = crate::bench::ghz(2).unwrap();
        let arts = build_artifacts(&mono, &spec, &opts_noise_free()).unwrap();
        assert_eq!(arts.constructed.partition.mapping, vec!["vigo-1", "vigo-3"]);
        assert_eq!(arts.structure.epr_pairs_consumed, 1);
    }

    #[test]
    fn single_qpu_arch_runs_without_links() {
        let spec = presets::get("arch-a").unwrap().with_zero_noise();
        let mut mono = Circuit::new(2, 2);
        mono.add(Instruction::h(0));
        mono.add(Instruction::cx(0, 1));
        mono.add(Instruction::measure(0, 0));
        mono.add(Instruction::measure(1, 1));
        let rep = run(&mono, &spec, &opts_noise_free()).unwrap();
        assert_eq!(rep.metrics.epr_pairs_consumed, 0);
        assert!((rep.distribution["00"] - 0.5).abs() < 1e-9);
        assert!((rep.distribution["11"] - 0.5).abs() < 1e-9);
    }
}
