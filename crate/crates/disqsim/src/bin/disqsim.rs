//! Command-line front end. The heavy lifting lives in the library; this
//! binary only parses arguments, loads inputs, and prints JSON.

use clap::{Args, Parser, Subcommand};
use disqsim::arch::{presets, ArchitectureSpec, PartitionStrategy};
use disqsim::bench::{self, BenchmarkName, BenchmarkSpec};
use disqsim::circuit::{parse_json, parse_qasm, serialize_json, Circuit};
use disqsim::pipeline::{
    self, FidelityMetric, PipelineOptions, SimulationReport, StageDump, STAGE_NAMES,
};
use disqsim::{Error, Result};
use std::path::Path;

#[derive(Parser)]
#[command(name = "disqsim", version, about = "Distributed quantum circuit compiler and noisy simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Trajectory count for shot-mode simulation.
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Master RNG seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Report the exact noise-free output distribution instead of sampling.
    #[arg(long)]
    exact: bool,
    /// Scale factor on the entangled-link error probability.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// 0 = no peephole optimization, 1 = optimize to fixpoint.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    opt_level: u8,
    /// Fidelity metric: bhattacharyya | top-state-ratio.
    #[arg(long, default_value = "bhattacharyya")]
    fidelity_metric: String,
}

impl SimArgs {
    fn to_options(&self) -> Result<PipelineOptions> {
        let metric = match self.fidelity_metric.as_str() {
            "bhattacharyya" => FidelityMetric::Bhattacharyya,
            "top-state-ratio" => FidelityMetric::TopStateRatio,
            other => {
                return Err(Error::Schema(format!(
                    "unknown fidelity metric `{other}` (expected bhattacharyya or top-state-ratio)"
                )))
            }
        };
        Ok(PipelineOptions {
            shots: self.shots,
            seed: self.seed,
            exact: self.exact,
            kappa: self.kappa,
            opt_level: self.opt_level,
            fidelity_metric: metric,
            partition_strategy: PartitionStrategy::Balanced,
            ..PipelineOptions::default()
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit for an architecture and simulate it.
    Run {
        /// Circuit file (.qasm or .json), or a benchmark name with --bench.
        input: String,
        /// Treat INPUT as a shipped benchmark name instead of a file.
        #[arg(long)]
        bench: bool,
        /// Qubit count when INPUT is a benchmark name.
        #[arg(long)]
        qubits: Option<usize>,
        /// Architecture preset name (arch-a .. arch-e) or TOML file path.
        #[arg(long, default_value = "arch-a")]
        arch: String,
        /// Override every optical link length (km).
        #[arg(long)]
        distance: Option<f64>,
        /// Dump the named intermediate stage as JSON instead of simulating
        /// (dqc-logical, isolated, transpiled, assembled, trace, noisespec).
        #[arg(long)]
        stage: Option<String>,
        /// Resume from a stage dump produced by --stage; INPUT is the dump.
        #[arg(long)]
        from_stage: bool,
        /// Write output here instead of stdout.
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Sweep benchmarks × architectures × link distances.
    Matrix {
        /// Comma-separated benchmark names (default: full suite).
        #[arg(long)]
        benchmarks: Option<String>,
        /// Comma-separated architecture presets or files (default: all presets).
        #[arg(long)]
        archs: Option<String>,
        /// Comma-separated link distances in km.
        #[arg(long, default_value = "0.2")]
        distances: String,
        #[arg(long)]
        out: Option<String>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// List or generate the shipped benchmark circuits.
    Bench {
        #[command(subcommand)]
        action: BenchAction,
    },
    /// Check an architecture description and print its normalized form.
    ValidateArch {
        /// Preset name or TOML file path.
        arch: String,
    },
}

#[derive(Subcommand)]
enum BenchAction {
    /// List benchmark names with their default sizes and structural metrics.
    List,
    /// Emit a benchmark circuit as JSON.
    Gen {
        name: String,
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
}

fn read_circuit(path: &str) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    if Path::new(path).extension().is_some_and(|e| e == "qasm") {
        parse_qasm(&text)
    } else {
        parse_json(&text)
    }
}

fn bench_spec(name: &str, qubits: Option<usize>) -> Result<BenchmarkSpec> {
    let bn = BenchmarkName::from_str(name).ok_or_else(|| {
        Error::Schema(format!(
            "unknown benchmark `{name}` (expected one of {})",
            bench::default_suite()
                .iter()
                .map(|b| b.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;
    let mut spec = BenchmarkSpec::new(bn);
    if let Some(n) = qubits {
        spec.qubits = n;
    }
    Ok(spec)
}

fn emit(text: &str, out: &Option<String>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn report_json(report: &SimulationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

fn cmd_run(
    input: &str,
    is_bench: bool,
    qubits: Option<usize>,
    arch: &str,
    distance: Option<f64>,
    stage: Option<&str>,
    from_stage: bool,
    out: &Option<String>,
    sim: &SimArgs,
) -> Result<()> {
    let opts = sim.to_options()?;

    if from_stage {
        let dump: StageDump = serde_json::from_str(&std::fs::read_to_string(input)?)
            .map_err(|e| Error::Schema(format!("stage dump: {e}")))?;
        let report = pipeline::resume(&dump, &opts)?;
        return emit(&report_json(&report), out);
    }

    let mut spec = ArchitectureSpec::load(arch)?;
    if let Some(d) = distance {
        spec = spec.with_distance(d);
    }

    let (mono, bench_name) = if is_bench {
        let b = bench_spec(input, qubits)?;
        (bench::generate(&b)?, Some(b.name.as_str().to_string()))
    } else {
        (read_circuit(input)?, None)
    };

    if let Some(stage) = stage {
        let arts = pipeline::build_artifacts(&mono, &spec, &opts)?;
        let dump = pipeline::dump_stage(&arts, &spec, stage)?;
        let text = serde_json::to_string_pretty(&dump)
            .map_err(|e| Error::Internal(e.to_string()))?;
        return emit(&text, out);
    }

    let mut report = pipeline::run(&mono, &spec, &opts)?;
    report.benchmark = bench_name;
    emit(&report_json(&report), out)
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn cmd_matrix(
    benchmarks: &Option<String>,
    archs: &Option<String>,
    distances: &str,
    out: &Option<String>,
    sim: &SimArgs,
) -> Result<()> {
    let opts = sim.to_options()?;
    let benches: Vec<BenchmarkSpec> = match benchmarks {
        Some(list) => split_list(list)
            .into_iter()
            .map(|n| bench_spec(n, None))
            .collect::<Result<_>>()?,
        None => bench::default_suite(),
    };
    let arch_specs: Vec<ArchitectureSpec> = match archs {
        Some(list) => split_list(list)
            .into_iter()
            .map(ArchitectureSpec::load)
            .collect::<Result<_>>()?,
        None => presets::NAMES
            .iter()
            .map(|n| presets::get(n).expect("preset names are valid"))
            .collect(),
    };
    let dists: Vec<f64> = split_list(distances)
        .into_iter()
        .map(|d| {
            d.parse::<f64>()
                .map_err(|_| Error::Schema(format!("bad distance `{d}`")))
        })
        .collect::<Result<_>>()?;

    let rows = pipeline::run_matrix(&benches, &arch_specs, &dists, &opts);
    let text = serde_json::to_string_pretty(&rows).map_err(|e| Error::Internal(e.to_string()))?;
    emit(&text, out)
}

fn cmd_bench(action: &BenchAction) -> Result<()> {
    match action {
        BenchAction::List => {
            for b in bench::default_suite() {
                let c = bench::generate(&b)?;
                let m = disqsim::circuit::circuit_metrics(&c);
                println!(
                    "{:<12} qubits={:<3} two_qubit={:<3} depth={:<3} igd={:.3}",
                    b.name.as_str(),
                    m.qubits,
                    m.two_qubit_count,
                    m.depth,
                    m.igd
                );
            }
            Ok(())
        }
        BenchAction::Gen { name, qubits, out } => {
            let b = bench_spec(name, *qubits)?;
            let c = bench::generate(&b)?;
            emit(&serialize_json(&c), out)
        }
    }
}

fn cmd_validate_arch(arch: &str) -> Result<()> {
    let spec = ArchitectureSpec::load(arch)?;
    spec.validate()?;
    print!("{}", spec.to_toml());
    eprintln!("ok: {} QPUs, {} optical links", spec.qpus.len(), spec.network.edges.len());
    Ok(())
}

fn run_command(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { input, bench, qubits, arch, distance, stage, from_stage, out, sim } => {
            if let Some(s) = stage {
                if !STAGE_NAMES.contains(&s.as_str()) {
                    return Err(Error::Schema(format!(
                        "unknown stage `{s}` (expected one of {})",
                        STAGE_NAMES.join(", ")
                    )));
                }
            }
            cmd_run(input, *bench, *qubits, arch, *distance, stage.as_deref(), *from_stage, out, sim)
        }
        Command::Matrix { benchmarks, archs, distances, out, sim } => {
            cmd_matrix(benchmarks, archs, distances, out, sim)
        }
        Command::Bench { action } => cmd_bench(action),
        Command::ValidateArch { arch } => cmd_validate_arch(arch),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run_command(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
