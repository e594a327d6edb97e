//! Run a shipped benchmark on a distributed architecture and print the full
//! simulation report.
//!
//!     cargo run --release --example run_benchmark

use disqsim::arch::ArchitectureSpec;
use disqsim::bench::{BenchmarkName, BenchmarkSpec};
use disqsim::pipeline::{run_benchmark, PipelineOptions};

fn main() -> anyhow::Result<()> {
    let arch = ArchitectureSpec::load("arch-b")?;
    let bench = BenchmarkSpec::new(BenchmarkName::Ghz);
    let opts = PipelineOptions {
        shots: 2000,
        seed: 7,
        ..PipelineOptions::default()
    };

    let report = run_benchmark(&bench, &arch, &opts)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    eprintln!(
        "\n{} on {}: fidelity {:.4}, {} EPR pairs over {} communication qubits",
        bench.name.as_str(),
        arch.name,
        report.fidelity,
        report.metrics.epr_pairs_consumed,
        report.metrics.comm_qubits,
    );
    Ok(())
}
