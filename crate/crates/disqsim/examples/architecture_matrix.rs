//! Sweep benchmarks across the shipped architectures and print a fidelity
//! table. Mirrors the CLI's `matrix` subcommand.
//!
//!     cargo run --release --example architecture_matrix

use disqsim::arch::{presets, ArchitectureSpec};
use disqsim::bench::{BenchmarkName, BenchmarkSpec};
use disqsim::pipeline::{run_matrix, PipelineOptions};

fn main() -> anyhow::Result<()> {
    let benches: Vec<BenchmarkSpec> = [BenchmarkName::Ghz, BenchmarkName::Qaoa, BenchmarkName::Vqe]
        .into_iter()
        .map(BenchmarkSpec::new)
        .collect();
    let archs: Vec<ArchitectureSpec> = ["arch-a", "arch-b", "arch-d"]
        .iter()
        .map(|n| presets::get(n).unwrap())
        .collect();
    let opts = PipelineOptions { shots: 1000, seed: 7, ..PipelineOptions::default() };

    let rows = run_matrix(&benches, &archs, &[presets::DEFAULT_DISTANCE_KM], &opts);

    println!(
        "{:<10} {:<8} {:>8} {:>6} {:>6} {:>7}",
        "benchmark", "arch", "fidelity", "epr", "depth", "AN"
    );
    for row in rows {
        match row.fidelity {
            Some(f) => println!(
                "{:<10} {:<8} {:>8.4} {:>6} {:>6} {:>7.4}",
                row.benchmark,
                row.architecture,
                f,
                row.epr_pairs_consumed.unwrap_or(0),
                row.depth.unwrap_or(0),
                row.average_gate_noise.unwrap_or(0.0),
            ),
            None => println!(
                "{:<10} {:<8} failed: {}",
                row.benchmark,
                row.architecture,
                row.error.as_deref().unwrap_or("?")
            ),
        }
    }
    Ok(())
}
