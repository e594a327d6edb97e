//! Fidelity as a function of optical link length: the entangled-link error
//! grows as kappa * (1 - exp(-alpha L)), so longer fibers mean noisier
//! remote gates.
//!
//!     cargo run --release --example link_distance_sweep

use disqsim::arch::ArchitectureSpec;
use disqsim::bench::{BenchmarkName, BenchmarkSpec};
use disqsim::noise::link_noise;
use disqsim::pipeline::{run_benchmark, PipelineOptions};

fn main() -> anyhow::Result<()> {
    let base = ArchitectureSpec::load("arch-b")?;
    let bench = BenchmarkSpec::new(BenchmarkName::Ghz);
    let opts = PipelineOptions { shots: 2000, seed: 7, ..PipelineOptions::default() };

    println!("{:>8} {:>10} {:>10} {:>10}", "L (km)", "eta", "p_epr", "fidelity");
    for distance in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
        let link = link_noise(base.network.alpha, distance, opts.kappa)?;
        let report = run_benchmark(&bench, &base.with_distance(distance), &opts)?;
        println!(
            "{distance:>8.1} {:>10.6} {:>10.6} {:>10.4}",
            link.eta, link.p_epr, report.fidelity
        );
    }
    Ok(())
}
