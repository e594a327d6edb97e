//! How noise is attached to an assembled program: fiber transmissivity,
//! per-link EPR error, device channels per instruction kind, and the
//! resulting average assigned noise.
//!
//!     cargo run --release --example noise_model

use std::collections::BTreeMap;

use disqsim::arch::ArchitectureSpec;
use disqsim::bench;
use disqsim::noise::{build_noise_spec, link_noise, transmissivity, ErrorChannel};
use disqsim::pipeline::{build_artifacts, PipelineOptions};

fn main() -> anyhow::Result<()> {
    println!("fiber transmissivity eta = exp(-alpha L), alpha = 0.05 /km:");
    for length in [0.2, 1.0, 2.0, 10.0] {
        let eta = transmissivity(0.05, length)?;
        let link = link_noise(0.05, length, 1.0)?;
        println!("  L = {length:>5.1} km   eta = {eta:.6}   p_epr = {:.6}", link.p_epr);
    }

    // attach channels to a distributed GHZ program on arch-b
    let arch = ArchitectureSpec::load("arch-b")?;
    let mono = bench::ghz(8)?;
    let opts = PipelineOptions::default();
    let arts = build_artifacts(&mono, &arch, &opts)?;
    let noise = build_noise_spec(&arts.assembled, &arch, opts.kappa)?;

    let mut by_channel: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for channel in &noise.assignments {
        let label = match channel {
            ErrorChannel::None => "none".to_string(),
            ErrorChannel::Depolarizing1q { p } => format!("depolarizing-1q p={p}"),
            ErrorChannel::Depolarizing2q { p } => format!("depolarizing-2q p={p}"),
            ErrorChannel::ReadoutFlip { p } => format!("readout-flip p={p}"),
            ErrorChannel::ResetError { p } => format!("reset-error p={p}"),
            ErrorChannel::EprDepolarizing { p } => format!("epr-depolarizing p={p:.6}"),
        };
        let entry = by_channel.entry(label).or_insert((0, channel.probability()));
        entry.0 += 1;
    }

    println!("\nchannel assignments for GHZ-8 assembled on arch-b:");
    for (label, (count, _)) in &by_channel {
        println!("  {count:>4} x {label}");
    }
    println!(
        "\n{} instructions total, average assigned noise {:.6}",
        noise.assignments.len(),
        noise.average_gate_noise
    );
    Ok(())
}
