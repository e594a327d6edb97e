//! Look inside the compilation pipeline: placement layout, cut sync points,
//! the merged execution trace, and stage dumps that can resume a run.
//!
//!     cargo run --release --example stage_inspection

use disqsim::arch::ArchitectureSpec;
use disqsim::assembler::annotate_trace;
use disqsim::bench;
use disqsim::pipeline::{build_artifacts, dump_stage, resume, simulate, PipelineOptions, STAGE_NAMES};

fn main() -> anyhow::Result<()> {
    let arch = ArchitectureSpec::load("arch-b")?;
    let mono = bench::ghz(8)?;
    let opts = PipelineOptions { shots: 1000, ..PipelineOptions::default() };

    let arts = build_artifacts(&mono, &arch, &opts)?;

    println!("placement:");
    for l in &arts.constructed.layout.qpus {
        println!(
            "  {:8} offset {:2}  data {:?}  comm slots {:?}",
            l.qpu_id,
            l.offset,
            l.data_locals.iter().map(|&(m, _)| m).collect::<Vec<_>>(),
            l.comm_locals,
        );
    }
    println!(
        "\n{} remote CX, {} EPR pairs, {} entanglement swaps",
        arts.constructed.remote_cnot_count, arts.constructed.epr_pairs, arts.constructed.es_count
    );

    println!("\ncut sync points:");
    for sp in &arts.bundle.sync_points {
        let sides: Vec<&str> = sp.sides.iter().map(|s| s.qpu_id.as_str()).collect();
        println!("  {:14} {:?} across {:?}", sp.sync_id, sp.case, sides);
    }

    println!("\nfirst trace entries of the assembled program:");
    for entry in annotate_trace(&arts.assembled).iter().take(10) {
        println!(
            "  #{:<3} {:10} {:8} qubits {:?}",
            entry.index,
            entry.kind,
            entry.qpu,
            entry.qubits
        );
    }

    // every stage dump is self-contained: resuming reproduces the report
    let direct = simulate(&arts.assembled, &arts.noise, &arts.structure, &opts)?;
    for stage in STAGE_NAMES {
        let dump = dump_stage(&arts, &arch, stage)?;
        let round_trip: disqsim::pipeline::StageDump =
            serde_json::from_str(&serde_json::to_string(&dump)?)?;
        let resumed = resume(&round_trip, &opts)?;
        assert_eq!(resumed.distribution, direct.distribution);
        println!("resume from `{stage}` reproduces fidelity {:.4}", resumed.fidelity);
    }
    Ok(())
}
