//! Trains the full pipeline and the ablated baseline on a synthetic incident
//! corpus and prints both evaluation reports.
//!
//!     cargo run --release -p slu-core --example ab_benchmark [seed]

use std::collections::BTreeSet;
use std::time::Instant;

use slu_core::corpus::{build_vocabulary, corpus_stats};
use slu_core::pipeline::Pipeline;
use slu_core::synth::{benchmark_config, generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(17);
    let started = Instant::now();
    let (train, test) = generate(&SynthConfig {
        seed,
        ..SynthConfig::default()
    });
    let cfg = benchmark_config(seed);
    let vocab = build_vocabulary(&train, cfg.delex.min_count);
    let ood: BTreeSet<String> = cfg.delex.descriptive_slot_classes();
    println!("test set\n{}\n", corpus_stats(&test, Some(&vocab), &ood));

    let full = Pipeline::train(&train, &cfg)?;
    let baseline = Pipeline::train_baseline(&train, &cfg)?;
    let full_report = full.evaluate(&test)?;
    let base_report = baseline.evaluate(&test)?;
    println!("baseline (no expansion, single pass)\n{base_report}");
    println!("full pipeline\n{full_report}");
    let gap = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => format!("{:+.2}", 100.0 * (a - b)),
        _ => "n/a".into(),
    };
    println!(
        "F1 gain: overall {}  ood {}  oov {}",
        gap(Some(full_report.slots.f1), Some(base_report.slots.f1)),
        gap(full_report.ood.slots.map(|s| s.f1), base_report.ood.slots.map(|s| s.f1)),
        gap(full_report.oov.slots.map(|s| s.f1), base_report.oov.slots.map(|s| s.f1)),
    );
    println!("elapsed {:.1?}", started.elapsed());
    Ok(())
}
