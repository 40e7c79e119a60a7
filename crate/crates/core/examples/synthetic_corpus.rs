//! Writes a synthetic incident-tweet corpus as train/test TSV files.
//!
//!     cargo run -p slu-core --example synthetic_corpus -- data 200 80 [seed]

use std::path::PathBuf;

use slu_core::corpus::{build_vocabulary, corpus_stats, write_corpus, DelexConfig};
use slu_core::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map(String::as_str).unwrap_or("data"));
    let defaults = SynthConfig::default();
    let cfg = SynthConfig {
        train: args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(defaults.train),
        test: args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(defaults.test),
        seed: args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(defaults.seed),
    };
    let (train, test) = generate(&cfg);
    std::fs::create_dir_all(&dir)?;
    write_corpus(&dir.join("sample_train.tsv"), &train)?;
    write_corpus(&dir.join("sample_test.tsv"), &test)?;

    let vocab = build_vocabulary(&train, 2);
    let ood = DelexConfig::default().descriptive_slot_classes();
    println!(
        "wrote {} train / {} test utterances to {}",
        train.len(),
        test.len(),
        dir.display()
    );
    println!(
        "\ntest split against the train vocabulary\n{}",
        corpus_stats(&test, Some(&vocab), &ood)
    );
    Ok(())
}
