//! Expands a training corpus with delexicalized (q_ood) and `<unk>`
//! substituted (q_oov) variants and writes the result.
//!
//!     cargo run -p slu-core --example expand_training_set -- data/sample_train.tsv out/expanded.tsv

use std::path::PathBuf;

use slu_core::corpus::{read_corpus, write_corpus, Provenance};
use slu_core::expansion::expand_utterance;
use slu_core::pipeline::PipelineConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let input = PathBuf::from(args.next().unwrap_or_else(|| "data/sample_train.tsv".into()));
    let output = args.next().map(PathBuf::from);
    let cfg = PipelineConfig {
        seed: 7,
        ..PipelineConfig::default()
    };

    let train = read_corpus(&input)?;
    let first = &train.utterances()[0];
    let group = expand_utterance(first, &cfg.delex, cfg.seed, cfg.oov_copies);
    println!("original    {}", first.text());
    for v in group.ood_variants.iter().chain(&group.oov_variants) {
        println!("{:<11} {}", v.provenance().as_str(), v.text());
    }

    let expanded = cfg.expand(&train);
    let count = |p: Provenance| expanded.utterances().iter().filter(|u| u.provenance() == p).count();
    println!(
        "\n{} utterances -> {} ({} original, {} ood, {} oov)",
        train.len(),
        expanded.len(),
        count(Provenance::Original),
        count(Provenance::OodVariant),
        count(Provenance::OovVariant)
    );
    // same seed, same corpus
    assert_eq!(cfg.expand(&train), expanded);

    if let Some(path) = output {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        write_corpus(&path, &expanded)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
