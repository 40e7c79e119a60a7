//! Scores a trained pipeline on a gold test file: overall, per-class and the
//! OOD/OOV subsets, then lists the first few mistaken utterances.
//!
//!     cargo run --release -p slu-core --example evaluate -- data/sample_train.tsv data/sample_test.tsv

use slu_core::corpus::read_corpus;
use slu_core::pipeline::{Decoding, Pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let train = read_corpus(args.next().unwrap_or_else(|| "data/sample_train.tsv".into()).as_ref())?;
    let test = read_corpus(args.next().unwrap_or_else(|| "data/sample_test.tsv".into()).as_ref())?;
    let cfg = PipelineConfig::default();

    let pipeline = Pipeline::train(&train, &cfg)?;
    println!("{}", pipeline.evaluate(&test)?);

    // same model, single-pass decoding: isolates the inference steps
    let single = pipeline.clone().with_decoding(Decoding::SinglePass);
    println!("single-pass decoding, expanded model\n{}", single.evaluate(&test)?);

    let frames = pipeline.predict_corpus(&test)?;
    let wrong = test
        .utterances()
        .iter()
        .zip(&frames)
        .filter(|(u, f)| u.spans() != f.spans());
    for (u, f) in wrong.take(3) {
        println!("text: {}", u.text());
        println!(
            "  gold: {}",
            u.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
        );
        println!(
            "  pred: {}",
            f.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
        );
    }
    Ok(())
}
