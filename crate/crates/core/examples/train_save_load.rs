//! Trains the reference tagger on an expanded corpus, saves model and
//! lexicons, reloads them and parses a new tweet.
//!
//!     cargo run --release -p slu-core --example train_save_load -- data/sample_train.tsv

use slu_core::corpus::read_corpus;
use slu_core::pipeline::{Pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/sample_train.tsv".into());
    let train = read_corpus(input.as_ref())?;
    let cfg = PipelineConfig::default();

    let pipeline = Pipeline::train(&train, &cfg)?;
    let report = pipeline.model().report();
    println!(
        "{} epochs, final loss {:.4}, token accuracy {:.3}",
        report.epoch_losses.len(),
        report.epoch_losses.last().copied().unwrap_or(f64::NAN),
        report.token_accuracy
    );

    let dir = tempfile::tempdir()?;
    let model_path = dir.path().join("model.slu");
    let lexicon_dir = dir.path().join("lexicons");
    pipeline.save(&model_path, &lexicon_dir)?;
    println!("model file: {} bytes", std::fs::metadata(&model_path)?.len());

    let reloaded = Pipeline::load(&model_path, &lexicon_dir, &cfg.delex, &cfg.inference)?;
    assert_eq!(reloaded.model(), pipeline.model());

    let text =
        "Structure fire reported at 4410 Larkspur Ave, Brookfield on 6/3 around 9:40 pm. Smoke seen from blocks away";
    let frame = reloaded.parse(text)?;
    assert_eq!(&frame, &pipeline.parse(text)?);
    println!("\n{text}\nintent: {} ({:.2})", frame.intent, frame.intent_confidence);
    for s in &frame.slots {
        println!(
            "  {:<8} {:<9} {}",
            s.class,
            format!("{:?}", s.source).to_lowercase(),
            s.text
        );
    }
    println!("{}", serde_json::to_string_pretty(&frame)?);
    Ok(())
}
