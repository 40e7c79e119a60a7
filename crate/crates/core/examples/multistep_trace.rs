//! Runs Replace, Expand and Merge on the incident-tweet example and prints
//! the working sequence after each step plus the final frame.
//!
//!     cargo run -p slu-core --example multistep_trace

use slu_core::demo::running_example;
use slu_core::inference::parse_traced;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = running_example();
    let (frame, trace) = parse_traced(&scenario.tagger, &scenario.config, scenario.text)?;
    println!("{trace}\n");
    println!("intent: {} ({:.2})", frame.intent, frame.intent_confidence);
    for slot in &frame.slots {
        println!(
            "  {:<8} [{:>2}, {:>2})  {:<9} {}",
            slot.class,
            slot.start_token,
            slot.end_token,
            format!("{:?}", slot.source).to_lowercase(),
            slot.text
        );
    }
    let oov: Vec<&str> = frame.oov_tokens.iter().map(|&i| frame.tokens[i].as_str()).collect();
    println!("oov tokens: {}", oov.join(", "));
    Ok(())
}
