//! Tokenizes raw text, parses the TSV corpus format and prints corpus
//! statistics plus the vocabulary and lexicons harvested from it.
//!
//!     cargo run -p slu-core --example corpus_tour

use slu_core::corpus::{
    build_vocabulary, corpus_stats, harvest_lexicons, parse_conll_file, tokenize, write_conll_file, DelexConfig,
};

const TSV: &str = "\
# intent: Fire
Crews\tO
battling\tO
a\tO
house\tB_incident
fire\tI_incident
at\tO
12\tB_address
Elm\tI_address
St\tI_address
on\tO
5/12\tB_date

# intent: Crime
Shots\tB_incident
fired\tI_incident
near\tO
Elm\tB_address
St\tI_address
.\tO
Two\tB_aux
men\tI_aux
fled\tI_aux
on\tI_aux
foot\tI_aux
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for t in tokenize("Shooting at 123 Main St., Queens on 5/12 (call 911).") {
        print!("{}:{} ", t.index, t.surface);
    }
    println!("\n");

    let corpus = parse_conll_file(TSV)?;
    for u in corpus.utterances() {
        let spans: Vec<String> = u
            .spans()
            .iter()
            .map(|s| format!("{}=\"{}\"", s.class, u.tokens()[s.start..s.end].join(" ")))
            .collect();
        println!("[{}] {}\n    {}", u.intent(), u.text(), spans.join("  "));
    }
    assert_eq!(parse_conll_file(&write_conll_file(&corpus))?, corpus);

    let delex = DelexConfig::default();
    let vocab = build_vocabulary(&corpus, 2);
    println!(
        "\n{}",
        corpus_stats(&corpus, Some(&vocab), &delex.descriptive_slot_classes())
    );
    let words: Vec<&str> = vocab.iter().map(|(w, _)| w).collect();
    println!("vocabulary (min_count 2): {}", words.join(" "));

    let lexicons = harvest_lexicons(&corpus, &delex)?;
    for name in lexicons.class_names() {
        let class = lexicons.class(name).expect("listed class");
        let entries: Vec<String> = class.entries().iter().map(|e| e.join(" ")).collect();
        let patterns: Vec<&str> = class.patterns().collect();
        println!(
            "  {name:<14} entries [{}] patterns [{}]",
            entries.join(", "),
            patterns.join(", ")
        );
    }

    // malformed input is rejected with a line number
    let bad = "# intent: Fire\nfire\tI_incident\n";
    println!("\n{}", parse_conll_file(bad).unwrap_err());
    Ok(())
}
