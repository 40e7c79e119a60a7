//! A worked incident-tweet scenario for the multistep inference steps.
//!
//! Three short training tweets supply the vocabulary and the harvested
//! lexicons (`S. 84th st.`, `May 14`, `a suspect`); a [`TableTagger`] supplies
//! confidences chosen so that every rule of Replace, Expand and Merge fires
//! on the test tweet in [`RUNNING_EXAMPLE`].

use crate::corpus::{build_vocabulary, harvest_lexicons, Corpus, DelexConfig, SlotLabel, TaggedUtterance};
use crate::inference::InferenceConfig;
use crate::tagger::TableTagger;

pub const RUNNING_EXAMPLE: &str = "Looking for help identifying a suspect in a residential burglary. \
     This occurs in the block of S. 84th st., Hazardville on May 14. Please call (860)763-6400";

pub struct Scenario {
    pub text: &'static str,
    pub training: Corpus,
    pub config: InferenceConfig,
    pub tagger: TableTagger,
}

pub fn training_corpus() -> Corpus {
    let rows = [
        (
            "Looking for help identifying the car . Please call (860)763-6400",
            "O O O O O O O O O O",
            "Crime",
        ),
        (
            "This occurs in the shed of S. 84th st. , Ridgefield on May 14 .",
            "O O O O O O B_address I_address I_address O O O B_date I_date O",
            "Fire",
        ),
        (
            "Police saw a suspect in a residential yard .",
            "O O B_aux I_aux O O O O O",
            "Crime",
        ),
    ];
    rows.iter()
        .map(|(t, l, i)| TaggedUtterance::from_strs(t, l, i).expect("demo corpus is well formed"))
        .collect()
}

pub fn tagger() -> TableTagger {
    let labels: Vec<SlotLabel> = ["O", "B_address", "I_address", "B_aux", "I_aux", "B_date", "I_date"]
        .iter()
        .map(|l| l.parse().expect("valid label"))
        .collect();
    let o = SlotLabel::Outside;
    TableTagger::new(labels, &o, 0.99)
        .rule("<Address>", &SlotLabel::begin("address"), 0.97)
        .rule("<Date>", &SlotLabel::begin("date"), 0.97)
        .rule("<Auxiliary_msg>", &SlotLabel::begin("aux"), 0.93)
        .rule_before("<unk>", ".", &SlotLabel::inside("aux"), 0.80)
        .rule("<unk>", &SlotLabel::inside("address"), 0.80)
        .rule("help", &o, 0.95)
        .rule("identifying", &o, 0.55)
        .rule("in", &o, 0.60)
        .rule("a", &o, 0.50)
        .rule("residential", &o, 0.45)
        .rule("of", &o, 0.60)
        .rule(",", &o, 0.50)
        .rule("on", &o, 0.92)
        .intents(&[("Crime", 0.86), ("Fire", 0.14)])
}

/// The running example: vocabulary (`min_count` 1) and lexicons come from
/// [`training_corpus`], so `burglary`, `block` and `Hazardville` are unknown.
pub fn running_example() -> Scenario {
    let training = training_corpus();
    let delex = DelexConfig::default();
    let vocabulary = build_vocabulary(&training, 1);
    let lexicons = harvest_lexicons(&training, &delex).expect("default delex table is valid");
    let config = InferenceConfig::new(vocabulary, lexicons, delex).expect("default inference config is valid");
    Scenario {
        text: RUNNING_EXAMPLE,
        training,
        config,
        tagger: tagger(),
    }
}
