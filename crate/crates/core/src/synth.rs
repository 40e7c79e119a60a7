//! Synthetic incident tweets for benchmarking.
//!
//! Tweets follow a handful of layouts built from an incident mention, an
//! address, optional date and time, and free-form auxiliary descriptions.
//! The out-of-vocabulary profile mimics real tweets: in the train half the
//! rare words are mostly hashtags and handles, while slot values come from
//! small recurring pools; in the test half street names, cities and house
//! numbers are new and almost half of the descriptive content words are
//! unseen.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Provenance, SlotLabel, TaggedUtterance};
use crate::pipeline::PipelineConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub train: usize,
    pub test: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            train: 600,
            test: 250,
            seed: 17,
        }
    }
}

const INTENTS: [(&str, f64); 4] = [
    ("Fire", 0.297),
    ("Crime", 0.276),
    ("Traffic Accident", 0.284),
    ("Natural Disaster", 0.143),
];

fn incidents(intent: &str) -> &'static [&'static str] {
    match intent {
        "Fire" => &[
            "structure fire",
            "house fire",
            "brush fire",
            "apartment fire",
            "vehicle fire",
            "fire",
        ],
        "Crime" => &[
            "shooting",
            "armed robbery",
            "burglary",
            "stabbing",
            "assault",
            "robbery",
        ],
        "Traffic Accident" => &[
            "crash",
            "collision",
            "hit and run",
            "rollover crash",
            "multi vehicle crash",
        ],
        _ => &[
            "flooding",
            "earthquake",
            "tornado",
            "mudslide",
            "flash flood",
            "storm damage",
        ],
    }
}

/// How one posting account phrases its tweets. Accounts differ in
/// punctuation and connective words; part of the test half comes from
/// accounts never seen in training.
struct Account {
    sep: &'static str,
    at: &'static [&'static str],
    on: &'static str,
    time_at: &'static str,
    link: &'static str,
    openers: &'static [&'static str],
    closers: &'static [&'static str],
}

const TRAIN_ACCOUNTS: [Account; 2] = [
    Account {
        sep: ".",
        at: &["at", "near"],
        on: "on",
        time_at: "at",
        link: "following the",
        openers: &[
            "Officers are investigating a",
            "Crews responding to a",
            "Police responded to a",
            "Units are on scene of a",
        ],
        closers: &[
            "Please avoid the area .",
            "Expect delays .",
            "Call 911 with any information .",
            "",
        ],
    },
    Account {
        sep: "-",
        at: &["in the area of", "at"],
        on: "on",
        time_at: "around",
        link: "due to the",
        openers: &["ALERT :", "Dispatch :", "We are working a", "Reports of a"],
        closers: &["More info to follow .", "Stay safe .", ""],
    },
];

const NEW_ACCOUNTS: [Account; 2] = [
    Account {
        sep: "|",
        at: &["@", "by"],
        on: "",
        time_at: "approx",
        link: "post",
        openers: &["TRAFFIC ALERT", "INCIDENT", "Heads up"],
        closers: &["#staysafe", "more soon", ""],
    },
    Account {
        sep: "//",
        at: &["vicinity", "outside"],
        on: "dated",
        time_at: "@",
        link: "amid the",
        openers: &["Scanner :", "Just in", "Per dispatch"],
        closers: &["Developing .", "Follow for updates .", ""],
    },
];

const SUFFIXES: [&str; 6] = ["St", "Ave", "Blvd", "Rd", "Dr", "Way"];
const MONTHS: [&str; 12] = [
    "Jan", "Feb", "March", "April", "May", "June", "July", "Aug", "Sept", "Oct", "Nov", "Dec",
];

/// Pools split into a train half and a disjoint test half.
struct Pool {
    train: &'static [&'static str],
    test: &'static [&'static str],
}

impl Pool {
    fn pick(&self, rng: &mut ChaCha8Rng, test: bool) -> &'static str {
        let pool = if test { self.test } else { self.train };
        pool.choose(rng).expect("pools are non-empty")
    }
}

const STREETS: Pool = Pool {
    train: &[
        "Main",
        "Oak",
        "Pine",
        "Maple",
        "Cedar",
        "Elm",
        "Walnut",
        "Lake",
        "Hill",
        "Park",
        "Washington",
        "Lincoln",
        "Jefferson",
        "Madison",
        "Franklin",
        "Highland",
        "Sunset",
        "River",
        "Church",
        "Spring",
    ],
    test: &[
        "Birchwood",
        "Hazelton",
        "Quarry",
        "Wexford",
        "Larkspur",
        "Tillman",
        "Brennan",
        "Osgood",
        "Fairmount",
        "Kessler",
        "Dunmore",
        "Whitby",
        "Galloway",
        "Thornton",
        "Marlowe",
        "Ashby",
        "Colfax",
        "Pruitt",
    ],
};

const CITIES: Pool = Pool {
    train: &[
        "Springfield",
        "Riverside",
        "Fairview",
        "Georgetown",
        "Salem",
        "Clinton",
        "Madison",
        "Arlington",
        "Ashland",
        "Dover",
    ],
    test: &[
        "Hazardville",
        "Millbrook",
        "Stonegate",
        "Westerly",
        "Brookhaven",
        "Kingsport",
        "Oakdale",
        "Pinecrest",
        "Lakemont",
        "Ridgeway",
    ],
};

/// Recurring short descriptions; they appear verbatim in training, so the
/// descriptive lexicon can pick them up, and are extended with fresh clauses.
const STOCK: [&str; 20] = [
    "no injuries reported",
    "no one was hurt",
    "one person transported",
    "the suspect fled on foot",
    "two residents displaced",
    "crews knocked down the flames",
    "the road is closed",
    "investigation is ongoing",
    "the driver was arrested",
    "a suspect is in custody",
    "minor injuries reported",
    "the victim is in stable condition",
    "power lines are down",
    "several homes evacuated",
    "heavy smoke showing",
    "traffic is being diverted",
    "the basement is flooded",
    "residents should shelter in place",
    "a woman was injured",
    "multiple units on scene",
];

const CONNECTORS: [&str; 5] = ["after", "and", "while", "as", "when"];
const ADJECTIVES: [&str; 16] = [
    "red", "black", "white", "dark", "large", "small", "older", "young", "blue", "grey", "heavy", "second", "nearby",
    "parked", "damaged", "unknown",
];
const NOUNS: [&str; 20] = [
    "jacket", "sedan", "hoodie", "truck", "backpack", "van", "roof", "garage", "window", "porch", "man", "woman",
    "vehicle", "building", "tree", "fence", "officer", "resident", "dog", "car",
];
const VERBS: [&str; 14] = [
    "was seen",
    "fled",
    "struck",
    "entered",
    "left",
    "damaged",
    "hit",
    "blocked",
    "collapsed",
    "caught fire",
    "approached",
    "broke into",
    "crossed",
    "stopped",
];
const PREPS: [&str; 6] = ["near", "with", "in", "by", "behind", "toward"];
const SYLLABLES: [&str; 24] = [
    "ka", "lo", "ber", "tin", "mar", "sel", "dor", "vin", "pra", "gus", "el", "on", "ra", "ti", "quen", "ash", "wil",
    "mo", "ne", "stu", "bri", "cal", "fen", "hu",
];

/// A pronounceable nonce word; with 24 syllables and 2 to 3 of them, repeats
/// are rare, so these behave as hapaxes in training and as unknown words at
/// test time.
fn nonce(rng: &mut ChaCha8Rng) -> String {
    (0..rng.random_range(2..=3))
        .map(|_| *SYLLABLES.choose(rng).unwrap())
        .collect()
}

struct Style {
    test: bool,
}

impl Style {
    /// Share of open-class description words replaced by nonce words.
    fn rare(&self) -> f64 {
        if self.test {
            0.45
        } else {
            0.03
        }
    }

    fn open(&self, rng: &mut ChaCha8Rng, pool: &[&str]) -> Vec<String> {
        if rng.random_bool(self.rare()) {
            vec![nonce(rng)]
        } else {
            words(pool.choose(rng).unwrap())
        }
    }

    fn clause(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let mut out = vec![if rng.random_bool(0.5) { "a" } else { "the" }.to_string()];
        if rng.random_bool(0.6) {
            out.extend(self.open(rng, &ADJECTIVES));
        }
        out.extend(self.open(rng, &NOUNS));
        out.extend(self.open(rng, &VERBS));
        if rng.random_bool(0.7) {
            out.push(PREPS.choose(rng).unwrap().to_string());
            out.push("the".into());
            if rng.random_bool(0.4) {
                out.extend(self.open(rng, &ADJECTIVES));
            }
            out.extend(self.open(rng, &NOUNS));
        }
        out
    }

    fn description(&self, rng: &mut ChaCha8Rng) -> Vec<String> {
        let roll: f64 = rng.random();
        if roll < 0.2 {
            words(STOCK.choose(rng).unwrap())
        } else if roll < 0.5 {
            let mut out = self.clause(rng);
            out.push(CONNECTORS.choose(rng).unwrap().to_string());
            out.extend(self.clause(rng));
            out
        } else {
            self.clause(rng)
        }
    }

    fn hashtag(&self, rng: &mut ChaCha8Rng) -> String {
        let roll: f64 = rng.random();
        if roll < 0.35 {
            format!("#{}", nonce(rng))
        } else if roll < 0.6 {
            format!("@{}", nonce(rng))
        } else {
            ["#BREAKING", "#traffic", "#alert", "#update"]
                .choose(rng)
                .unwrap()
                .to_string()
        }
    }
}

#[derive(Default)]
struct Builder {
    tokens: Vec<String>,
    labels: Vec<SlotLabel>,
}

impl Builder {
    fn outside(&mut self, text: &str) {
        for t in text.split_whitespace() {
            self.tokens.push(t.to_string());
            self.labels.push(SlotLabel::Outside);
        }
    }

    fn slot(&mut self, class: &str, words: &[String]) {
        for (i, w) in words.iter().enumerate() {
            self.tokens.push(w.clone());
            self.labels.push(if i == 0 {
                SlotLabel::begin(class)
            } else {
                SlotLabel::inside(class)
            });
        }
    }

    fn finish(self, intent: &str) -> TaggedUtterance {
        TaggedUtterance::new(self.tokens, self.labels, intent, Provenance::Original)
            .expect("generator emits well-formed BIO")
    }
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn address(rng: &mut ChaCha8Rng, test: bool) -> Vec<String> {
    let street = |rng: &mut ChaCha8Rng| {
        vec![
            STREETS.pick(rng, test).to_string(),
            SUFFIXES.choose(rng).unwrap().to_string(),
        ]
    };
    let mut out = Vec::new();
    match rng.random_range(0..4) {
        0 => {
            out.push(house_number(rng, test, 100));
            out.extend(words("block of"));
            out.extend(street(rng));
        }
        1 => {
            out.extend(street(rng));
            out.push("and".into());
            out.extend(street(rng));
        }
        2 => {
            out.push(house_number(rng, test, 7));
            out.extend(street(rng));
        }
        _ => out.extend(street(rng)),
    }
    if rng.random_bool(0.5) {
        out.push(",".into());
        out.push(CITIES.pick(rng, test).to_string());
    }
    out
}

/// Train numbers repeat (multiples of `step` up to twenty of them); test
/// numbers are arbitrary, hence mostly unseen.
fn house_number(rng: &mut ChaCha8Rng, test: bool, step: u32) -> String {
    if test {
        (rng.random_range(1..100) * step + rng.random_range(0..step.min(10))).to_string()
    } else {
        (rng.random_range(1..=20) * step).to_string()
    }
}

fn date(rng: &mut ChaCha8Rng) -> Vec<String> {
    let month = rng.random_range(1..=12);
    let day = rng.random_range(1..=28);
    match rng.random_range(0..10) {
        0..=3 => vec![format!("{month}/{day}")],
        4..=7 => vec![MONTHS[month - 1].to_string(), day.to_string()],
        8 => vec!["today".into()],
        _ => vec!["yesterday".into()],
    }
}

fn time(rng: &mut ChaCha8Rng) -> Vec<String> {
    let hour = rng.random_range(1..=12);
    let ampm = if rng.random_bool(0.5) { "am" } else { "pm" };
    match rng.random_range(0..10) {
        0..=4 => vec![format!("{hour}:{:02}", rng.random_range(0..60)), ampm.to_string()],
        5..=7 => vec![hour.to_string(), ampm.to_string()],
        8 => words("this morning"),
        _ => words("last night"),
    }
}

fn tweet(rng: &mut ChaCha8Rng, test: bool) -> TaggedUtterance {
    // routine alerts: a familiar account, a known street, no description
    let routine = rng.random_bool(0.25);
    let test = test && !routine;
    let style = Style { test };
    let acct = if test && rng.random_bool(0.5) {
        NEW_ACCOUNTS.choose(rng).unwrap()
    } else {
        TRAIN_ACCOUNTS.choose(rng).unwrap()
    };
    let weights: Vec<f64> = INTENTS.iter().map(|(_, w)| *w).collect();
    let dist = rand::distr::weighted::WeightedIndex::new(&weights).expect("weights are positive");
    let intent = INTENTS[rng.sample(&dist)].0;
    let incident = words(incidents(intent).choose(rng).unwrap());
    let mut b = Builder::default();
    let at = |rng: &mut ChaCha8Rng| *acct.at.choose(rng).unwrap();
    match if routine { 0 } else { rng.random_range(0..10) } {
        0..=3 => {
            b.outside(acct.openers.choose(rng).unwrap());
            b.slot("incident", &incident);
            b.outside(at(rng));
            b.slot("address", &address(rng, test));
            if rng.random_bool(0.6) {
                b.outside(acct.on);
                b.slot("date", &date(rng));
            }
            if rng.random_bool(0.7) {
                b.outside(acct.time_at);
                b.slot("time", &time(rng));
            }
            b.outside(acct.sep);
            for _ in 0..if routine {
                0
            } else {
                1 + usize::from(rng.random_bool(0.3))
            } {
                b.slot("aux", &style.description(rng));
                b.outside(acct.sep);
            }
        }
        4..=5 => {
            b.slot("date", &date(rng));
            if rng.random_bool(0.7) {
                b.slot("time", &time(rng));
            }
            b.outside(":");
            b.slot("incident", &incident);
            b.outside("reported");
            b.outside(at(rng));
            b.slot("address", &address(rng, test));
            b.outside(acct.sep);
            b.slot("aux", &style.description(rng));
            b.outside(acct.sep);
        }
        6..=7 => {
            b.outside(&style.hashtag(rng));
            b.slot("address", &address(rng, test));
            b.outside(":");
            b.slot("incident", &incident);
            b.outside(acct.sep);
            b.slot("aux", &style.description(rng));
            if rng.random_bool(0.5) {
                b.outside(",");
                b.slot("aux", &style.description(rng));
            }
            b.outside(acct.sep);
            if rng.random_bool(0.5) {
                b.slot("time", &time(rng));
                b.outside(acct.sep);
            }
        }
        _ => {
            b.slot("aux", &style.description(rng));
            b.outside(acct.link);
            b.slot("incident", &incident);
            b.outside(at(rng));
            b.slot("address", &address(rng, test));
            if rng.random_bool(0.5) {
                b.slot("date", &date(rng));
            }
            b.outside(acct.sep);
        }
    }
    b.outside(acct.closers.choose(rng).unwrap());
    if !routine && rng.random_bool(0.3) {
        b.outside(&style.hashtag(rng));
    }
    b.finish(intent)
}

/// The pipeline settings the benchmark runs with: defaults, plus `<unk>`
/// substitution inside auxiliary descriptions, whose content words are the
/// most varied in these tweets.
pub fn benchmark_config(seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        seed,
        ..PipelineConfig::default()
    };
    cfg.delex.substitutable.push("aux".into());
    cfg
}

/// Generates `(train, test)`. Deterministic in `cfg.seed`.
pub fn generate(cfg: &SynthConfig) -> (Corpus, Corpus) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let train = (0..cfg.train).map(|_| tweet(&mut rng, false)).collect();
    let test = (0..cfg.test).map(|_| tweet(&mut rng, true)).collect();
    (train, test)
}
