use serde::{Deserialize, Serialize};

/// A token of raw input text with its 0-based position in the utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub index: usize,
}

/// Splits raw text into tokens.
///
/// Text is split on whitespace; leading and trailing punctuation is then
/// detached into single-character tokens. Interior punctuation is kept, so
/// `(860)763-6400` and `5/12` stay whole. A trailing period is kept on short
/// alphabetic abbreviations (`S.`, `st.`, `U.S.`), and a bracket whose partner
/// sits inside the word is not split off.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_surfaces(text)
        .into_iter()
        .enumerate()
        .map(|(index, surface)| Token { surface, index })
        .collect()
}

pub fn tokenize_surfaces(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        split_word(word, &mut out);
    }
    out
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || is_unicode_punct(c)
}

fn is_unicode_punct(c: char) -> bool {
    matches!(
        c,
        '\u{2018}'..='\u{201F}' | '\u{2026}' | '\u{00AB}' | '\u{00BB}' | '\u{2013}' | '\u{2014}'
    )
}

fn closer(open: char) -> Option<char> {
    match open {
        '(' => Some(')'),
        '[' => Some(']'),
        '{' => Some('}'),
        _ => None,
    }
}

fn opener(close: char) -> Option<char> {
    match close {
        ')' => Some('('),
        ']' => Some('['),
        '}' => Some('{'),
        _ => None,
    }
}

const ABBREVIATIONS: &[&str] = &[
    "st", "ave", "rd", "dr", "blvd", "ln", "ct", "hwy", "pl", "pkwy", "mt", "ft", "apt", "no", "jr", "sr", "vs", "etc",
];

/// `S.`, `U.S.`, `St.`, `st.`; not `pm.` or `the.` at the end of a sentence.
fn is_abbreviation(stem: &str) -> bool {
    if stem.is_empty() || !stem.chars().all(|c| c.is_alphabetic() || c == '.') {
        return false;
    }
    let letters = stem.chars().filter(|c| c.is_alphabetic()).count();
    let capitalized = stem.chars().next().is_some_and(char::is_uppercase);
    stem.contains('.')
        || letters == 1
        || (capitalized && letters <= 3)
        || ABBREVIATIONS.contains(&stem.to_lowercase().as_str())
}

fn split_word(word: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    if chars.iter().all(|&c| is_punct(c)) {
        out.push(word.to_string());
        return;
    }

    let mut start = 0;
    let mut end = chars.len();
    let mut leading = Vec::new();
    let mut trailing = Vec::new();
    // end of the word without trailing punctuation other than closing brackets
    let mut core_end = end;
    while core_end > 0 && is_punct(chars[core_end - 1]) && opener(chars[core_end - 1]).is_none() {
        core_end -= 1;
    }

    while start < end && is_punct(chars[start]) {
        let c = chars[start];
        // hashtags and handles stay whole
        if matches!(c, '#' | '@') && chars.get(start + 1).is_some_and(|n| n.is_alphanumeric()) {
            break;
        }
        if let Some(close) = closer(c) {
            // keep "(860)763-6400" intact: the partner is inside the word
            let partner = chars[start + 1..end].iter().position(|&x| x == close);
            if let Some(p) = partner {
                if start + 1 + p + 1 < core_end {
                    break;
                }
            }
        }
        leading.push(c);
        start += 1;
    }

    while end > start && is_punct(chars[end - 1]) {
        let c = chars[end - 1];
        if c == '.' {
            let stem: String = chars[start..end - 1].iter().collect();
            if is_abbreviation(&stem) {
                break;
            }
        }
        if let Some(open) = opener(c) {
            if chars[start..end - 1].contains(&open) {
                break;
            }
        }
        trailing.push(c);
        end -= 1;
    }

    out.extend(leading.into_iter().map(String::from));
    if start < end {
        out.push(chars[start..end].iter().collect());
    }
    out.extend(trailing.into_iter().rev().map(String::from));
}
