//! Identifier splitting on delimiters, camel-case, acronym and digit
//! boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Digit runs stay attached to an all-uppercase token of at most this many
/// characters (IPV4, MD5). Heuristic for domain-term abbreviations.
pub const ACRONYM_DIGIT_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIdentifier {
    pub raw: String,
    pub words: Vec<String>,
}

impl SplitIdentifier {
    /// 1-based word positions.
    pub fn positions(&self) -> impl Iterator<Item = usize> {
        1..=self.words.len()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Upper,
    Lower,
    Digit,
}

fn class_of(c: char) -> Class {
    if c.is_numeric() {
        Class::Digit
    } else if c.is_uppercase() {
        Class::Upper
    } else {
        // Uncased letters behave like lowercase.
        Class::Lower
    }
}

pub fn split(raw: &str) -> Result<SplitIdentifier> {
    let mut words = Vec::new();
    for chunk in raw.split(|c: char| !c.is_alphanumeric()) {
        if !chunk.is_empty() {
            split_chunk(chunk, &mut words);
        }
    }
    if words.is_empty() {
        return Err(Error::Unsplittable(raw.to_string()));
    }
    Ok(SplitIdentifier {
        raw: raw.to_string(),
        words,
    })
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let classes: Vec<Class> = chars.iter().map(|&c| class_of(c)).collect();
    let mut tokens: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let (prev, cur) = (classes[i - 1], classes[i]);
        let boundary = match (prev, cur) {
            (Class::Digit, Class::Digit) => false,
            (Class::Digit, _) | (_, Class::Digit) => true,
            (Class::Lower, Class::Upper) => true,
            // XMLReader: the last capital of a run starts the next word.
            (Class::Upper, Class::Upper) => classes.get(i + 1) == Some(&Class::Lower),
            _ => false,
        };
        if boundary {
            tokens.push((start, i));
            start = i;
        }
    }
    tokens.push((start, chars.len()));

    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(tokens.len());
    for (s, e) in tokens {
        if classes[s] == Class::Digit {
            if let Some(last) = merged.last_mut() {
                let prev_len = last.1 - last.0;
                let all_upper = classes[last.0..last.1].iter().all(|&c| c == Class::Upper);
                if last.1 == s && all_upper && prev_len <= ACRONYM_DIGIT_LIMIT {
                    last.1 = e;
                    continue;
                }
            }
        }
        merged.push((s, e));
    }
    out.extend(merged.into_iter().map(|(s, e)| chars[s..e].iter().collect::<String>()));
}
