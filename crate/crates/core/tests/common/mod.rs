#![allow(dead_code)]

use idpos::corpus::IdentifierRecord;
use idpos::taggers::{fill_missing, ConstituentTags, Lexicon};
use idpos::tagset::{IdentifierContext, StanfordLabel, Tag};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use IdentifierContext::*;

const PATTERNS: [(IdentifierContext, &[&str]); 5] = [
    (Function, &["V N", "V P N", "PRE V N", "V NM N", "V P NM N", "V DT N"]),
    (Attribute, &["PRE NM N", "NM N", "N P N", "PRE N", "V NM N"]),
    (Declaration, &["NM N", "N P N", "PRE NM N", "V N", "NM NM N"]),
    (Parameter, &["NM N", "PRE N", "N P NM N", "V N", "NM NPL"]),
    (Class, &["NM N", "PRE NM N", "N P N", "NM NM N", "V NM"]),
];

fn vocabulary(tag: Tag) -> &'static [&'static str] {
    match tag {
        Tag::Noun => &["list", "file", "node", "buffer", "count", "index", "user", "token"],
        Tag::NounPlural => &["items", "nodes", "files", "tokens"],
        Tag::NounModifier => &["max", "current", "sorted", "total", "parent", "global"],
        Tag::Verb => &["get", "set", "add", "remove", "parse", "is", "load"],
        Tag::Preposition => &["to", "of", "from", "in", "by"],
        Tag::Preamble => &["m", "gl", "p", "s", "gimp"],
        Tag::Determiner => &["all", "the", "each"],
        _ => &["x"],
    }
}

/// Which constituent tagger gets a word wrong, and what it says instead.
fn corrupt(gold: Tag, tagger: usize, p: f64, rng: &mut ChaCha8Rng) -> Tag {
    let (targets, wrong): (&[Tag], &[Tag]) = match tagger {
        0 => (&[Tag::Verb], &[Tag::Noun, Tag::NounModifier]),
        1 => (&[Tag::NounModifier], &[Tag::Noun, Tag::Verb]),
        _ => (&[Tag::Preamble, Tag::Preposition], &[Tag::Noun, Tag::NounModifier]),
    };
    if targets.contains(&gold) && rng.random_bool(p) {
        *wrong.choose(rng).unwrap()
    } else {
        gold
    }
}

/// Annotated records whose three tagger columns are each wrong, with
/// probability `p` and independently, on one family of tags: swum on V,
/// posse on NM, stanford on PRE and P. Elsewhere they agree with gold.
pub fn synthetic_corpus(n: usize, p: f64, seed: u64) -> Vec<IdentifierRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| synthetic_record(i, None, p, &mut rng)).collect()
}

/// Like [`synthetic_corpus`] but stops at exactly `words` words.
pub fn synthetic_corpus_words(words: usize, p: f64, seed: u64) -> Vec<IdentifierRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut total = 0;
    while total < words {
        let left = words - total;
        let r = if left >= 5 {
            synthetic_record(out.len(), None, p, &mut rng)
        } else {
            synthetic_record(out.len(), Some("N"), p, &mut rng)
        };
        total += r.len();
        out.push(r);
    }
    out
}

fn synthetic_record(i: usize, pattern: Option<&str>, p: f64, rng: &mut ChaCha8Rng) -> IdentifierRecord {
    let (context, patterns) = PATTERNS[i % PATTERNS.len()];
    let pattern = pattern.unwrap_or_else(|| patterns.choose(rng).unwrap());
    let gold: Vec<Tag> = pattern.split(' ').map(|t| t.parse().unwrap()).collect();
    let words: Vec<String> = gold
        .iter()
        .map(|&t| vocabulary(t).choose(rng).unwrap().to_string())
        .collect();
    let constituent = gold
        .iter()
        .map(|&g| ConstituentTags {
            swum: Some(corrupt(g, 0, p, rng)),
            posse: Some(corrupt(g, 1, p, rng)),
            stanford: Some(StanfordLabel::Tag(corrupt(g, 2, p, rng))),
        })
        .collect();
    let type_hint = if context == Class {
        ""
    } else {
        ["int", "String", "List<Node>", "bool"][i % 4]
    };
    IdentifierRecord {
        id: format!("syn{i}"),
        system: format!("sys{}", i % 4),
        context,
        type_hint: type_hint.to_string(),
        raw_name: words.join("_"),
        words,
        constituent,
        gold: Some(gold),
    }
}

/// Gold-annotated records drawn from the same patterns, with tagger columns
/// produced by the built-in stand-in taggers.
pub fn stand_in_corpus(n: usize, seed: u64) -> Vec<IdentifierRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut r = synthetic_record(i, None, 0.0, &mut rng);
            r.constituent = vec![ConstituentTags::default(); r.len()];
            fill_missing(&mut r, Lexicon::embedded()).unwrap();
            r
        })
        .collect()
}
