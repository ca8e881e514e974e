//! The reduced part-of-speech alphabet, identifier categories, the Penn
//! Treebank mapping, and dataset configuration transforms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced part-of-speech tag. Declaration order is the fixed tie-break
/// order used everywhere a deterministic choice between tags is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Tag {
    Noun,
    Determiner,
    Conjunction,
    Preposition,
    NounPlural,
    NounModifier,
    Verb,
    VerbModifier,
    Pronoun,
    Digit,
    Preamble,
    Other,
}

impl Tag {
    pub const ALL: [Tag; 12] = [
        Tag::Noun,
        Tag::Determiner,
        Tag::Conjunction,
        Tag::Preposition,
        Tag::NounPlural,
        Tag::NounModifier,
        Tag::Verb,
        Tag::VerbModifier,
        Tag::Pronoun,
        Tag::Digit,
        Tag::Preamble,
        Tag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Noun => "N",
            Tag::Determiner => "DT",
            Tag::Conjunction => "CJ",
            Tag::Preposition => "P",
            Tag::NounPlural => "NPL",
            Tag::NounModifier => "NM",
            Tag::Verb => "V",
            Tag::VerbModifier => "VM",
            Tag::Pronoun => "PR",
            Tag::Digit => "D",
            Tag::Preamble => "PRE",
            Tag::Other => "OTHER",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

impl TryFrom<String> for Tag {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Tag> for String {
    fn from(t: Tag) -> String {
        t.as_str().to_string()
    }
}

/// Penn Treebank annotations that the mapping table covers.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PennTag {
    CC,
    CD,
    DT,
    FW,
    IN,
    JJ,
    JJR,
    JJS,
    LS,
    MD,
    NN,
    NNP,
    NNPS,
    NNS,
    PRP,
    PRPS,
    RB,
    RBR,
    RP,
    SYM,
    TO,
    VB,
    VBD,
    VBG,
    VBN,
    VBP,
    VBZ,
}

impl PennTag {
    pub const ALL: [PennTag; 27] = [
        PennTag::CC,
        PennTag::CD,
        PennTag::DT,
        PennTag::FW,
        PennTag::IN,
        PennTag::JJ,
        PennTag::JJR,
        PennTag::JJS,
        PennTag::LS,
        PennTag::MD,
        PennTag::NN,
        PennTag::NNP,
        PennTag::NNPS,
        PennTag::NNS,
        PennTag::PRP,
        PennTag::PRPS,
        PennTag::RB,
        PennTag::RBR,
        PennTag::RP,
        PennTag::SYM,
        PennTag::TO,
        PennTag::VB,
        PennTag::VBD,
        PennTag::VBG,
        PennTag::VBN,
        PennTag::VBP,
        PennTag::VBZ,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PennTag::CC => "CC",
            PennTag::CD => "CD",
            PennTag::DT => "DT",
            PennTag::FW => "FW",
            PennTag::IN => "IN",
            PennTag::JJ => "JJ",
            PennTag::JJR => "JJR",
            PennTag::JJS => "JJS",
            PennTag::LS => "LS",
            PennTag::MD => "MD",
            PennTag::NN => "NN",
            PennTag::NNP => "NNP",
            PennTag::NNPS => "NNPS",
            PennTag::NNS => "NNS",
            PennTag::PRP => "PRP",
            PennTag::PRPS => "PRP$",
            PennTag::RB => "RB",
            PennTag::RBR => "RBR",
            PennTag::RP => "RP",
            PennTag::SYM => "SYM",
            PennTag::TO => "TO",
            PennTag::VB => "VB",
            PennTag::VBD => "VBD",
            PennTag::VBG => "VBG",
            PennTag::VBN => "VBN",
            PennTag::VBP => "VBP",
            PennTag::VBZ => "VBZ",
        }
    }

    /// VBD, VBG and VBN read as either a verb or a noun modifier.
    pub fn is_verb_or_modifier(self) -> bool {
        matches!(self, PennTag::VBD | PennTag::VBG | PennTag::VBN)
    }

    fn reduced(self) -> Tag {
        match self {
            PennTag::CC => Tag::Conjunction,
            PennTag::CD => Tag::Digit,
            PennTag::DT => Tag::Determiner,
            PennTag::FW | PennTag::LS | PennTag::NN | PennTag::NNP | PennTag::SYM => Tag::Noun,
            PennTag::IN | PennTag::TO => Tag::Preposition,
            PennTag::JJ | PennTag::JJR | PennTag::JJS => Tag::NounModifier,
            PennTag::NNPS | PennTag::NNS => Tag::NounPlural,
            PennTag::PRP | PennTag::PRPS => Tag::Pronoun,
            PennTag::RB | PennTag::RBR | PennTag::RP => Tag::VerbModifier,
            PennTag::MD | PennTag::VB | PennTag::VBD | PennTag::VBG | PennTag::VBN | PennTag::VBP | PennTag::VBZ => {
                Tag::Verb
            }
        }
    }
}

impl fmt::Display for PennTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PennTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PennTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// Category of the site that declares an identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum IdentifierContext {
    Function,
    Class,
    Attribute,
    Parameter,
    Declaration,
}

impl IdentifierContext {
    pub const ALL: [IdentifierContext; 5] = [
        IdentifierContext::Function,
        IdentifierContext::Class,
        IdentifierContext::Attribute,
        IdentifierContext::Parameter,
        IdentifierContext::Declaration,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentifierContext::Function => "FUNCTION",
            IdentifierContext::Class => "CLASS",
            IdentifierContext::Attribute => "ATTRIBUTE",
            IdentifierContext::Parameter => "PARAMETER",
            IdentifierContext::Declaration => "DECLARATION",
        }
    }
}

impl fmt::Display for IdentifierContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentifierContext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        IdentifierContext::ALL
            .into_iter()
            .find(|c| c.as_str() == upper)
            .ok_or_else(|| Error::UnknownContext(s.to_string()))
    }
}

impl TryFrom<String> for IdentifierContext {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<IdentifierContext> for String {
    fn from(c: IdentifierContext) -> String {
        c.as_str().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conjugation {
    /// Stanford's VBD/VBG/VBN labels are kept as distinct feature values.
    Conjugated,
    /// Every verb conjugation collapses to V.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    Plain,
    Augmented,
}

pub const DEFAULT_AUGMENT_THRESHOLD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetConfiguration {
    pub variant: Variant,
    pub conjugation: Conjugation,
    pub augment_threshold: usize,
}

impl DatasetConfiguration {
    pub fn new(variant: Variant, conjugation: Conjugation) -> Self {
        DatasetConfiguration {
            variant,
            conjugation,
            augment_threshold: DEFAULT_AUGMENT_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: usize) -> Result<Self> {
        if threshold == 0 {
            return Err(Error::invalid("augmentation threshold must be positive"));
        }
        self.augment_threshold = threshold;
        Ok(self)
    }
}

impl Default for DatasetConfiguration {
    fn default() -> Self {
        DatasetConfiguration::new(Variant::Plain, Conjugation::Conjugated)
    }
}

/// A Stanford-style feature value: a reduced tag, or one of the raw
/// VBD/VBG/VBN labels retained under [`Conjugation::Conjugated`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StanfordLabel {
    Tag(Tag),
    Conjugation(PennTag),
}

impl StanfordLabel {
    /// Collapses raw conjugation labels to V under normalized mode.
    pub fn under(self, conjugation: Conjugation) -> StanfordLabel {
        match (self, conjugation) {
            (StanfordLabel::Conjugation(_), Conjugation::Normalized) => StanfordLabel::Tag(Tag::Verb),
            (label, _) => label,
        }
    }

    /// Resolves the label into the reduced alphabet the way gold labels are
    /// derived, so a constituent tagger can be scored on its own.
    pub fn resolve(self, context: IdentifierContext) -> Tag {
        match self {
            StanfordLabel::Tag(t) => t,
            StanfordLabel::Conjugation(p) => map_penn_to_gold(p, context),
        }
    }
}

impl fmt::Display for StanfordLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StanfordLabel::Tag(t) => t.fmt(f),
            StanfordLabel::Conjugation(p) => p.fmt(f),
        }
    }
}

impl FromStr for StanfordLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(t) = s.parse::<Tag>() {
            return Ok(StanfordLabel::Tag(t));
        }
        match s.parse::<PennTag>() {
            Ok(p) if p.is_verb_or_modifier() => Ok(StanfordLabel::Conjugation(p)),
            _ => Err(Error::UnknownTag(s.to_string())),
        }
    }
}

impl Serialize for StanfordLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StanfordLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<Tag> for StanfordLabel {
    fn from(t: Tag) -> Self {
        StanfordLabel::Tag(t)
    }
}

/// Maps a Penn Treebank annotation to the feature value fed to the learners.
pub fn map_penn_to_reduced(penn: PennTag, conjugation: Conjugation, _context: IdentifierContext) -> StanfordLabel {
    if penn.is_verb_or_modifier() && conjugation == Conjugation::Conjugated {
        StanfordLabel::Conjugation(penn)
    } else {
        StanfordLabel::Tag(penn.reduced())
    }
}

/// Maps a Penn Treebank annotation to a gold label: verb conjugations are
/// verbs in function names and noun modifiers everywhere else.
pub fn map_penn_to_gold(penn: PennTag, context: IdentifierContext) -> Tag {
    if penn.is_verb_or_modifier() {
        if context == IdentifierContext::Function {
            Tag::Verb
        } else {
            Tag::NounModifier
        }
    } else {
        penn.reduced()
    }
}

pub fn tag_counts<'a>(tags: impl IntoIterator<Item = &'a Tag>) -> BTreeMap<Tag, usize> {
    let mut counts = BTreeMap::new();
    for &t in tags {
        *counts.entry(t).or_insert(0) += 1;
    }
    counts
}

/// Rare-tag relabeling learned from a training split.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Augmentation {
    pub threshold: usize,
    pub rare: BTreeSet<Tag>,
}

impl Augmentation {
    pub fn fit<'a>(training_gold: impl IntoIterator<Item = &'a Tag>, threshold: usize) -> Result<Self> {
        if threshold == 0 {
            return Err(Error::invalid("augmentation threshold must be positive"));
        }
        let rare = tag_counts(training_gold)
            .into_iter()
            .filter(|&(t, n)| n < threshold && t != Tag::Other)
            .map(|(t, _)| t)
            .collect();
        Ok(Augmentation { threshold, rare })
    }

    pub fn relabel(&self, tag: Tag) -> Tag {
        if self.rare.contains(&tag) {
            Tag::Other
        } else {
            tag
        }
    }

    pub fn relabel_all(&self, tags: &mut [Tag]) {
        for t in tags {
            *t = self.relabel(*t);
        }
    }
}

type TagSequences = Vec<Vec<Tag>>;

/// Relabels every tag whose training frequency is below `threshold` as
/// OTHER, in both splits.
pub fn apply_augmentation(
    train: &[Vec<Tag>],
    test: &[Vec<Tag>],
    threshold: usize,
) -> Result<(TagSequences, TagSequences)> {
    let aug = Augmentation::fit(train.iter().flatten(), threshold)?;
    let relabel = |corpus: &[Vec<Tag>]| -> Vec<Vec<Tag>> {
        corpus
            .iter()
            .map(|seq| seq.iter().map(|&t| aug.relabel(t)).collect())
            .collect()
    };
    Ok((relabel(train), relabel(test)))
}
