//! Per-word categorical feature vectors and their integer encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{IdentifierRecord, MISSING};
use crate::error::{Error, Result};
use crate::taggers::Tagger;
use crate::tagset::Conjugation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Feature {
    Word,
    DataType,
    Swum,
    Posse,
    Stanford,
    Position,
    IdentifierSize,
    NormalizedPosition,
    Context,
}

impl Feature {
    pub const ALL: [Feature; 9] = [
        Feature::Word,
        Feature::DataType,
        Feature::Swum,
        Feature::Posse,
        Feature::Stanford,
        Feature::Position,
        Feature::IdentifierSize,
        Feature::NormalizedPosition,
        Feature::Context,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Word => "word",
            Feature::DataType => "data_type",
            Feature::Swum => "swum",
            Feature::Posse => "posse",
            Feature::Stanford => "stanford",
            Feature::Position => "position",
            Feature::IdentifierSize => "identifier_size",
            Feature::NormalizedPosition => "normalized_position",
            Feature::Context => "context",
        }
    }

    /// The constituent tagger column this feature reads, if any.
    pub fn tagger(self) -> Option<Tagger> {
        match self {
            Feature::Swum => Some(Tagger::Swum),
            Feature::Posse => Some(Tagger::Posse),
            Feature::Stanford => Some(Tagger::Stanford),
            _ => None,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = if key == "type_hint" {
            "data_type".to_string()
        } else {
            key
        };
        Feature::ALL
            .into_iter()
            .find(|f| f.as_str() == key)
            .ok_or_else(|| Error::UnknownFeature(s.to_string()))
    }
}

impl TryFrom<String> for Feature {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Feature> for String {
    fn from(f: Feature) -> String {
        f.as_str().to_string()
    }
}

/// A non-empty set of features, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Feature>", into = "Vec<Feature>")]
pub struct FeatureSubset(Vec<Feature>);

impl FeatureSubset {
    pub fn new(features: impl IntoIterator<Item = Feature>) -> Result<Self> {
        let mut v: Vec<Feature> = features.into_iter().collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            return Err(Error::invalid("feature subset must not be empty"));
        }
        Ok(FeatureSubset(v))
    }

    /// SWUM, POSSE, Stanford, normalized position and context.
    pub fn best() -> Self {
        FeatureSubset(vec![
            Feature::Swum,
            Feature::Posse,
            Feature::Stanford,
            Feature::NormalizedPosition,
            Feature::Context,
        ])
    }

    pub fn all() -> Self {
        FeatureSubset(Feature::ALL.to_vec())
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, f: Feature) -> bool {
        self.0.contains(&f)
    }

    pub fn index_of(&self, f: Feature) -> Option<usize> {
        self.0.iter().position(|&g| g == f)
    }

    /// Every non-empty subset, ordered by bitmask over this subset's
    /// features (bit i set selects the i-th feature).
    pub fn power_set(&self) -> Vec<FeatureSubset> {
        let n = self.0.len();
        (1u32..(1 << n))
            .map(|mask| FeatureSubset((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect()))
            .collect()
    }
}

impl TryFrom<Vec<Feature>> for FeatureSubset {
    type Error = Error;
    fn try_from(v: Vec<Feature>) -> Result<Self> {
        FeatureSubset::new(v)
    }
}

impl From<FeatureSubset> for Vec<Feature> {
    fn from(s: FeatureSubset) -> Vec<Feature> {
        s.0
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|x| x.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for FeatureSubset {
    type Err = Error;

    /// Parses a comma-separated list of feature names.
    fn from_str(s: &str) -> Result<Self> {
        let features = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Feature>>>()?;
        FeatureSubset::new(features)
    }
}

/// 1 for the first word, 3 for the last word of a multi-word identifier,
/// 2 otherwise.
pub fn normalized_position(index: usize, length: usize) -> Result<u8> {
    if index == 0 || index > length {
        return Err(Error::invalid(format!("word index {index} outside 1..={length}")));
    }
    Ok(if index == 1 {
        1
    } else if index == length {
        3
    } else {
        2
    })
}

/// Strips whitespace and pointer/reference sigils.
pub fn canonical_type(type_hint: &str) -> String {
    type_hint
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '*' && *c != '&')
        .collect()
}

/// Raw categorical values for one word, aligned with the subset's feature
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<String>);

pub fn vectorize(
    record: &IdentifierRecord,
    subset: &FeatureSubset,
    conjugation: Conjugation,
) -> Result<Vec<FeatureVector>> {
    for &f in subset.features() {
        if let Some(t) = f.tagger() {
            if !record.has_column(t) {
                return Err(Error::MissingColumn {
                    record: record.id.clone(),
                    feature: f.as_str().to_string(),
                });
            }
        }
    }
    let n = record.words.len();
    let missing = || MISSING.to_string();
    (0..n)
        .map(|i| {
            let c = &record.constituent[i];
            let values = subset
                .features()
                .iter()
                .map(|&f| {
                    Ok(match f {
                        Feature::Word => record.words[i].to_lowercase(),
                        Feature::DataType => canonical_type(&record.type_hint),
                        Feature::Swum => c.swum.map_or_else(missing, |t| t.to_string()),
                        Feature::Posse => c.posse.map_or_else(missing, |t| t.to_string()),
                        Feature::Stanford => c.stanford.map_or_else(missing, |t| t.under(conjugation).to_string()),
                        Feature::Position => (i + 1).to_string(),
                        Feature::IdentifierSize => n.to_string(),
                        Feature::NormalizedPosition => normalized_position(i + 1, n)?.to_string(),
                        Feature::Context => record.context.to_string(),
                    })
                })
                .collect::<Result<Vec<String>>>()?;
            Ok(FeatureVector(values))
        })
        .collect()
}

/// Code reserved for categories not seen during training.
pub const UNKNOWN: u32 = 0;

/// Per-feature dictionaries from category to code. Codes start at 1 in
/// lexical order of the category strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoding {
    pub features: FeatureSubset,
    pub dictionaries: Vec<Vec<String>>,
}

impl Encoding {
    pub fn fit<'a>(features: &FeatureSubset, vectors: impl IntoIterator<Item = &'a FeatureVector>) -> Result<Self> {
        let mut dictionaries: Vec<Vec<String>> = vec![Vec::new(); features.len()];
        for v in vectors {
            if v.0.len() != features.len() {
                return Err(Error::invalid("feature vector width does not match the subset"));
            }
            for (d, value) in dictionaries.iter_mut().zip(&v.0) {
                d.push(value.clone());
            }
        }
        for d in &mut dictionaries {
            d.sort();
            d.dedup();
        }
        Ok(Encoding {
            features: features.clone(),
            dictionaries,
        })
    }

    pub fn encode(&self, v: &FeatureVector) -> Vec<u32> {
        self.dictionaries
            .iter()
            .zip(&v.0)
            .map(|(d, value)| d.binary_search(value).map_or(UNKNOWN, |i| i as u32 + 1))
            .collect()
    }

    /// Number of codes for each feature, UNKNOWN included.
    pub fn cardinalities(&self) -> Vec<usize> {
        self.dictionaries.iter().map(|d| d.len() + 1).collect()
    }

    pub fn decode(&self, feature: usize, code: u32) -> Option<&str> {
        if code == UNKNOWN {
            return None;
        }
        self.dictionaries
            .get(feature)?
            .get(code as usize - 1)
            .map(String::as_str)
    }
}
