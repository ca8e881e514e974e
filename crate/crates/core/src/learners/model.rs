use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{train_forest, vote, Tree};
use super::Hyperparameters;
use crate::corpus::IdentifierRecord;
use crate::error::{Error, Result};
use crate::features::{vectorize, Encoding, FeatureSubset, FeatureVector};
use crate::taggers::{fill_missing, Lexicon};
use crate::tagset::{Augmentation, DatasetConfiguration, Tag, Variant};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A trained ensemble tagger together with everything needed to encode new
/// identifiers exactly as at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerModel {
    pub format_version: u32,
    pub hyperparameters: Hyperparameters,
    pub dataset: DatasetConfiguration,
    pub features: FeatureSubset,
    pub encoding: Encoding,
    /// Class index to tag; tag order.
    pub classes: Vec<Tag>,
    /// Present for augmented datasets.
    pub augmentation: Option<Augmentation>,
    pub trees: Vec<Tree>,
}

impl TaggerModel {
    pub fn train(
        records: &[IdentifierRecord],
        hp: &Hyperparameters,
        dataset: &DatasetConfiguration,
        features: &FeatureSubset,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid("cannot train on an empty corpus"));
        }
        let mut gold: Vec<Tag> = Vec::new();
        for r in records {
            gold.extend_from_slice(r.gold()?);
        }
        let augmentation = match dataset.variant {
            Variant::Augmented => Some(Augmentation::fit(&gold, dataset.augment_threshold)?),
            Variant::Plain => None,
        };
        if let Some(a) = &augmentation {
            a.relabel_all(&mut gold);
        }
        let mut classes = gold.clone();
        classes.sort();
        classes.dedup();

        let vectors: Vec<FeatureVector> = records
            .iter()
            .map(|r| vectorize(r, features, dataset.conjugation))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let encoding = Encoding::fit(features, &vectors)?;
        let rows: Vec<Vec<u32>> = vectors.iter().map(|v| encoding.encode(v)).collect();
        let labels: Vec<usize> = gold
            .iter()
            .map(|t| classes.binary_search(t).expect("class present"))
            .collect();
        let trees = train_forest(&rows, &labels, classes.len(), hp)?;
        Ok(TaggerModel {
            format_version: MODEL_FORMAT_VERSION,
            hyperparameters: *hp,
            dataset: *dataset,
            features: features.clone(),
            encoding,
            classes,
            augmentation,
            trees,
        })
    }

    /// Fails unless `requested` is exactly the model's feature subset.
    pub fn ensure_features(&self, requested: &FeatureSubset) -> Result<()> {
        if requested != &self.features {
            return Err(Error::FeatureMismatch {
                expected: self.features.to_string(),
                found: requested.to_string(),
            });
        }
        Ok(())
    }

    /// Gold tags as the model sees them (rare tags relabeled for augmented
    /// models).
    pub fn target_tags(&self, record: &IdentifierRecord) -> Result<Vec<Tag>> {
        let mut gold = record.gold()?.to_vec();
        if let Some(a) = &self.augmentation {
            a.relabel_all(&mut gold);
        }
        Ok(gold)
    }

    pub fn encode_record(&self, record: &IdentifierRecord) -> Result<Vec<Vec<u32>>> {
        Ok(vectorize(record, &self.features, self.dataset.conjugation)?
            .iter()
            .map(|v| self.encoding.encode(v))
            .collect())
    }

    /// Encoded rows and target tags for every word of `records`.
    pub fn encode_records(&self, records: &[IdentifierRecord]) -> Result<(Vec<Vec<u32>>, Vec<Tag>)> {
        let mut rows = Vec::new();
        let mut gold = Vec::new();
        for r in records {
            rows.extend(self.encode_record(r)?);
            gold.extend(self.target_tags(r)?);
        }
        Ok((rows, gold))
    }

    pub fn predict_row(&self, row: &[u32]) -> Tag {
        self.classes[vote(&self.trees, row, self.classes.len())]
    }

    pub fn predict_rows(&self, rows: &[Vec<u32>]) -> Vec<Tag> {
        rows.par_iter().map(|r| self.predict_row(r)).collect()
    }

    /// Per-word tags. The record must carry every tagger column the model
    /// reads.
    pub fn predict(&self, record: &IdentifierRecord) -> Result<Vec<Tag>> {
        Ok(self
            .encode_record(record)?
            .iter()
            .map(|r| self.predict_row(r))
            .collect())
    }

    /// Per-word class distributions: vote shares for forests, leaf class
    /// frequencies for a single tree.
    pub fn predict_distribution(&self, record: &IdentifierRecord) -> Result<Vec<Vec<(Tag, f64)>>> {
        let rows = self.encode_record(record)?;
        Ok(rows
            .iter()
            .map(|row| {
                let mut mass = vec![0.0; self.classes.len()];
                if self.trees.len() == 1 {
                    let counts = self.trees[0].leaf_counts(row);
                    let total: u32 = counts.iter().sum();
                    for (m, &c) in mass.iter_mut().zip(counts) {
                        *m = c as f64 / total as f64;
                    }
                } else {
                    for t in &self.trees {
                        mass[t.predict(row)] += 1.0 / self.trees.len() as f64;
                    }
                }
                self.classes.iter().copied().zip(mass).collect()
            })
            .collect())
    }

    /// Like [`predict`](Self::predict), but runs the stand-in taggers for
    /// any missing column when a lexicon is given.
    pub fn tag(&self, record: &IdentifierRecord, stand_ins: Option<&Lexicon>) -> Result<Vec<Tag>> {
        match stand_ins {
            Some(lexicon) => {
                let mut r = record.clone();
                fill_missing(&mut r, lexicon)?;
                self.predict(&r)
            }
            None => self.predict(record),
        }
    }

    pub fn tag_all(&self, records: &[IdentifierRecord], stand_ins: Option<&Lexicon>) -> Result<Vec<Vec<Tag>>> {
        records.par_iter().map(|r| self.tag(r, stand_ins)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TaggerModel = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!(
                "format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.classes.is_empty() || self.classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Model("class list must be non-empty and in tag order".into()));
        }
        if self.encoding.features != self.features || self.encoding.dictionaries.len() != self.features.len() {
            return Err(Error::Model("encoding does not match the feature subset".into()));
        }
        if self.trees.is_empty() {
            return Err(Error::Model("no trees".into()));
        }
        for (i, t) in self.trees.iter().enumerate() {
            t.check(self.features.len(), self.classes.len())
                .map_err(|e| Error::Model(format!("tree {i}: {e}")))?;
        }
        Ok(())
    }
}
