//! Word- and identifier-level evaluation metrics and feature importance.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{assign_folds, IdentifierRecord};
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureSubset};
use crate::learners::{Hyperparameters, TaggerModel};
use crate::tagset::{DatasetConfiguration, IdentifierContext, Tag};

const N_TAGS: usize = Tag::ALL.len();

/// Counts indexed by (gold, predicted) in tag order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; N_TAGS]; N_TAGS],
        }
    }
}

impl ConfusionMatrix {
    pub fn from_pairs(gold: &[Tag], pred: &[Tag]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::invalid(format!(
                "gold has {} tags but prediction has {}",
                gold.len(),
                pred.len()
            )));
        }
        let mut m = ConfusionMatrix::default();
        for (&g, &p) in gold.iter().zip(pred) {
            m.add(g, p);
        }
        Ok(m)
    }

    pub fn add(&mut self, gold: Tag, pred: Tag) {
        self.counts[gold.index()][pred.index()] += 1;
    }

    pub fn get(&self, gold: Tag, pred: Tag) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, tag: Tag) -> u64 {
        self.counts[tag.index()].iter().sum()
    }

    pub fn predicted(&self, tag: Tag) -> u64 {
        self.counts.iter().map(|row| row[tag.index()]).sum()
    }

    pub fn correct(&self) -> u64 {
        (0..N_TAGS).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    BalancedAccuracy,
    WeightedF1,
    WeightedPrecision,
    WeightedRecall,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::BalancedAccuracy,
        Metric::WeightedF1,
        Metric::WeightedPrecision,
        Metric::WeightedRecall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::BalancedAccuracy => "balanced_accuracy",
            Metric::WeightedF1 => "weighted_f1",
            Metric::WeightedPrecision => "weighted_precision",
            Metric::WeightedRecall => "weighted_recall",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "f1" => "weighted_f1",
            "precision" => "weighted_precision",
            "recall" => "weighted_recall",
            k => k,
        };
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == key)
            .ok_or_else(|| Error::invalid(format!("unknown metric {s}")))
    }
}

/// The five headline scores.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub weighted_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
}

impl MetricSummary {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Accuracy => self.accuracy,
            Metric::BalancedAccuracy => self.balanced_accuracy,
            Metric::WeightedF1 => self.weighted_f1,
            Metric::WeightedPrecision => self.weighted_precision,
            Metric::WeightedRecall => self.weighted_recall,
        }
    }

    pub fn mean(items: &[MetricSummary]) -> MetricSummary {
        let n = items.len().max(1) as f64;
        let avg = |f: fn(&MetricSummary) -> f64| items.iter().map(f).sum::<f64>() / n;
        MetricSummary {
            accuracy: avg(|m| m.accuracy),
            balanced_accuracy: avg(|m| m.balanced_accuracy),
            weighted_f1: avg(|m| m.weighted_f1),
            weighted_precision: avg(|m| m.weighted_precision),
            weighted_recall: avg(|m| m.weighted_recall),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagMetrics {
    pub tag: Tag,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordMetrics {
    #[serde(flatten)]
    pub summary: MetricSummary,
    /// Tags that occur in gold or predictions, in tag order.
    pub per_tag: Vec<TagMetrics>,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl WordMetrics {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        let total = confusion.total();
        if total == 0 {
            return Err(Error::invalid("no words to score"));
        }
        let mut per_tag = Vec::new();
        let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
        let (mut recall_sum, mut supported) = (0.0, 0usize);
        for tag in Tag::ALL {
            let support = confusion.support(tag);
            let predicted = confusion.predicted(tag);
            if support == 0 && predicted == 0 {
                continue;
            }
            let hit = confusion.get(tag, tag);
            let precision = ratio(hit, predicted);
            let recall = ratio(hit, support);
            let f = f1(precision, recall);
            if support > 0 {
                let w = support as f64 / total as f64;
                wp += w * precision;
                wr += w * recall;
                wf += w * f;
                recall_sum += recall;
                supported += 1;
            }
            per_tag.push(TagMetrics {
                tag,
                precision,
                recall,
                f1: f,
                support,
                predicted,
            });
        }
        Ok(WordMetrics {
            summary: MetricSummary {
                accuracy: ratio(confusion.correct(), total),
                balanced_accuracy: recall_sum / supported as f64,
                weighted_f1: wf,
                weighted_precision: wp,
                weighted_recall: wr,
            },
            per_tag,
            confusion,
        })
    }

    pub fn tag(&self, tag: Tag) -> Option<&TagMetrics> {
        self.per_tag.iter().find(|t| t.tag == tag)
    }
}

pub fn word_metrics(gold: &[Tag], pred: &[Tag]) -> Result<WordMetrics> {
    if gold.is_empty() {
        return Err(Error::invalid("no words to score"));
    }
    WordMetrics::from_confusion(ConfusionMatrix::from_pairs(gold, pred)?)
}

fn check_lengths(gold: &[Vec<Tag>], pred: &[Vec<Tag>]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::invalid(format!(
            "{} gold identifiers but {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() || g.is_empty() {
            return Err(Error::invalid(format!("identifier {i} is not fully tagged")));
        }
    }
    Ok(())
}

/// Fraction of identifiers whose whole tag sequence is correct.
pub fn identifier_accuracy(gold: &[Vec<Tag>], pred: &[Vec<Tag>]) -> Result<f64> {
    check_lengths(gold, pred)?;
    if gold.is_empty() {
        return Err(Error::invalid("no identifiers to score"));
    }
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(correct as f64 / gold.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextAccuracy {
    /// `None` is the overall row.
    pub context: Option<IdentifierContext>,
    pub words: usize,
    pub word_accuracy: Option<f64>,
    pub identifiers: usize,
    pub identifier_accuracy: Option<f64>,
}

/// Contexts in the row order of the per-context tables.
pub const CONTEXT_ROW_ORDER: [IdentifierContext; 5] = [
    IdentifierContext::Attribute,
    IdentifierContext::Class,
    IdentifierContext::Declaration,
    IdentifierContext::Function,
    IdentifierContext::Parameter,
];

pub fn context_accuracies(
    contexts: &[IdentifierContext],
    gold: &[Vec<Tag>],
    pred: &[Vec<Tag>],
) -> Result<Vec<ContextAccuracy>> {
    check_lengths(gold, pred)?;
    if contexts.len() != gold.len() {
        return Err(Error::invalid("context list length differs from identifier count"));
    }
    let cell = |filter: &dyn Fn(IdentifierContext) -> bool, context| {
        let (mut words, mut word_hits, mut ids, mut id_hits) = (0usize, 0usize, 0usize, 0usize);
        for ((&c, g), p) in contexts.iter().zip(gold).zip(pred) {
            if !filter(c) {
                continue;
            }
            ids += 1;
            id_hits += usize::from(g == p);
            words += g.len();
            word_hits += g.iter().zip(p).filter(|(a, b)| a == b).count();
        }
        ContextAccuracy {
            context,
            words,
            word_accuracy: (words > 0).then(|| word_hits as f64 / words as f64),
            identifiers: ids,
            identifier_accuracy: (ids > 0).then(|| id_hits as f64 / ids as f64),
        }
    };
    let mut rows: Vec<ContextAccuracy> = CONTEXT_ROW_ORDER
        .iter()
        .map(|&ctx| cell(&|c| c == ctx, Some(ctx)))
        .collect();
    rows.push(cell(&|_| true, None));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub word: WordMetrics,
    pub identifier_accuracy: f64,
    pub per_context: Vec<ContextAccuracy>,
}

pub fn evaluate(contexts: &[IdentifierContext], gold: &[Vec<Tag>], pred: &[Vec<Tag>]) -> Result<EvaluationReport> {
    check_lengths(gold, pred)?;
    let flat_gold: Vec<Tag> = gold.iter().flatten().copied().collect();
    let flat_pred: Vec<Tag> = pred.iter().flatten().copied().collect();
    Ok(EvaluationReport {
        word: word_metrics(&flat_gold, &flat_pred)?,
        identifier_accuracy: identifier_accuracy(gold, pred)?,
        per_context: context_accuracies(contexts, gold, pred)?,
    })
}

/// Baseline score minus the mean score over `n_repeats` shuffles of one
/// feature column across all words of `records`.
pub fn permutation_importance(
    model: &TaggerModel,
    records: &[IdentifierRecord],
    feature: Feature,
    metric: Metric,
    n_repeats: usize,
    seed: u64,
) -> Result<f64> {
    let column = model
        .features
        .index_of(feature)
        .ok_or_else(|| Error::invalid(format!("model does not use feature {feature}")))?;
    if n_repeats == 0 {
        return Err(Error::invalid("n_repeats must be positive"));
    }
    let (rows, gold) = model.encode_records(records)?;
    let score = |rows: &[Vec<u32>]| -> Result<f64> {
        let pred = model.predict_rows(rows);
        Ok(word_metrics(&gold, &pred)?.summary.get(metric))
    };
    let baseline = score(&rows)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..n_repeats {
        let mut values: Vec<u32> = rows.iter().map(|r| r[column]).collect();
        values.shuffle(&mut rng);
        let shuffled: Vec<Vec<u32>> = rows
            .iter()
            .zip(values)
            .map(|(r, v)| {
                let mut r = r.clone();
                r[column] = v;
                r
            })
            .collect();
        total += baseline - score(&shuffled)?;
    }
    Ok(total / n_repeats as f64)
}

/// Metrics reported by the importance procedures.
pub const IMPORTANCE_METRICS: [Metric; 3] = [Metric::WeightedF1, Metric::Accuracy, Metric::BalancedAccuracy];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationRow {
    /// `None` is the average over folds.
    pub fold: Option<usize>,
    pub feature: Feature,
    pub metric: Metric,
    pub importance: f64,
}

/// Per-fold permutation importances: train on k-1 folds, permute on the
/// held-out fold, for every feature of `subset` and each importance metric;
/// averages follow the per-fold rows.
#[allow(clippy::too_many_arguments)]
pub fn permutation_table(
    records: &[IdentifierRecord],
    hp: &Hyperparameters,
    config: &DatasetConfiguration,
    subset: &FeatureSubset,
    k: usize,
    n_repeats: usize,
    seed: u64,
) -> Result<Vec<PermutationRow>> {
    let folds = assign_folds(records, k, seed)?;
    let mut rows = Vec::new();
    for fold in 0..k {
        let (train, test) = folds.split(records, fold)?;
        let train: Vec<IdentifierRecord> = train.into_iter().cloned().collect();
        let test: Vec<IdentifierRecord> = test.into_iter().cloned().collect();
        let model = TaggerModel::train(&train, hp, config, subset)?;
        for &feature in subset.features() {
            for metric in IMPORTANCE_METRICS {
                let importance = permutation_importance(&model, &test, feature, metric, n_repeats, seed)?;
                rows.push(PermutationRow {
                    fold: Some(fold),
                    feature,
                    metric,
                    importance,
                });
            }
        }
    }
    for &feature in subset.features() {
        for metric in IMPORTANCE_METRICS {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.fold.is_some() && r.feature == feature && r.metric == metric)
                .map(|r| r.importance)
                .collect();
            rows.push(PermutationRow {
                fold: None,
                feature,
                metric,
                importance: values.iter().sum::<f64>() / values.len() as f64,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropColumnRow {
    pub subset: FeatureSubset,
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropColumnReport {
    /// One row per non-empty subset, in bitmask order.
    pub rows: Vec<DropColumnRow>,
    pub best_weighted_f1: FeatureSubset,
    pub best_accuracy: FeatureSubset,
    pub best_balanced_accuracy: FeatureSubset,
}

/// Retrains and k-fold evaluates one model per non-empty subset of
/// `features`. The first subset in bitmask order wins ties.
pub fn drop_column_importance(
    records: &[IdentifierRecord],
    features: &FeatureSubset,
    hp: &Hyperparameters,
    config: &DatasetConfiguration,
    k: usize,
    seed: u64,
) -> Result<DropColumnReport> {
    let subsets = features.power_set();
    let total = subsets.len();
    let rows = subsets
        .into_par_iter()
        .enumerate()
        .map(|(i, subset)| {
            let cv = crate::learners::kfold_evaluate(records, k, hp, config, &subset, seed)?;
            log::info!("subset {}/{total} [{subset}]: accuracy {:.4}", i + 1, cv.mean.accuracy);
            Ok(DropColumnRow {
                subset,
                weighted_f1: cv.mean.weighted_f1,
                accuracy: cv.mean.accuracy,
                balanced_accuracy: cv.mean.balanced_accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = |f: fn(&DropColumnRow) -> f64| {
        let mut best = &rows[0];
        for r in &rows[1..] {
            if f(r) > f(best) {
                best = r;
            }
        }
        best.subset.clone()
    };
    Ok(DropColumnReport {
        best_weighted_f1: best(|r| r.weighted_f1),
        best_accuracy: best(|r| r.accuracy),
        best_balanced_accuracy: best(|r| r.balanced_accuracy),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Tag::*;

    #[test]
    fn hand_check() {
        let m = word_metrics(&[Noun, Noun, Noun, Verb], &[Noun, Noun, Verb, Verb]).unwrap();
        assert_eq!(m.summary.accuracy, 0.75);
        assert!((m.tag(Noun).unwrap().recall - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.tag(Verb).unwrap().recall, 1.0);
        assert!((m.summary.balanced_accuracy - (2.0 / 3.0 + 1.0) / 2.0).abs() < 1e-12);
        // precision N = 2/2, V = 1/2
        assert!((m.summary.weighted_precision - (0.75 * 1.0 + 0.25 * 0.5)).abs() < 1e-12);
    }

    #[test]
    fn identity_scores_one() {
        let g = [Verb, NounModifier, Noun, Preamble];
        let m = word_metrics(&g, &g).unwrap();
        for metric in Metric::ALL {
            assert_eq!(m.summary.get(metric), 1.0);
        }
    }

    #[test]
    fn errors() {
        assert!(word_metrics(&[Noun], &[Noun, Verb]).is_err());
        assert!(word_metrics(&[], &[]).is_err());
        assert!(identifier_accuracy(&[vec![Noun]], &[vec![]]).is_err());
        assert!("bogus".parse::<Metric>().is_err());
    }

    #[test]
    fn prediction_only_tags_lower_precision_only() {
        let m = word_metrics(&[Noun, Noun], &[Noun, Digit]).unwrap();
        assert_eq!(m.summary.balanced_accuracy, 0.5);
        let d = m.tag(Digit).unwrap();
        assert_eq!((d.support, d.predicted, d.f1), (0, 1, 0.0));
    }

    #[test]
    fn identifier_level() {
        let gold = vec![vec![Verb, Noun], vec![NounModifier, Noun]];
        let pred = vec![vec![Verb, Noun], vec![Noun, Noun]];
        assert_eq!(identifier_accuracy(&gold, &pred).unwrap(), 0.5);
        assert_eq!(identifier_accuracy(&gold, &gold).unwrap(), 1.0);
    }

    #[test]
    fn context_rows() {
        use IdentifierContext::*;
        let gold = vec![vec![Verb, Noun], vec![Noun]];
        let pred = vec![vec![Verb, Verb], vec![Noun]];
        let rows = context_accuracies(&[Function, Function], &gold, &pred).unwrap();
        assert_eq!(rows.len(), 6);
        let func = rows.iter().find(|r| r.context == Some(Function)).unwrap();
        let overall = rows.last().unwrap();
        assert_eq!(func.word_accuracy, overall.word_accuracy);
        assert_eq!(func.identifier_accuracy, Some(0.5));
        assert_eq!(rows[0].word_accuracy, None);
    }
}
