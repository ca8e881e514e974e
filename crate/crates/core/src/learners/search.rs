use serde::{Deserialize, Serialize};

use super::{Criterion, Hyperparameters, TaggerModel};
use crate::corpus::{assign_folds, IdentifierRecord};
use crate::error::{Error, Result};
use crate::features::FeatureSubset;
use crate::metrics::{identifier_accuracy, word_metrics, Metric, MetricSummary};
use crate::tagset::{DatasetConfiguration, Tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub train_identifiers: usize,
    pub test_identifiers: usize,
    pub test_words: usize,
    #[serde(flatten)]
    pub metrics: MetricSummary,
    pub identifier_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub k: usize,
    pub folds: Vec<FoldReport>,
    pub mean: MetricSummary,
    pub mean_identifier_accuracy: f64,
}

/// Trains on k-1 folds and scores the held-out fold, for every fold.
pub fn kfold_evaluate(
    records: &[IdentifierRecord],
    k: usize,
    hp: &Hyperparameters,
    config: &DatasetConfiguration,
    subset: &FeatureSubset,
    seed: u64,
) -> Result<CrossValidationReport> {
    for r in records {
        r.gold()?;
    }
    let folds = assign_folds(records, k, seed)?;
    let mut reports = Vec::with_capacity(k);
    for fold in 0..k {
        let (train, test) = folds.split(records, fold)?;
        let train: Vec<IdentifierRecord> = train.into_iter().cloned().collect();
        let model = TaggerModel::train(&train, hp, config, subset)?;
        let mut gold: Vec<Vec<Tag>> = Vec::with_capacity(test.len());
        let mut pred: Vec<Vec<Tag>> = Vec::with_capacity(test.len());
        for r in &test {
            gold.push(model.target_tags(r)?);
            pred.push(model.predict(r)?);
        }
        let flat_gold: Vec<Tag> = gold.iter().flatten().copied().collect();
        let flat_pred: Vec<Tag> = pred.iter().flatten().copied().collect();
        let m = word_metrics(&flat_gold, &flat_pred)?;
        reports.push(FoldReport {
            fold,
            train_identifiers: train.len(),
            test_identifiers: test.len(),
            test_words: flat_gold.len(),
            metrics: m.summary,
            identifier_accuracy: identifier_accuracy(&gold, &pred)?,
        });
    }
    let summaries: Vec<MetricSummary> = reports.iter().map(|r| r.metrics).collect();
    let mean_identifier_accuracy = reports.iter().map(|r| r.identifier_accuracy).sum::<f64>() / k as f64;
    Ok(CrossValidationReport {
        k,
        mean: MetricSummary::mean(&summaries),
        folds: reports,
        mean_identifier_accuracy,
    })
}

/// Candidate values; the search covers their Cartesian product in the order
/// criterion, max_depth, n_estimators, bootstrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub criteria: Vec<Criterion>,
    pub max_depths: Vec<usize>,
    pub n_estimators: Vec<usize>,
    pub bootstrap: Vec<bool>,
}

impl Grid {
    pub fn configurations(&self, base: &Hyperparameters) -> Result<Vec<Hyperparameters>> {
        if self.criteria.is_empty()
            || self.max_depths.is_empty()
            || self.n_estimators.is_empty()
            || self.bootstrap.is_empty()
        {
            return Err(Error::invalid("every grid axis needs at least one value"));
        }
        let mut out = Vec::new();
        for &criterion in &self.criteria {
            for &max_depth in &self.max_depths {
                for &n_estimators in &self.n_estimators {
                    for &bootstrap in &self.bootstrap {
                        let hp = Hyperparameters {
                            criterion,
                            max_depth,
                            n_estimators,
                            bootstrap,
                            ..*base
                        };
                        hp.validate()?;
                        out.push(hp);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub hyperparameters: Hyperparameters,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub metric: Metric,
    pub rows: Vec<GridRow>,
    pub best: usize,
}

impl GridSearchReport {
    pub fn best_hyperparameters(&self) -> &Hyperparameters {
        &self.rows[self.best].hyperparameters
    }
}

/// Highest mean wins; ties prefer smaller max_depth, then fewer
/// estimators, then earlier grid position.
pub(crate) fn pick_best(rows: &[GridRow]) -> usize {
    let mut best = 0;
    for (i, r) in rows.iter().enumerate().skip(1) {
        let b = &rows[best];
        let better = r.mean > b.mean
            || (r.mean == b.mean
                && (r.hyperparameters.max_depth, r.hyperparameters.n_estimators)
                    < (b.hyperparameters.max_depth, b.hyperparameters.n_estimators));
        if better {
            best = i;
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    grid: &Grid,
    base: &Hyperparameters,
    records: &[IdentifierRecord],
    k: usize,
    metric: &str,
    config: &DatasetConfiguration,
    subset: &FeatureSubset,
    seed: u64,
) -> Result<GridSearchReport> {
    let metric: Metric = metric.parse()?;
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    let configs = grid.configurations(base)?;
    let mut rows = Vec::with_capacity(configs.len());
    for (i, hp) in configs.into_iter().enumerate() {
        let cv = kfold_evaluate(records, k, &hp, config, subset, seed)?;
        let fold_scores: Vec<f64> = cv.folds.iter().map(|f| f.metrics.get(metric)).collect();
        log::info!(
            "grid {}: {:?} depth {} trees {} -> {metric} {:.4}",
            i + 1,
            hp.criterion,
            hp.max_depth,
            hp.n_estimators,
            cv.mean.get(metric)
        );
        rows.push(GridRow {
            hyperparameters: hp,
            fold_scores,
            mean: cv.mean.get(metric),
        });
    }
    let best = pick_best(&rows);
    Ok(GridSearchReport { metric, rows, best })
}
