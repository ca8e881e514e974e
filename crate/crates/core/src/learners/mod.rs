//! Decision-tree and random-forest classifiers over encoded categorical
//! features, and the cross-validation and grid-search drivers.

mod model;
mod search;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use model::{TaggerModel, MODEL_FORMAT_VERSION};
pub use search::{grid_search, kfold_evaluate, CrossValidationReport, FoldReport, Grid, GridRow, GridSearchReport};
pub use tree::{impurity, train_forest, train_tree, Node, Tree, MIN_GAIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Algorithm {
    DecisionTree,
    RandomForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl std::str::FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            _ => Err(Error::invalid(format!("unknown criterion {s}"))),
        }
    }
}

/// Candidate features examined at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaxFeatures {
    /// ⌈√k⌉ features drawn per split.
    Sqrt,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub algorithm: Algorithm,
    pub criterion: Criterion,
    pub max_depth: usize,
    /// Forest only.
    pub n_estimators: usize,
    /// Forest only.
    pub bootstrap: bool,
    /// Forest only; a single decision tree always sees every feature.
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Hyperparameters {
    pub fn random_forest() -> Self {
        Hyperparameters {
            algorithm: Algorithm::RandomForest,
            criterion: Criterion::Gini,
            max_depth: 83,
            n_estimators: 250,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
            seed: 0,
        }
    }

    pub fn decision_tree() -> Self {
        Hyperparameters {
            algorithm: Algorithm::DecisionTree,
            criterion: Criterion::Entropy,
            max_depth: 9,
            n_estimators: 1,
            bootstrap: false,
            max_features: MaxFeatures::All,
            seed: 0,
        }
    }

    pub fn defaults_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::DecisionTree => Self::decision_tree(),
            Algorithm::RandomForest => Self::random_forest(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithm == Algorithm::RandomForest && self.n_estimators == 0 {
            return Err(Error::invalid("n_estimators must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let rf = Hyperparameters::random_forest();
        assert_eq!(
            (rf.max_depth, rf.n_estimators, rf.criterion, rf.bootstrap),
            (83, 250, Criterion::Gini, true)
        );
        let dt = Hyperparameters::decision_tree();
        assert_eq!((dt.criterion, dt.max_depth), (Criterion::Entropy, 9));
    }
}
