use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Algorithm, Criterion, Hyperparameters, MaxFeatures};
use crate::error::{Error, Result};

/// Splits must decrease impurity by more than this.
pub const MIN_GAIN: f64 = 1e-12;

pub fn impurity(counts: &[u64], criterion: Criterion) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::invalid("impurity of an empty node"));
    }
    let total = u32::try_from(total).map_err(|_| Error::invalid("class counts exceed u32"))?;
    let counts: Vec<u32> = counts.iter().map(|&c| c as u32).collect();
    Ok(node_impurity(&counts, total, criterion))
}

fn node_impurity(counts: &[u32], total: u32, criterion: Criterion) -> f64 {
    let n = total as f64;
    match criterion {
        Criterion::Gini => {
            let mut s = 0.0;
            for &c in counts {
                let p = c as f64 / n;
                s += p * p;
            }
            1.0 - s
        }
        Criterion::Entropy => {
            let mut h = 0.0;
            for &c in counts {
                if c > 0 {
                    let p = c as f64 / n;
                    h -= p * p.log2();
                }
            }
            h
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// Rows whose `feature` equals `value` go to `yes`.
    Branch {
        feature: usize,
        value: u32,
        gain: f64,
        yes: usize,
        no: usize,
    },
    Leaf {
        counts: Vec<u32>,
    },
}

/// Flattened tree; `nodes[0]` is the root, children follow in preorder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

fn argmax(counts: &[u32]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

impl Tree {
    pub fn leaf_counts(&self, row: &[u32]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Branch {
                    feature,
                    value,
                    yes,
                    no,
                    ..
                } => i = if row[*feature] == *value { *yes } else { *no },
                Node::Leaf { counts } => return counts,
            }
        }
    }

    /// Majority class at the leaf; ties go to the lowest class index.
    pub fn predict(&self, row: &[u32]) -> usize {
        argmax(self.leaf_counts(row))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Branch { yes, no, .. } => 1 + walk(nodes, *yes).max(walk(nodes, *no)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    /// (feature, value, impurity decrease) of the root split.
    pub fn root_split(&self) -> Option<(usize, u32, f64)> {
        match self.nodes.first()? {
            Node::Branch {
                feature, value, gain, ..
            } => Some((*feature, *value, *gain)),
            Node::Leaf { .. } => None,
        }
    }

    pub(crate) fn check(&self, n_features: usize, n_classes: usize) -> std::result::Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Branch { feature, yes, no, .. } => {
                    if *feature >= n_features {
                        return Err(format!("node {i} tests feature {feature} of {n_features}"));
                    }
                    if *yes <= i || *no <= i || *yes >= self.nodes.len() || *no >= self.nodes.len() {
                        return Err(format!("node {i} has invalid children"));
                    }
                }
                Node::Leaf { counts } => {
                    if counts.len() != n_classes || counts.iter().all(|&c| c == 0) {
                        return Err(format!("leaf {i} has an invalid distribution"));
                    }
                }
            }
        }
        Ok(())
    }
}

struct Builder<'a> {
    rows: &'a [Vec<u32>],
    labels: &'a [usize],
    n_classes: usize,
    n_features: usize,
    criterion: Criterion,
    max_depth: usize,
    subsample: Option<usize>,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    value: u32,
    gain: f64,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<u32> {
        let mut c = vec![0u32; self.n_classes];
        for &i in idx {
            c[self.labels[i]] += 1;
        }
        c
    }

    /// Best equality split over `features`, scanned in (feature, value)
    /// order; only a strictly larger gain replaces the incumbent.
    fn best_split(&self, idx: &[usize], parent: &[u32], features: &[usize]) -> Option<Split> {
        let n = idx.len() as u32;
        let parent_imp = node_impurity(parent, n, self.criterion);
        let mut best: Option<Split> = None;
        let mut pairs: Vec<(u32, usize)> = Vec::with_capacity(idx.len());
        let mut group = vec![0u32; self.n_classes];
        let mut rest = vec![0u32; self.n_classes];
        for &f in features {
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.rows[i][f], self.labels[i])));
            pairs.sort_unstable();
            let mut start = 0;
            while start < pairs.len() {
                let value = pairs[start].0;
                let mut end = start;
                group.iter_mut().for_each(|g| *g = 0);
                while end < pairs.len() && pairs[end].0 == value {
                    group[pairs[end].1] += 1;
                    end += 1;
                }
                let nl = (end - start) as u32;
                if nl < n {
                    for c in 0..self.n_classes {
                        rest[c] = parent[c] - group[c];
                    }
                    let nr = n - nl;
                    let gain = parent_imp
                        - (nl as f64 / n as f64) * node_impurity(&group, nl, self.criterion)
                        - (nr as f64 / n as f64) * node_impurity(&rest, nr, self.criterion);
                    if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                        best = Some(Split {
                            feature: f,
                            value,
                            gain,
                        });
                    }
                }
                start = end;
            }
        }
        best
    }

    fn choose(&mut self, idx: &[usize], parent: &[u32]) -> Option<Split> {
        match self.subsample {
            Some(m) if m < self.n_features => {
                let mut order: Vec<usize> = (0..self.n_features).collect();
                order.shuffle(self.rng);
                let mut first = order[..m].to_vec();
                first.sort_unstable();
                self.best_split(idx, parent, &first).or_else(|| {
                    // None of the drawn features separates the node; fall
                    // back to the rest.
                    let mut rest = order[m..].to_vec();
                    rest.sort_unstable();
                    self.best_split(idx, parent, &rest)
                })
            }
            _ => {
                let all: Vec<usize> = (0..self.n_features).collect();
                self.best_split(idx, parent, &all)
            }
        }
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let id = self.nodes.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.max_depth || pure {
            self.nodes.push(Node::Leaf { counts });
            return id;
        }
        let Some(split) = self.choose(&idx, &counts) else {
            self.nodes.push(Node::Leaf { counts });
            return id;
        };
        let (yes_idx, no_idx): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.rows[i][split.feature] == split.value);
        self.nodes.push(Node::Branch {
            feature: split.feature,
            value: split.value,
            gain: split.gain,
            yes: 0,
            no: 0,
        });
        let yes = self.build(yes_idx, depth + 1);
        let no = self.build(no_idx, depth + 1);
        if let Node::Branch { yes: y, no: n, .. } = &mut self.nodes[id] {
            *y = yes;
            *n = no;
        }
        id
    }
}

fn check_data(rows: &[Vec<u32>], labels: &[usize], n_classes: usize) -> Result<usize> {
    if rows.is_empty() {
        return Err(Error::invalid("cannot train on an empty dataset"));
    }
    if rows.len() != labels.len() {
        return Err(Error::invalid("feature rows and labels differ in length"));
    }
    let width = rows[0].len();
    if width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(Error::invalid("feature rows must share a non-zero width"));
    }
    if labels.iter().any(|&l| l >= n_classes) {
        return Err(Error::invalid("label outside the class range"));
    }
    Ok(width)
}

#[allow(clippy::too_many_arguments)]
fn grow(
    rows: &[Vec<u32>],
    labels: &[usize],
    n_classes: usize,
    idx: Vec<usize>,
    criterion: Criterion,
    max_depth: usize,
    subsample: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut b = Builder {
        rows,
        labels,
        n_classes,
        n_features: rows[0].len(),
        criterion,
        max_depth,
        subsample,
        rng,
        nodes: Vec::new(),
    };
    b.build(idx, 0);
    Tree { nodes: b.nodes }
}

/// CART with equality splits over every feature. Labels are class indices
/// below `n_classes`.
pub fn train_tree(
    rows: &[Vec<u32>],
    labels: &[usize],
    n_classes: usize,
    criterion: Criterion,
    max_depth: usize,
) -> Result<Tree> {
    check_data(rows, labels, n_classes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    Ok(grow(
        rows,
        labels,
        n_classes,
        (0..rows.len()).collect(),
        criterion,
        max_depth,
        None,
        &mut rng,
    ))
}

/// Trains the trees of `hp`: one full-data tree for a decision tree, or
/// `n_estimators` trees for a forest, tree `i` drawing from stream `i` of
/// the seed.
pub fn train_forest(rows: &[Vec<u32>], labels: &[usize], n_classes: usize, hp: &Hyperparameters) -> Result<Vec<Tree>> {
    let width = check_data(rows, labels, n_classes)?;
    hp.validate()?;
    if hp.algorithm == Algorithm::DecisionTree {
        return Ok(vec![train_tree(rows, labels, n_classes, hp.criterion, hp.max_depth)?]);
    }
    let n = rows.len();
    let subsample = match hp.max_features {
        MaxFeatures::Sqrt => Some((width as f64).sqrt().ceil() as usize),
        MaxFeatures::All => None,
    };
    let trees = (0..hp.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
            rng.set_stream(t as u64);
            let idx: Vec<usize> = if hp.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(
                rows,
                labels,
                n_classes,
                idx,
                hp.criterion,
                hp.max_depth,
                subsample,
                &mut rng,
            )
        })
        .collect();
    Ok(trees)
}

/// Majority vote over tree predictions; ties go to the lowest class index.
pub(crate) fn vote(trees: &[Tree], row: &[u32], n_classes: usize) -> usize {
    let mut votes = vec![0u32; n_classes];
    for t in trees {
        votes[t.predict(row)] += 1;
    }
    argmax(&votes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impurity_examples() {
        assert_eq!(impurity(&[10, 0], Criterion::Gini).unwrap(), 0.0);
        assert_eq!(impurity(&[5, 5], Criterion::Gini).unwrap(), 0.5);
        assert_eq!(impurity(&[5, 5], Criterion::Entropy).unwrap(), 1.0);
        assert!((impurity(&[3, 3, 3, 3], Criterion::Entropy).unwrap() - 2.0).abs() < 1e-12);
        assert!(impurity(&[0, 0], Criterion::Gini).is_err());
        for n in 1..20 {
            assert_eq!(impurity(&[n, 0, 0], Criterion::Entropy).unwrap(), 0.0);
        }
    }

    #[test]
    fn separable_data_gives_a_stump() {
        let rows: Vec<Vec<u32>> = (0..20).map(|i| vec![(i % 2) as u32 + 1, (i % 3) as u32 + 1]).collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let t = train_tree(&rows, &labels, 2, Criterion::Gini, 9).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(rows.iter().zip(&labels).all(|(r, &l)| t.predict(r) == l));
    }

    #[test]
    fn depth_zero_is_majority() {
        let rows: Vec<Vec<u32>> = (0..5).map(|i| vec![i]).collect();
        let labels = vec![1, 1, 0, 1, 0];
        let t = train_tree(&rows, &labels, 2, Criterion::Entropy, 0).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(rows.iter().all(|r| t.predict(r) == 1));
    }

    #[test]
    fn leaf_ties_go_to_lowest_class() {
        let t = Tree {
            nodes: vec![Node::Leaf { counts: vec![0, 2, 2] }],
        };
        assert_eq!(t.predict(&[0]), 1);
    }

    #[test]
    fn empty_data_errors() {
        assert!(train_tree(&[], &[], 2, Criterion::Gini, 3).is_err());
    }

    #[test]
    fn forest_is_deterministic() {
        let rows: Vec<Vec<u32>> = (0..200)
            .map(|i| vec![(i % 7) as u32, (i % 5) as u32, (i % 3) as u32])
            .collect();
        let labels: Vec<usize> = (0..200).map(|i| (i % 7 + i % 3) % 4).collect();
        let hp = Hyperparameters {
            n_estimators: 12,
            ..Hyperparameters::random_forest()
        };
        let a = train_forest(&rows, &labels, 4, &hp).unwrap();
        let b = train_forest(&rows, &labels, 4, &hp).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn training_accuracy_is_monotone_in_depth() {
        let rows: Vec<Vec<u32>> = (0..150u32).map(|i| vec![i % 4, (i / 4) % 3, (i * 7) % 5]).collect();
        let labels: Vec<usize> = (0..150).map(|i| (i * 13 % 11) % 3).collect();
        let mut last = 0;
        for depth in 0..8 {
            let t = train_tree(&rows, &labels, 3, Criterion::Gini, depth).unwrap();
            let hits = rows.iter().zip(&labels).filter(|(r, &l)| t.predict(r) == l).count();
            assert!(hits >= last, "depth {depth}");
            last = hits;
        }
    }
}
