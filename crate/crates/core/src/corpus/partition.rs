use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IdentifierRecord;
use crate::error::{Error, Result};
use crate::tagset::IdentifierContext;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: BTreeMap<String, usize>,
}

impl FoldAssignment {
    /// Splits `records` into (training, held-out) for one fold, preserving
    /// input order.
    pub fn split<'a>(
        &self,
        records: &'a [IdentifierRecord],
        fold: usize,
    ) -> Result<(Vec<&'a IdentifierRecord>, Vec<&'a IdentifierRecord>)> {
        if fold >= self.k {
            return Err(Error::invalid(format!("fold {fold} out of range for k={}", self.k)));
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for r in records {
            match self.fold_of.get(&r.id) {
                Some(&f) if f == fold => test.push(r),
                Some(_) => train.push(r),
                None => return Err(Error::invalid(format!("record {} has no fold", r.id))),
            }
        }
        Ok((train, test))
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.fold_of.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_unique(records: &[IdentifierRecord]) -> Result<()> {
    let mut seen = HashSet::with_capacity(records.len());
    for r in records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::invalid(format!("duplicate identifier id {}", r.id)));
        }
    }
    Ok(())
}

/// Record indices grouped by context (fixed context order), each group
/// shuffled by `rng`.
fn shuffled_strata(records: &[IdentifierRecord], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    IdentifierContext::ALL
        .iter()
        .map(|&ctx| {
            let mut group: Vec<usize> = (0..records.len()).filter(|&i| records[i].context == ctx).collect();
            group.shuffle(rng);
            group
        })
        .collect()
}

/// Stratified k-fold assignment. Identifiers are dealt round-robin with a
/// counter that carries across contexts, so both per-context and overall
/// fold sizes differ by at most one.
pub fn assign_folds(records: &[IdentifierRecord], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if k > records.len() {
        return Err(Error::invalid(format!(
            "k={k} exceeds the {} identifiers available",
            records.len()
        )));
    }
    check_unique(records)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = BTreeMap::new();
    let mut next = 0;
    for group in shuffled_strata(records, &mut rng) {
        for i in group {
            fold_of.insert(records[i].id.clone(), next % k);
            next += 1;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Stratified, identifier-atomic train/test split. Both halves keep input
/// order.
pub fn train_test_split(
    records: &[IdentifierRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<IdentifierRecord>, Vec<IdentifierRecord>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    check_unique(records)?;
    let n = records.len();
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::invalid(format!(
            "fraction {train_fraction} of {n} identifiers leaves an empty split"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strata = shuffled_strata(records, &mut rng);

    // Largest-remainder allocation of the training quota across contexts.
    let quotas: Vec<f64> = strata.iter().map(|g| g.len() as f64 * train_fraction).collect();
    let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut deficit = n_train - take.iter().sum::<usize>();
    let mut by_remainder: Vec<usize> = (0..strata.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for g in by_remainder {
        if deficit == 0 {
            break;
        }
        if take[g] < strata[g].len() {
            take[g] += 1;
            deficit -= 1;
        }
    }

    let mut in_train = vec![false; n];
    for (group, &t) in strata.iter().zip(&take) {
        for &i in &group[..t] {
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<_>, Vec<_>) = records.iter().zip(&in_train).partition(|(_, &t)| t);
    Ok((
        train.into_iter().map(|(r, _)| r.clone()).collect(),
        test.into_iter().map(|(r, _)| r.clone()).collect(),
    ))
}

/// Per context, picks identifiers one system at a time in round-robin order
/// until `per_context` are chosen or the context is exhausted.
pub fn round_robin_sample(records: &[IdentifierRecord], per_context: usize, seed: u64) -> Vec<IdentifierRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for ctx in IdentifierContext::ALL {
        let mut by_system: BTreeMap<&str, Vec<&IdentifierRecord>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.context == ctx) {
            by_system.entry(r.system.as_str()).or_default().push(r);
        }
        let mut pools: Vec<Vec<&IdentifierRecord>> = by_system.into_values().collect();
        for p in &mut pools {
            p.shuffle(&mut rng);
        }
        let mut taken = 0;
        'outer: while taken < per_context && pools.iter().any(|p| !p.is_empty()) {
            for p in &mut pools {
                if taken == per_context {
                    break 'outer;
                }
                if let Some(r) = p.pop() {
                    out.push(r.clone());
                    taken += 1;
                }
            }
        }
    }
    out
}
