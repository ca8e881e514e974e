//! Grammar patterns, mis-annotation ranking, and per-context breakdowns.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::IdentifierRecord;
use crate::error::{Error, Result};
use crate::metrics::{context_accuracies, ContextAccuracy};
use crate::taggers::Tagger;
use crate::tagset::{IdentifierContext, Tag};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrammarPattern(Vec<Tag>);

impl GrammarPattern {
    pub fn tags(&self) -> &[Tag] {
        &self.0
    }
}

pub fn pattern_of(tags: &[Tag]) -> Result<GrammarPattern> {
    if tags.is_empty() {
        return Err(Error::invalid("a grammar pattern needs at least one tag"));
    }
    Ok(GrammarPattern(tags.to_vec()))
}

impl fmt::Display for GrammarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for GrammarPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let tags = s.split_whitespace().map(str::parse).collect::<Result<Vec<Tag>>>()?;
        pattern_of(&tags)
    }
}

impl Serialize for GrammarPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GrammarPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternGrouping {
    #[default]
    Gold,
    /// Group by what the model predicted; `actual` then counts predictions.
    Predicted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisannotationRow {
    pub pattern: GrammarPattern,
    pub incorrect: usize,
    pub actual: usize,
    pub proportion: f64,
}

fn paired<'a>(records: &'a [IdentifierRecord], predictions: &'a [Vec<Tag>]) -> Result<Vec<(&'a [Tag], &'a [Tag])>> {
    if records.len() != predictions.len() {
        return Err(Error::invalid(format!(
            "{} records but {} predictions",
            records.len(),
            predictions.len()
        )));
    }
    records
        .iter()
        .zip(predictions)
        .map(|(r, p)| {
            let g = r.gold()?;
            if g.len() != p.len() {
                return Err(Error::invalid(format!("record {} is not fully tagged", r.id)));
            }
            Ok((g, p.as_slice()))
        })
        .collect()
}

/// Patterns ranked by the share of their identifiers that were tagged
/// wrong anywhere. Patterns with no errors are left out.
pub fn misannotation_ranking(
    records: &[IdentifierRecord],
    predictions: &[Vec<Tag>],
    top_k: usize,
    grouping: PatternGrouping,
) -> Result<Vec<MisannotationRow>> {
    if top_k < 1 {
        return Err(Error::invalid("top_k must be at least 1"));
    }
    let mut groups: BTreeMap<GrammarPattern, (usize, usize)> = BTreeMap::new();
    for (gold, pred) in paired(records, predictions)? {
        let key = match grouping {
            PatternGrouping::Gold => gold,
            PatternGrouping::Predicted => pred,
        };
        let e = groups.entry(pattern_of(key)?).or_insert((0, 0));
        e.1 += 1;
        if gold != pred {
            e.0 += 1;
        }
    }
    let mut rows: Vec<MisannotationRow> = groups
        .into_iter()
        .filter(|(_, (bad, _))| *bad > 0)
        .map(|(pattern, (incorrect, actual))| MisannotationRow {
            pattern,
            incorrect,
            actual,
            proportion: incorrect as f64 / actual as f64,
        })
        .collect();
    rows.sort_by(ranking_order);
    rows.truncate(top_k);
    Ok(rows)
}

/// Proportion descending (compared exactly as fractions), then larger
/// `actual`, then pattern text.
fn ranking_order(a: &MisannotationRow, b: &MisannotationRow) -> Ordering {
    let lhs = a.incorrect as u128 * b.actual as u128;
    let rhs = b.incorrect as u128 * a.actual as u128;
    rhs.cmp(&lhs)
        .then(b.actual.cmp(&a.actual))
        .then_with(|| a.pattern.to_string().cmp(&b.pattern.to_string()))
}

pub const RANKING_HEADER: &str = "Grammar Pattern\t# Incorrect\tActual\tProportion";

pub fn ranking_tsv(rows: &[MisannotationRow]) -> String {
    let mut s = String::from(RANKING_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{}\t{}\t{}\t{:.2}\n",
            r.pattern, r.incorrect, r.actual, r.proportion
        ));
    }
    s
}

/// Word- and identifier-level accuracy for each context (Attribute, Class,
/// Declaration, Function, Parameter) followed by the overall row.
pub fn per_context_report(records: &[IdentifierRecord], predictions: &[Vec<Tag>]) -> Result<Vec<ContextAccuracy>> {
    let pairs = paired(records, predictions)?;
    let contexts: Vec<IdentifierContext> = records.iter().map(|r| r.context).collect();
    let gold: Vec<Vec<Tag>> = pairs.iter().map(|(g, _)| g.to_vec()).collect();
    let pred: Vec<Vec<Tag>> = pairs.iter().map(|(_, p)| p.to_vec()).collect();
    context_accuracies(&contexts, &gold, &pred)
}

pub fn context_label(row: &ContextAccuracy) -> &'static str {
    match row.context {
        Some(IdentifierContext::Attribute) => "Attribute",
        Some(IdentifierContext::Class) => "Class",
        Some(IdentifierContext::Declaration) => "Declaration",
        Some(IdentifierContext::Function) => "Function",
        Some(IdentifierContext::Parameter) => "Parameter",
        None => "Overall",
    }
}

pub const CONTEXT_HEADER: &str = "Context\tWords\tWord Accuracy\tIdentifiers\tIdentifier Accuracy";

pub fn per_context_tsv(rows: &[ContextAccuracy]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
    let mut s = String::from(CONTEXT_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            context_label(r),
            r.words,
            cell(r.word_accuracy),
            r.identifiers,
            cell(r.identifier_accuracy)
        ));
    }
    s
}

/// A constituent tagger's own output, resolved into the gold alphabet, used
/// as a prediction. Words the tagger left MISSING count as OTHER.
pub fn constituent_predictions(records: &[IdentifierRecord], tagger: Tagger) -> Result<Vec<Vec<Tag>>> {
    records
        .iter()
        .map(|r| {
            if !r.has_column(tagger) {
                return Err(Error::MissingColumn {
                    record: r.id.clone(),
                    feature: tagger.as_str().to_string(),
                });
            }
            Ok(r.constituent
                .iter()
                .map(|c| {
                    let t = match tagger {
                        Tagger::Swum => c.swum,
                        Tagger::Posse => c.posse,
                        Tagger::Stanford => c.stanford.map(|s| s.resolve(r.context)),
                    };
                    t.unwrap_or(Tag::Other)
                })
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Tag::*;

    fn record(i: usize, gold: &[Tag]) -> IdentifierRecord {
        let raw = format!("w{}", "Part".repeat(gold.len() - 1));
        let mut r = IdentifierRecord::new(format!("r{i}"), "s", IdentifierContext::Declaration, "int", raw).unwrap();
        r.gold = Some(gold.to_vec());
        r
    }

    #[test]
    fn pattern_strings() {
        assert_eq!(pattern_of(&[Verb, NounModifier, Noun]).unwrap().to_string(), "V NM N");
        assert_eq!(
            pattern_of(&[Preamble, Noun, Verb, Noun]).unwrap().to_string(),
            "PRE N V N"
        );
        assert_eq!(pattern_of(&[Noun]).unwrap().to_string(), "N");
        assert!(pattern_of(&[]).is_err());
        let p: GrammarPattern = "NM NM N".parse().unwrap();
        assert_eq!(p.tags(), [NounModifier, NounModifier, Noun]);
    }

    #[test]
    fn two_of_four_wrong() {
        let gold = [NounModifier, Noun];
        let recs: Vec<_> = (0..4).map(|i| record(i, &gold)).collect();
        let preds = vec![gold.to_vec(), gold.to_vec(), vec![Noun, Noun], vec![Verb, Noun]];
        let rows = misannotation_ranking(&recs, &preds, 5, PatternGrouping::Gold).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].incorrect, rows[0].actual, rows[0].proportion), (2, 4, 0.5));
        let by_pred = misannotation_ranking(&recs, &preds, 5, PatternGrouping::Predicted).unwrap();
        assert_eq!(by_pred.len(), 2);
        assert!(by_pred.iter().all(|r| r.proportion == 1.0));
    }

    #[test]
    fn all_correct_is_empty() {
        let recs = vec![record(0, &[Noun])];
        assert!(misannotation_ranking(&recs, &[vec![Noun]], 5, PatternGrouping::Gold)
            .unwrap()
            .is_empty());
        assert!(misannotation_ranking(&recs, &[vec![Noun]], 0, PatternGrouping::Gold).is_err());
    }

    #[test]
    fn ordering_rules() {
        let mut recs = Vec::new();
        let mut preds = Vec::new();
        // "N": 1 of 2 wrong; "V N": 2 of 4 wrong; "NM N": 3 of 3 wrong.
        for (gold, n, bad) in [
            (vec![Noun], 2, 1),
            (vec![Verb, Noun], 4, 2),
            (vec![NounModifier, Noun], 3, 3),
        ] {
            for j in 0..n {
                recs.push(record(recs.len(), &gold));
                preds.push(if j < bad { vec![Other; gold.len()] } else { gold.clone() });
            }
        }
        let rows = misannotation_ranking(&recs, &preds, 10, PatternGrouping::Gold).unwrap();
        let order: Vec<String> = rows.iter().map(|r| r.pattern.to_string()).collect();
        assert_eq!(order, ["NM N", "V N", "N"]);
        assert_eq!(rows.iter().map(|r| r.incorrect).sum::<usize>(), 6);
        assert_eq!(
            misannotation_ranking(&recs, &preds, 1, PatternGrouping::Gold)
                .unwrap()
                .len(),
            1
        );
        let tsv = ranking_tsv(&rows);
        assert!(tsv.starts_with(RANKING_HEADER));
        assert!(tsv.contains("\nNM N\t3\t3\t1.00\n"));
    }

    #[test]
    fn context_layout() {
        let recs = vec![record(0, &[Noun]), record(1, &[Verb, Noun])];
        let preds = vec![vec![Noun], vec![Noun, Noun]];
        let rows = per_context_report(&recs, &preds).unwrap();
        let labels: Vec<&str> = rows.iter().map(context_label).collect();
        assert_eq!(
            labels,
            ["Attribute", "Class", "Declaration", "Function", "Parameter", "Overall"]
        );
        assert_eq!(rows[2].word_accuracy, rows[5].word_accuracy);
        assert_eq!(rows[5].identifier_accuracy, Some(0.5));
    }
}
