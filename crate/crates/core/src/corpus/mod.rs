//! Annotated identifier corpora: records, the tab-separated file format,
//! source extraction, and identifier-atomic partitioning.

mod extract;
mod partition;

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::splitter;
use crate::taggers::{ConstituentTags, Tagger};
use crate::tagset::{IdentifierContext, StanfordLabel, Tag};

pub use extract::{extract_identifiers, ExtractOptions};
pub use partition::{assign_folds, round_robin_sample, train_test_split, FoldAssignment};

pub const HEADER: &str = "id\tsystem\tcontext\ttype_hint\traw_name\tposition\tword\tswum\tposse\tstanford\tgold";
pub const MISSING: &str = "MISSING";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifierRecord {
    pub id: String,
    pub system: String,
    pub context: IdentifierContext,
    pub type_hint: String,
    pub raw_name: String,
    pub words: Vec<String>,
    /// Always one entry per word; untagged words carry MISSING everywhere.
    pub constituent: Vec<ConstituentTags>,
    pub gold: Option<Vec<Tag>>,
}

impl IdentifierRecord {
    /// Builds an untagged record, splitting `raw_name` into words.
    pub fn new(
        id: impl Into<String>,
        system: impl Into<String>,
        context: IdentifierContext,
        type_hint: impl Into<String>,
        raw_name: impl Into<String>,
    ) -> Result<Self> {
        let raw_name = raw_name.into();
        let words = splitter::split(&raw_name)?.words;
        Ok(IdentifierRecord {
            id: id.into(),
            system: system.into(),
            context,
            type_hint: type_hint.into(),
            constituent: vec![ConstituentTags::default(); words.len()],
            raw_name,
            words,
            gold: None,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// A tagger column is present when at least one word carries a value.
    pub fn has_column(&self, tagger: Tagger) -> bool {
        self.constituent.iter().any(|c| match tagger {
            Tagger::Swum => c.swum.is_some(),
            Tagger::Posse => c.posse.is_some(),
            Tagger::Stanford => c.stanford.is_some(),
        })
    }

    pub fn gold(&self) -> Result<&[Tag]> {
        self.gold.as_deref().ok_or_else(|| Error::MissingGold(self.id.clone()))
    }

    /// The tagger's output resolved into the gold alphabet, if present.
    pub fn constituent_tags(&self, tagger: Tagger) -> Option<Vec<Tag>> {
        self.constituent
            .iter()
            .map(|c| match tagger {
                Tagger::Swum => c.swum,
                Tagger::Posse => c.posse,
                Tagger::Stanford => c.stanford.map(|s| s.resolve(self.context)),
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.words.is_empty() {
            return Err(Error::invalid(format!("record {} has no words", self.id)));
        }
        if self.constituent.len() != self.words.len() {
            return Err(Error::invalid(format!(
                "record {}: constituent/word length mismatch",
                self.id
            )));
        }
        if let Some(g) = &self.gold {
            if g.len() != self.words.len() {
                return Err(Error::invalid(format!("record {}: gold/word length mismatch", self.id)));
            }
        }
        Ok(())
    }
}

fn opt_field<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| MISSING.to_string(), ToString::to_string)
}

fn parse_opt<T, F>(s: &str, line: usize, f: F) -> Result<Option<T>>
where
    F: FnOnce(&str) -> Result<T>,
{
    if s == MISSING {
        return Ok(None);
    }
    f(s).map(Some).map_err(|e| match e {
        Error::UnknownTag(t) => Error::parse(line, format!("unknown tag {t}")),
        other => Error::parse(line, other.to_string()),
    })
}

struct PendingRecord {
    first_line: usize,
    record: IdentifierRecord,
    positions: Vec<usize>,
    gold: Vec<Option<Tag>>,
}

pub fn parse_corpus<R: BufRead>(reader: R) -> Result<Vec<IdentifierRecord>> {
    let mut lines = reader.lines();
    match lines.next() {
        Some(header) => {
            let header = header?;
            if header.trim_end_matches('\r') != HEADER {
                return Err(Error::parse(1, "missing or malformed header row"));
            }
        }
        None => return Err(Error::parse(1, "missing header row")),
    }

    let mut order: Vec<String> = Vec::new();
    let mut pending: HashMap<String, PendingRecord> = HashMap::new();
    for (idx, line) in lines.enumerate() {
        let n = idx + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 11 {
            return Err(Error::parse(n, format!("expected 11 columns, found {}", cols.len())));
        }
        let context: IdentifierContext = cols[2].parse().map_err(|e: Error| Error::parse(n, e.to_string()))?;
        let position: usize = cols[5]
            .parse()
            .map_err(|_| Error::parse(n, format!("invalid position {:?}", cols[5])))?;
        if cols[6].is_empty() {
            return Err(Error::parse(n, "empty word"));
        }
        let tags = ConstituentTags {
            swum: parse_opt(cols[7], n, str::parse)?,
            posse: parse_opt(cols[8], n, str::parse)?,
            stanford: parse_opt(cols[9], n, str::parse::<StanfordLabel>)?,
        };
        let gold = parse_opt(cols[10], n, str::parse)?;

        let id = cols[0].to_string();
        let entry = pending.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            PendingRecord {
                first_line: n,
                record: IdentifierRecord {
                    id,
                    system: cols[1].to_string(),
                    context,
                    type_hint: cols[3].to_string(),
                    raw_name: cols[4].to_string(),
                    words: Vec::new(),
                    constituent: Vec::new(),
                    gold: None,
                },
                positions: Vec::new(),
                gold: Vec::new(),
            }
        });
        let r = &entry.record;
        if r.system != cols[1] || r.context != context || r.type_hint != cols[3] || r.raw_name != cols[4] {
            return Err(Error::parse(
                n,
                format!("fields disagree with earlier rows of identifier {}", r.id),
            ));
        }
        entry.positions.push(position);
        entry.record.words.push(cols[6].to_string());
        entry.record.constituent.push(tags);
        entry.gold.push(gold);
    }

    let mut records = Vec::with_capacity(order.len());
    for id in order {
        let PendingRecord {
            first_line,
            mut record,
            positions,
            gold,
        } = pending.remove(&id).expect("grouped id");
        if positions.iter().enumerate().any(|(i, &p)| p != i + 1) {
            return Err(Error::parse(
                first_line,
                format!(
                    "identifier {id}: positions {positions:?} do not run 1..={}",
                    record.words.len()
                ),
            ));
        }
        let present = gold.iter().filter(|g| g.is_some()).count();
        record.gold = if present == 0 {
            None
        } else if present == gold.len() {
            Some(gold.into_iter().flatten().collect())
        } else {
            return Err(Error::parse(
                first_line,
                format!("identifier {id}: gold tags only partially present"),
            ));
        };
        records.push(record);
    }
    Ok(records)
}

pub fn read_corpus(path: &std::path::Path) -> Result<Vec<IdentifierRecord>> {
    let file = std::fs::File::open(path)?;
    parse_corpus(std::io::BufReader::new(file))
}

fn check_field(record: &IdentifierRecord, value: &str) -> Result<()> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::invalid(format!(
            "record {}: field {value:?} contains a tab or newline",
            record.id
        )));
    }
    Ok(())
}

/// Writes records in the canonical layout: header, then one row per word in
/// record order.
pub fn write_corpus<W: Write>(mut out: W, records: &[IdentifierRecord]) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in records {
        r.check()?;
        for field in [&r.id, &r.system, &r.type_hint, &r.raw_name] {
            check_field(r, field)?;
        }
        for (i, (word, c)) in r.words.iter().zip(&r.constituent).enumerate() {
            check_field(r, word)?;
            let gold = r.gold.as_ref().map(|g| g[i]);
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.id,
                r.system,
                r.context,
                r.type_hint,
                r.raw_name,
                i + 1,
                word,
                opt_field(&c.swum),
                opt_field(&c.posse),
                opt_field(&c.stanford),
                opt_field(&gold),
            )?;
        }
    }
    Ok(())
}

pub fn write_corpus_file(path: &std::path::Path, records: &[IdentifierRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_corpus(&mut buf, records)?;
    std::fs::write(path, buf)?;
    Ok(())
}
