//! Phrase-level lemmatization schemas: per-word suffix tuples on the left,
//! replacement suffixes on the right, e.g. `(-vem, -vlem) → (-v, -vel)`.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::inventory::SuffixInventory;

/// A per-word suffix rewrite over a whole phrase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhraseSchema {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    pub support: u64,
}

/// Induces the schema of one (inflected, lemma) pair: the left-hand side is
/// each inflected word's longest inventory suffix, the right-hand side is
/// whatever must replace it to obtain the lemma word. Yields nothing when
/// some stem is not a prefix of its lemma word.
pub fn induce_schema(
    inflected: &[String],
    lemma: &[String],
    inv: &SuffixInventory,
) -> Result<Option<PhraseSchema>> {
    if inflected.len() != lemma.len() {
        return Err(Error::WordCountMismatch {
            left: inflected.len(),
            right: lemma.len(),
        });
    }
    let mut lhs = Vec::with_capacity(inflected.len());
    let mut rhs = Vec::with_capacity(inflected.len());
    for (word, target) in inflected.iter().zip(lemma) {
        let suffix = inv.longest_match(word);
        let stem = &word[..word.len() - suffix.len()];
        match target.strip_prefix(stem) {
            Some(replacement) => {
                lhs.push(suffix.to_string());
                rhs.push(replacement.to_string());
            }
            None => return Ok(None),
        }
    }
    Ok(Some(PhraseSchema {
        lhs,
        rhs,
        support: 1,
    }))
}

/// Applies a schema: usable only when the phrase has the same word count
/// and each word's longest inventory suffix equals the schema's left-hand
/// suffix at that position.
pub fn apply_schema(
    schema: &PhraseSchema,
    phrase: &[String],
    inv: &SuffixInventory,
) -> Option<Vec<String>> {
    if schema.lhs.len() != phrase.len() {
        return None;
    }
    let mut out = Vec::with_capacity(phrase.len());
    for (i, word) in phrase.iter().enumerate() {
        if inv.longest_match(word) != schema.lhs[i] {
            return None;
        }
        let stem = &word[..word.len() - schema.lhs[i].len()];
        out.push(format!("{stem}{}", schema.rhs[i]));
    }
    Some(out)
}

/// Schemas indexed by left-hand suffix tuple; identical (lhs, rhs) schemas
/// accumulate support.
#[derive(Debug, Clone, Default)]
pub struct SchemaSet {
    by_lhs: HashMap<Vec<String>, BTreeMap<Vec<String>, u64>>,
    len: usize,
}

impl SchemaSet {
    pub fn insert(&mut self, schema: PhraseSchema) {
        let entry = self
            .by_lhs
            .entry(schema.lhs)
            .or_default()
            .entry(schema.rhs)
            .or_insert(0);
        if *entry == 0 {
            self.len += 1;
        }
        *entry += schema.support;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Absorbs another set; supports of identical schemas add up.
    pub fn merge(&mut self, other: SchemaSet) {
        for schema in other.schemas() {
            self.insert(schema);
        }
    }

    /// Right-hand sides recorded for a left-hand tuple, with supports.
    pub fn lookup(&self, lhs: &[String]) -> impl Iterator<Item = (&[String], u64)> {
        self.by_lhs
            .get(lhs)
            .into_iter()
            .flat_map(|m| m.iter().map(|(rhs, s)| (rhs.as_slice(), *s)))
    }

    /// All schemas in deterministic order.
    pub fn schemas(&self) -> Vec<PhraseSchema> {
        let mut out: Vec<PhraseSchema> = self
            .by_lhs
            .iter()
            .flat_map(|(lhs, targets)| {
                targets.iter().map(move |(rhs, support)| PhraseSchema {
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    support: *support,
                })
            })
            .collect();
        out.sort();
        out
    }
}

/// Suffixes are written with a leading dash in the paper's notation
/// (`-vem -vlem<TAB>-v -vel<TAB>support`); the bare dash is the empty
/// suffix. A real suffix starting with a dash simply gains a second one.
fn encode_suffix(s: &str) -> String {
    format!("-{s}")
}

fn decode_suffix(token: &str, line: usize) -> Result<String> {
    token
        .strip_prefix('-')
        .map(str::to_string)
        .ok_or_else(|| Error::parse(line, format!("suffix token `{token}` lacks leading dash")))
}

pub fn write_schemas<W: Write>(writer: &mut W, schemas: &SchemaSet) -> Result<()> {
    for schema in schemas.schemas() {
        let lhs: Vec<String> = schema.lhs.iter().map(|s| encode_suffix(s)).collect();
        let rhs: Vec<String> = schema.rhs.iter().map(|s| encode_suffix(s)).collect();
        writeln!(
            writer,
            "{}\t{}\t{}",
            lhs.join(" "),
            rhs.join(" "),
            schema.support
        )?;
    }
    Ok(())
}

pub fn read_schemas<R: BufRead>(reader: R) -> Result<SchemaSet> {
    let mut set = SchemaSet::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 columns, found {}", cols.len()),
            ));
        }
        let lhs: Vec<String> = cols[0]
            .split(' ')
            .map(|t| decode_suffix(t, line_no))
            .collect::<Result<_>>()?;
        let rhs: Vec<String> = cols[1]
            .split(' ')
            .map(|t| decode_suffix(t, line_no))
            .collect::<Result<_>>()?;
        if lhs.len() != rhs.len() {
            return Err(Error::parse(line_no, "lhs/rhs arity mismatch"));
        }
        let support: u64 = cols[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad support `{}`", cols[2])))?;
        set.insert(PhraseSchema { lhs, rhs, support });
    }
    Ok(set)
}
