//! Single-word lemmatization rules and word→lemma statistics built from
//! Universal Dependencies treebanks and plain form/lemma dictionaries.
//!
//! A rule rewrites a word suffix: a word `w` splits into `w = w1·w2` and the
//! lemma is `w1·v2` for a rule `(w2 → v2)`. Rules are induced from observed
//! (form, lemma) pairs by stripping the longest common prefix; the remainders
//! become a rule (Václavem/Václav gives `(-em → -)`), and prefix-extended
//! variants like `(-vem → -v)` are recorded alongside so that stem
//! alternations keep enough context to apply safely.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::corpus::{nfc, tokenize_phrase};
use crate::error::{Error, Result};
use crate::text::{char_count, char_suffix, common_prefix_bytes, split_char_suffix};

pub const DEFAULT_MIN_SUPPORT: u32 = 2;
pub const DEFAULT_MAX_SUFFIX_LEN: usize = 6;

/// One aggregated morphological reading: a (form, lemma, UPOS, FEATS) tuple
/// with its occurrence count. FEATS is carried as the raw feature string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MorphEntry {
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub feats: String,
    pub count: u64,
}

/// A single-word suffix-rewrite rule.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LemmaRule {
    pub from_suffix: String,
    pub to_suffix: String,
    /// Number of distinct (form, lemma) pairs witnessing the rule.
    pub support: u32,
}

/// Rule set indexed by source suffix for O(|word|) lookup.
#[derive(Debug, Clone, Default)]
pub struct LemmaRuleSet {
    by_from: HashMap<String, BTreeMap<String, u32>>,
    max_from_chars: usize,
    len: usize,
}

impl LemmaRuleSet {
    pub fn new(rules: impl IntoIterator<Item = LemmaRule>) -> Self {
        let mut set = LemmaRuleSet::default();
        for rule in rules {
            set.insert(rule);
        }
        set
    }

    pub fn insert(&mut self, rule: LemmaRule) {
        self.max_from_chars = self.max_from_chars.max(char_count(&rule.from_suffix));
        let targets = self.by_from.entry(rule.from_suffix).or_default();
        let support = targets.entry(rule.to_suffix).or_insert(0);
        if *support == 0 {
            self.len += 1;
        }
        *support = (*support).max(rule.support);
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Rules in deterministic (from, to) order.
    pub fn rules(&self) -> Vec<LemmaRule> {
        let mut out: Vec<LemmaRule> = self
            .by_from
            .iter()
            .flat_map(|(from, targets)| {
                targets.iter().map(move |(to, support)| LemmaRule {
                    from_suffix: from.clone(),
                    to_suffix: to.clone(),
                    support: *support,
                })
            })
            .collect();
        out.sort();
        out
    }

    /// True iff some split `form = w1·w2` with a rule `(w2 → v2)` gives
    /// `w1·v2 = candidate`. Equality always holds (implicit identity rule).
    pub fn possible_lemma(&self, form: &str, candidate: &str) -> bool {
        if form == candidate {
            return true;
        }
        let max_k = char_count(form).min(self.max_from_chars);
        for k in 0..=max_k {
            let (stem, suffix) = split_char_suffix(form, k);
            if let Some(targets) = self.by_from.get(suffix) {
                if let Some(rest) = candidate.strip_prefix(stem) {
                    if targets.contains_key(rest) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Free-function form of [`LemmaRuleSet::possible_lemma`].
pub fn possible_lemma(form: &str, candidate: &str, rules: &LemmaRuleSet) -> bool {
    rules.possible_lemma(form, candidate)
}

/// Reads CoNLL-U, producing one aggregated entry per distinct
/// (FORM, LEMMA, UPOS, FEATS) tuple. Multiword-token ranges (`3-4`) and
/// empty nodes (`5.1`) are skipped per the format definition.
pub fn ingest_conllu<R: BufRead>(reader: R) -> Result<Vec<MorphEntry>> {
    let mut counts: HashMap<(String, String, String, String), u64> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                line_no,
                format!("expected 10 columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let form = nfc(cols[1]);
        let lemma = nfc(cols[2]);
        if form.is_empty() || form == "_" || lemma.is_empty() || lemma == "_" {
            continue;
        }
        *counts
            .entry((form, lemma, cols[3].to_string(), cols[5].to_string()))
            .or_insert(0) += 1;
    }
    Ok(collect_entries(counts))
}

/// Reads a 2-column `form<TAB>lemma` dictionary into the same entry shape.
pub fn ingest_dict_tsv<R: BufRead>(reader: R) -> Result<Vec<MorphEntry>> {
    let mut counts: HashMap<(String, String, String, String), u64> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::parse(
                line_no,
                format!("expected 2 columns, found {}", cols.len()),
            ));
        }
        let form = nfc(cols[0]);
        let lemma = nfc(cols[1]);
        if form.is_empty() || lemma.is_empty() {
            return Err(Error::parse(line_no, "empty form or lemma"));
        }
        *counts
            .entry((form, lemma, "_".to_string(), "_".to_string()))
            .or_insert(0) += 1;
    }
    Ok(collect_entries(counts))
}

fn collect_entries(counts: HashMap<(String, String, String, String), u64>) -> Vec<MorphEntry> {
    let mut entries: Vec<MorphEntry> = counts
        .into_iter()
        .map(|((form, lemma, upos, feats), count)| MorphEntry {
            form,
            lemma,
            upos,
            feats,
            count,
        })
        .collect();
    entries.sort_by(|a, b| {
        (&a.form, &a.lemma, &a.upos, &a.feats).cmp(&(&b.form, &b.lemma, &b.upos, &b.feats))
    });
    entries
}

/// Multiset union of entry collections, e.g. several treebanks plus a
/// dictionary.
pub fn merge_entries(sources: impl IntoIterator<Item = Vec<MorphEntry>>) -> Vec<MorphEntry> {
    let mut counts: HashMap<(String, String, String, String), u64> = HashMap::new();
    for source in sources {
        for e in source {
            *counts
                .entry((e.form, e.lemma, e.upos, e.feats))
                .or_insert(0) += e.count;
        }
    }
    collect_entries(counts)
}

/// Induces suffix-rewrite rules from the distinct (form, lemma) pairs of
/// `entries`. For each pair the longest common prefix is stripped; the
/// remainders become a rule candidate, along with every extension of the
/// remainders by trailing prefix characters up to `max_suffix_len`.
/// Candidates witnessed by at least `min_support` distinct pairs are kept.
pub fn induce_word_rules(
    entries: &[MorphEntry],
    min_support: u32,
    max_suffix_len: usize,
) -> LemmaRuleSet {
    let pairs: BTreeSet<(&str, &str)> = entries
        .iter()
        .map(|e| (e.form.as_str(), e.lemma.as_str()))
        .collect();

    let mut supports: HashMap<(String, String), u32> = HashMap::new();
    for (form, lemma) in pairs {
        let cp = common_prefix_bytes(form, lemma);
        let prefix = &form[..cp];
        let w2 = &form[cp..];
        let v2 = &lemma[cp..];
        *supports
            .entry((w2.to_string(), v2.to_string()))
            .or_insert(0) += 1;
        let w2_chars = char_count(w2);
        let max_ext = max_suffix_len
            .saturating_sub(w2_chars)
            .min(char_count(prefix));
        for k in 1..=max_ext {
            let ext = char_suffix(prefix, k);
            *supports
                .entry((format!("{ext}{w2}"), format!("{ext}{v2}")))
                .or_insert(0) += 1;
        }
    }

    LemmaRuleSet::new(supports.into_iter().filter_map(|((from, to), support)| {
        (support >= min_support).then_some(LemmaRule {
            from_suffix: from,
            to_suffix: to,
            support,
        })
    }))
}

/// Rules persisted as `from_suffix<TAB>to_suffix<TAB>support`.
pub fn write_rules<W: Write>(writer: &mut W, rules: &LemmaRuleSet) -> Result<()> {
    for rule in rules.rules() {
        writeln!(
            writer,
            "{}\t{}\t{}",
            rule.from_suffix, rule.to_suffix, rule.support
        )?;
    }
    Ok(())
}

pub fn read_rules<R: BufRead>(reader: R) -> Result<LemmaRuleSet> {
    let mut set = LemmaRuleSet::default();
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
        let support: u32 = cols[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad support `{}`", cols[2])))?;
        set.insert(LemmaRule {
            from_suffix: nfc(cols[0]),
            to_suffix: nfc(cols[1]),
            support,
        });
    }
    Ok(set)
}

/// Entries persisted as `form<TAB>lemma<TAB>upos<TAB>feats<TAB>count`.
pub fn write_entries<W: Write>(writer: &mut W, entries: &[MorphEntry]) -> Result<()> {
    for e in entries {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}",
            e.form, e.lemma, e.upos, e.feats, e.count
        )?;
    }
    Ok(())
}

pub fn read_entries<R: BufRead>(reader: R) -> Result<Vec<MorphEntry>> {
    let mut counts: HashMap<(String, String, String, String), u64> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::parse(
                line_no,
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        let count: u64 = cols[4]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad count `{}`", cols[4])))?;
        *counts
            .entry((
                nfc(cols[0]),
                nfc(cols[1]),
                cols[2].to_string(),
                cols[3].to_string(),
            ))
            .or_insert(0) += count;
    }
    Ok(collect_entries(counts))
}

/// The finished morphological resource: aggregated entries with lookup
/// indices, the induced rule set and word frequency tables. Immutable once
/// built and safe to share across workers.
#[derive(Debug, Clone, Default)]
pub struct MorphLexicon {
    entries: Vec<MorphEntry>,
    form_index: HashMap<String, Vec<usize>>,
    folded_form_index: HashMap<String, Vec<usize>>,
    lemma_index: HashMap<String, Vec<usize>>,
    rules: LemmaRuleSet,
    lemma_freq: HashMap<String, u64>,
    form_freq: HashMap<String, u64>,
}

impl MorphLexicon {
    pub fn build(entries: Vec<MorphEntry>, min_support: u32, max_suffix_len: usize) -> Self {
        let rules = induce_word_rules(&entries, min_support, max_suffix_len);
        Self::from_parts(entries, rules)
    }

    /// Assembles a lexicon from pre-merged entries and an existing rule set
    /// (e.g. read back from a rules file).
    pub fn from_parts(entries: Vec<MorphEntry>, rules: LemmaRuleSet) -> Self {
        let entries = merge_entries([entries]);
        let mut lex = MorphLexicon {
            rules,
            ..Default::default()
        };
        for (i, e) in entries.iter().enumerate() {
            lex.form_index.entry(e.form.clone()).or_default().push(i);
            lex.folded_form_index
                .entry(e.form.to_lowercase())
                .or_default()
                .push(i);
            lex.lemma_index.entry(e.lemma.clone()).or_default().push(i);
            for word in tokenize_phrase(&e.lemma) {
                *lex.lemma_freq.entry(word).or_insert(0) += e.count;
            }
            *lex.form_freq.entry(e.form.clone()).or_insert(0) += e.count;
        }
        lex.entries = entries;
        lex
    }

    /// Adds externally mined lemma-word counts (Wikipedia titles, training
    /// lemmas).
    pub fn add_lemma_counts<'a>(&mut self, counts: impl IntoIterator<Item = (&'a str, u64)>) {
        for (word, count) in counts {
            *self.lemma_freq.entry(word.to_string()).or_insert(0) += count;
        }
    }

    pub fn entries(&self) -> &[MorphEntry] {
        &self.entries
    }

    pub fn rules(&self) -> &LemmaRuleSet {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Readings of a form, case-sensitive.
    pub fn readings(&self, form: &str) -> impl Iterator<Item = &MorphEntry> {
        self.form_index
            .get(form)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
    }

    /// Readings matched case-insensitively, used as a fallback.
    pub fn readings_folded(&self, form: &str) -> impl Iterator<Item = &MorphEntry> {
        self.folded_form_index
            .get(&form.to_lowercase())
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
    }

    /// All entries whose lemma equals `lemma` (inflection lookup).
    pub fn forms_of_lemma(&self, lemma: &str) -> impl Iterator<Item = &MorphEntry> {
        self.lemma_index
            .get(lemma)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
    }

    pub fn lemma_count(&self, word: &str) -> u64 {
        self.lemma_freq.get(word).copied().unwrap_or(0)
    }

    pub fn corpus_count(&self, word: &str) -> u64 {
        self.form_freq.get(word).copied().unwrap_or(0)
    }

    /// The lemma with the highest aggregated count among entries whose form
    /// equals `word` (case-sensitive first, then a case-insensitive retry).
    /// Unknown words are returned unchanged. Count ties break toward the
    /// lexicographically smaller lemma.
    pub fn most_popular_lemma(&self, word: &str) -> String {
        for case_sensitive in [true, false] {
            let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
            let readings: Box<dyn Iterator<Item = &MorphEntry>> = if case_sensitive {
                Box::new(self.readings(word))
            } else {
                Box::new(self.readings_folded(word))
            };
            for e in readings {
                *totals.entry(e.lemma.as_str()).or_insert(0) += e.count;
            }
            if let Some(best) = totals
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            {
                return best.0.to_string();
            }
        }
        word.to_string()
    }
}
