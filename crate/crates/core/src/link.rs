//! Identifier assignment and refinement.
//!
//! Assignment processes one document at a time, longest mentions first,
//! against a document-local registry (`DocEntities`) consulted before the
//! global catalog: once "Donald Trump" is linked, a later "Trump" attaches
//! to the same identifier. Mentions absent from both fall back to a
//! synthetic `lemma|CATEGORY` identifier, which participates in the
//! registry like any other id.
//!
//! Refinement then merges mention groups whose phrase embeddings are close:
//! groups are nodes, an edge appears when some cross-group mention pair has
//! a dot product at or above the threshold, and every connected component
//! takes the identifier with the highest term frequency.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexMap;

use crate::corpus::{collapse_ws, is_wikidata_id, Category, LinkedMention, Mention};
use crate::embed::{similarity, VectorTable};
use crate::error::{Error, Result};
use crate::kb::EntityCatalog;

/// Document-local registry of already-linked phrases, insertion-ordered.
#[derive(Debug, Clone, Default)]
pub struct DocEntities {
    map: IndexMap<String, Vec<(String, String)>>,
}

impl DocEntities {
    pub fn add(&mut self, phrase: &str, id: &str, language: &str) {
        let key = collapse_ws(phrase);
        if key.is_empty() {
            return;
        }
        let ids = self.map.entry(key).or_default();
        let pair = (id.to_string(), language.to_string());
        if !ids.contains(&pair) {
            ids.push(pair);
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(String, String)])> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// Where a candidate identifier came from; assignment prefers document
/// hits, then popular catalog entries, then the synthetic fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateSource {
    Document,
    Catalog { tf: u64 },
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub id: String,
    pub language: String,
    pub source: CandidateSource,
}

/// Linker settings for one document's language.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub language: String,
    pub theta: f32,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            language: String::new(),
            theta: 0.5,
        }
    }
}

/// Whether two phrases plausibly name the same entity: after case folding
/// and tokenization, the shorter phrase's words must appear in the longer
/// one in order (whole-word matches only). Equal phrases always match.
pub fn same_entity(doc_phrase: &str, phrase: &str) -> bool {
    let a: Vec<String> = doc_phrase
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect();
    let b: Vec<String> = phrase
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    if short.is_empty() {
        return long.is_empty();
    }
    let mut it = long.iter();
    short.iter().all(|w| it.any(|l| l == w))
}

/// Synthetic identifier for entities absent from the knowledge base.
pub fn synthetic_id(lemma: &str, category: Category) -> String {
    format!("{lemma}|{category}")
}

/// Candidate identifiers for a phrase: document-registry matches first (in
/// insertion order), then catalog hits for the exact name in descending
/// term frequency, filtered to the mention's category.
pub fn get_identifiers(
    phrase: &str,
    category: Category,
    doc_entities: &DocEntities,
    catalog: &EntityCatalog,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (doc_phrase, ids) in doc_entities.iter() {
        if same_entity(doc_phrase, phrase) {
            for (id, language) in ids {
                out.push(Candidate {
                    id: id.clone(),
                    language: language.clone(),
                    source: CandidateSource::Document,
                });
            }
        }
    }
    for entry in catalog.lookup(phrase) {
        if entry.category == category {
            out.push(Candidate {
                id: entry.id.clone(),
                language: entry.language.clone(),
                source: CandidateSource::Catalog { tf: entry.tf },
            });
        }
    }
    out
}

/// The first document-registry candidate wins; otherwise the catalog
/// candidate with maximal term frequency, preferring the document language
/// on ties; otherwise the synthetic fallback.
pub fn best_id(candidates: &[Candidate], doc_language: &str) -> Option<String> {
    if let Some(c) = candidates
        .iter()
        .find(|c| c.source == CandidateSource::Document)
    {
        return Some(c.id.clone());
    }
    let mut best: Option<(&Candidate, u64, bool)> = None;
    for c in candidates {
        let CandidateSource::Catalog { tf } = c.source else {
            continue;
        };
        let lang_pref = c.language == doc_language;
        let better = match best {
            None => true,
            Some((_, best_tf, best_pref)) => {
                tf > best_tf || (tf == best_tf && lang_pref && !best_pref)
            }
        };
        if better {
            best = Some((c, tf, lang_pref));
        }
    }
    if let Some((c, _, _)) = best {
        return Some(c.id.clone());
    }
    candidates
        .iter()
        .find(|c| c.source == CandidateSource::Synthetic)
        .map(|c| c.id.clone())
}

/// Assigns identifiers to one document's lemmatized mention triples.
/// Duplicates collapse to one key; processing order is descending phrase
/// word count, ties by descending character length, then lexicographic,
/// which makes the whole function deterministic.
pub fn add_and_link(
    ners: &[(String, String, Category)],
    catalog: &EntityCatalog,
    config: &LinkConfig,
) -> IndexMap<(String, String, Category), String> {
    let mut triples: Vec<&(String, String, Category)> = Vec::new();
    let mut seen: std::collections::HashSet<&(String, String, Category)> =
        std::collections::HashSet::new();
    for t in ners {
        if seen.insert(t) {
            triples.push(t);
        }
    }
    triples.sort_by(|a, b| {
        let words_a = a.0.split_whitespace().count();
        let words_b = b.0.split_whitespace().count();
        words_b
            .cmp(&words_a)
            .then_with(|| b.0.chars().count().cmp(&a.0.chars().count()))
            .then_with(|| a.cmp(b))
    });

    let mut doc_entities = DocEntities::default();
    let mut linked = IndexMap::new();
    for (phrase, lemma, category) in triples {
        let mut candidates = get_identifiers(phrase, *category, &doc_entities, catalog);
        candidates.extend(get_identifiers(lemma, *category, &doc_entities, catalog));
        candidates.push(Candidate {
            id: synthetic_id(lemma, *category),
            language: config.language.clone(),
            source: CandidateSource::Synthetic,
        });
        let id = best_id(&candidates, &config.language).expect("synthetic candidate present");

        linked.insert((phrase.clone(), lemma.clone(), *category), id.clone());
        doc_entities.add(lemma, &id, &config.language);
        for alias in catalog.aliases(&id, &config.language) {
            doc_entities.add(&alias, &id, &config.language);
        }
    }
    linked
}

/// Term frequency used during refinement: synthetic identifiers rank below
/// every catalog identifier.
fn refine_tf(id: &str, tf_index: &BTreeMap<String, u64>) -> i64 {
    match tf_index.get(id) {
        Some(tf) => *tf as i64,
        None if is_wikidata_id(id) => 0,
        None => -1,
    }
}

/// Merges mention groups by embedding similarity. Mentions must come from
/// a single language. Groups share an edge when some cross-group pair of
/// lemmas has a dot product at or above `theta`; connected components merge
/// and take the constituent identifier with the highest term frequency
/// (ties to the lexicographically smaller id). Mention order is preserved.
pub fn refine(
    mentions: &[LinkedMention],
    table: &VectorTable,
    tf_index: &BTreeMap<String, u64>,
    theta: f32,
) -> Vec<LinkedMention> {
    let mut groups: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, m) in mentions.iter().enumerate() {
        groups.entry(m.entity_id.as_str()).or_default().push(i);
    }
    let group_ids: Vec<&str> = groups.keys().copied().collect();
    let n = group_ids.len();

    let mut embeddings: HashMap<&str, Vec<f32>> = HashMap::new();
    for m in mentions {
        embeddings
            .entry(m.lemma.as_str())
            .or_insert_with(|| table.embed_phrase(&m.lemma).unwrap_or_default());
    }

    // Union-find over groups.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for g1 in 0..n {
        'pair: for g2 in g1 + 1..n {
            for &i in &groups[group_ids[g1]] {
                for &j in &groups[group_ids[g2]] {
                    let u = &embeddings[mentions[i].lemma.as_str()];
                    let v = &embeddings[mentions[j].lemma.as_str()];
                    if let Ok(sim) = similarity(u, v) {
                        if sim >= theta {
                            let (ra, rb) = (find(&mut parent, g1), find(&mut parent, g2));
                            if ra != rb {
                                parent[rb.max(ra)] = rb.min(ra);
                            }
                            continue 'pair;
                        }
                    }
                }
            }
        }
    }

    // Component identifier: maximal tf, ties to the smaller id.
    let mut component_id: HashMap<usize, &str> = HashMap::new();
    for g in 0..n {
        let root = find(&mut parent, g);
        let id = group_ids[g];
        component_id
            .entry(root)
            .and_modify(|best| {
                let (a, b) = (refine_tf(id, tf_index), refine_tf(best, tf_index));
                if a > b || (a == b && id < *best) {
                    *best = id;
                }
            })
            .or_insert(id);
    }

    let mut relabel: HashMap<&str, &str> = HashMap::new();
    for g in 0..n {
        let root = find(&mut parent, g);
        relabel.insert(group_ids[g], component_id[&root]);
    }

    mentions
        .iter()
        .map(|m| {
            let mut out = m.clone();
            out.entity_id = relabel[m.entity_id.as_str()].to_string();
            out
        })
        .collect()
}

/// A label-override post-processing rule: mentions whose surface equals the
/// pattern case-insensitively are reassigned to the category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverrideRule {
    pub pattern: String,
    pub category: Category,
}

/// Applies override rules; rule order is priority, the first matching rule
/// wins. Surfaces and order are untouched.
pub fn apply_overrides(mentions: Vec<Mention>, rules: &[OverrideRule]) -> Vec<Mention> {
    if rules.is_empty() {
        return mentions;
    }
    let folded: Vec<String> = rules.iter().map(|r| r.pattern.to_lowercase()).collect();
    mentions
        .into_iter()
        .map(|mut m| {
            let surface = m.surface.to_lowercase();
            if let Some(i) = folded.iter().position(|p| *p == surface) {
                m.category = rules[i].category;
            }
            m
        })
        .collect()
}

/// Override rules persisted as `pattern<TAB>category`.
pub fn read_override_rules<R: std::io::BufRead>(reader: R) -> Result<Vec<OverrideRule>> {
    let mut rules = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (pattern, category) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected `pattern<TAB>category`"))?;
        let category = category.parse().map_err(|source| Error::Category {
            line: line_no,
            source,
        })?;
        rules.push(OverrideRule {
            pattern: pattern.to_string(),
            category,
        });
    }
    Ok(rules)
}
