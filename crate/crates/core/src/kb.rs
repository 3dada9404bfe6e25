//! Entity catalog built from a slim Wikidata slice: category assignment by
//! descendant closure from per-category root entities, term-frequency
//! weighting, and alias/acronym extraction for PRO and ORG entities.
//!
//! The slim record format is one JSON object per line with fields `id`,
//! `labels` (language → strings), `aliases` (language → strings), `p31` and
//! `p279` (id lists). Alias strings under the pseudo-language `mul` are
//! treated as language-independent.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::corpus::{collapse_ws, is_wikidata_id, nfc, tokenize_phrase, Category};
use crate::error::Result;

/// One slim Wikidata record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntity {
    pub id: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p31: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p279: Vec<String>,
}

/// Entity records indexed by id.
#[derive(Debug, Clone, Default)]
pub struct EntityStore {
    entities: BTreeMap<String, KbEntity>,
    pub malformed: usize,
    pub duplicates: usize,
}

impl EntityStore {
    pub fn get(&self, id: &str) -> Option<&KbEntity> {
        self.entities.get(id)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &KbEntity> {
        self.entities.values()
    }

    pub fn insert(&mut self, entity: KbEntity) {
        if self.entities.insert(entity.id.clone(), entity).is_some() {
            self.duplicates += 1;
        }
    }

    /// Absorbs another store; records from `other` win on duplicate ids
    /// and the error counters add up.
    pub fn absorb(&mut self, other: EntityStore) {
        self.malformed += other.malformed;
        self.duplicates += other.duplicates;
        for (_, entity) in other.entities {
            self.insert(entity);
        }
    }
}

/// Reads entity-per-line records. Malformed records (bad JSON, missing or
/// ill-formed id) are skipped and counted; duplicate ids keep the last
/// record and bump the duplicate counter.
pub fn ingest_entities<R: BufRead>(reader: R) -> Result<EntityStore> {
    let mut store = EntityStore::default();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<KbEntity>(&line) {
            Ok(entity) if is_wikidata_id(&entity.id) => store.insert(entity),
            _ => store.malformed += 1,
        }
    }
    Ok(store)
}

/// Per-category root entities; defaults cover the five categories with
/// top-level Wikidata classes (human, location, event, product and
/// organization roots).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRoots(pub BTreeMap<Category, Vec<String>>);

impl Default for CategoryRoots {
    fn default() -> Self {
        let mut roots = BTreeMap::new();
        roots.insert(
            Category::Per,
            ids(&["Q5", "Q231002", "Q41710"]),
        );
        roots.insert(
            Category::Loc,
            ids(&["Q3257686", "Q2221906", "Q58416391", "Q214045"]),
        );
        roots.insert(
            Category::Evt,
            ids(&["Q1656682", "Q602884", "Q1190554"]),
        );
        roots.insert(
            Category::Pro,
            ids(&["Q22811462", "Q1485500", "Q11578774", "Q15621286", "Q1616075"]),
        );
        roots.insert(
            Category::Org,
            ids(&["Q43229", "Q252550", "Q783794"]),
        );
        CategoryRoots(roots)
    }
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl CategoryRoots {
    /// Every category must have at least one root.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for cat in Category::ALL {
            if self.0.get(&cat).map_or(true, Vec::is_empty) {
                return Err(format!("no roots configured for category {cat}"));
            }
        }
        Ok(())
    }
}

/// For each category: all ids reachable from the roots against the
/// direction of subclass-of edges (the transitive subclasses, roots
/// included), plus every id whose instance-of target lies in that subclass
/// set. Cycles are tolerated by the visited set.
pub fn descendant_closure(
    store: &EntityStore,
    roots: &CategoryRoots,
) -> BTreeMap<Category, BTreeSet<String>> {
    let mut reverse_subclass: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in store.iter() {
        for target in &e.p279 {
            reverse_subclass
                .entry(target.as_str())
                .or_default()
                .push(e.id.as_str());
        }
    }

    let mut out = BTreeMap::new();
    for (category, root_ids) in &roots.0 {
        let mut subclasses: BTreeSet<String> = root_ids.iter().cloned().collect();
        let mut queue: VecDeque<&str> = root_ids.iter().map(String::as_str).collect();
        while let Some(id) = queue.pop_front() {
            if let Some(children) = reverse_subclass.get(id) {
                for child in children {
                    if subclasses.insert(child.to_string()) {
                        queue.push_back(child);
                    }
                }
            }
        }
        let mut closure = subclasses.clone();
        for e in store.iter() {
            if e.p31.iter().any(|t| subclasses.contains(t)) {
                closure.insert(e.id.clone());
            }
        }
        out.insert(*category, closure);
    }
    out
}

/// Term frequency of an id: number of times it appears as a P31/P279 claim
/// value across the store, plus the number of label and alias strings the
/// entity itself carries. A computable popularity proxy for the slim record
/// format; higher means better known.
pub fn term_frequency(store: &EntityStore) -> BTreeMap<String, u64> {
    let mut tf: BTreeMap<String, u64> = BTreeMap::new();
    for e in store.iter() {
        for target in e.p31.iter().chain(&e.p279) {
            *tf.entry(target.clone()).or_insert(0) += 1;
        }
    }
    for e in store.iter() {
        let names = e.labels.values().map(Vec::len).sum::<usize>()
            + e.aliases.values().map(Vec::len).sum::<usize>();
        if names > 0 {
            *tf.entry(e.id.clone()).or_insert(0) += names as u64;
        }
    }
    tf
}

/// One catalog hit for a normalized name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub language: String,
    pub category: Category,
    pub tf: u64,
}

/// The finished catalog: normalized names to candidate entities, ordered by
/// descending term frequency, plus the alias table for PRO/ORG entities.
/// Immutable after build and shared read-only by linking workers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EntityCatalog {
    name_index: BTreeMap<String, Vec<CatalogEntry>>,
    tf_index: BTreeMap<String, u64>,
    categories: BTreeMap<String, BTreeSet<Category>>,
    alias_index: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    languages: Vec<String>,
    closure_sizes: BTreeMap<Category, usize>,
}

impl EntityCatalog {
    pub fn lookup(&self, name: &str) -> &[CatalogEntry] {
        let key = collapse_ws(&nfc(name));
        self.name_index.get(&key).map_or(&[], Vec::as_slice)
    }

    pub fn tf(&self, id: &str) -> Option<u64> {
        self.tf_index.get(id).copied()
    }

    pub fn tf_index(&self) -> &BTreeMap<String, u64> {
        &self.tf_index
    }

    pub fn categories_of(&self, id: &str) -> Option<&BTreeSet<Category>> {
        self.categories.get(id)
    }

    pub fn names(&self) -> usize {
        self.name_index.len()
    }

    pub fn entities(&self) -> usize {
        self.tf_index.len()
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn closure_sizes(&self) -> &BTreeMap<Category, usize> {
        &self.closure_sizes
    }

    /// Alias strings for PRO and ORG entities: explicit Wikidata aliases and
    /// acronyms derived from multiword labels, in the mention's language
    /// plus the language-independent ones. Other categories and unknown ids
    /// yield an empty list.
    pub fn aliases(&self, id: &str, language: &str) -> Vec<String> {
        let Some(cats) = self.categories.get(id) else {
            return Vec::new();
        };
        if !cats.contains(&Category::Pro) && !cats.contains(&Category::Org) {
            return Vec::new();
        }
        let Some(by_lang) = self.alias_index.get(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for lang in [language, "mul"] {
            if let Some(list) = by_lang.get(lang) {
                for alias in list {
                    if !out.contains(alias) {
                        out.push(alias.clone());
                    }
                }
            }
        }
        out
    }
}

/// Initial letters of a multiword label ("Sony Ericsson" → "SE").
fn acronym(label: &str) -> Option<String> {
    let words = tokenize_phrase(label);
    if words.len() < 2 {
        return None;
    }
    Some(words.iter().filter_map(|w| w.chars().next()).collect())
}

/// Builds the catalog: every label and alias of every retained entity, in
/// every configured language, becomes a name-index key (NFC,
/// whitespace-collapsed, case preserved). Entities in several category
/// closures index once per category.
pub fn build_catalog(
    store: &EntityStore,
    closure: &BTreeMap<Category, BTreeSet<String>>,
    tf: &BTreeMap<String, u64>,
    languages: &[String],
) -> EntityCatalog {
    let mut catalog = EntityCatalog {
        languages: languages.to_vec(),
        closure_sizes: closure.iter().map(|(c, ids)| (*c, ids.len())).collect(),
        ..Default::default()
    };

    for e in store.iter() {
        let cats: BTreeSet<Category> = closure
            .iter()
            .filter(|(_, ids)| ids.contains(&e.id))
            .map(|(c, _)| *c)
            .collect();
        if cats.is_empty() {
            continue;
        }
        let entity_tf = tf.get(&e.id).copied().unwrap_or(0);
        let mut indexed = false;

        for lang in languages {
            let names = e
                .labels
                .get(lang)
                .into_iter()
                .flatten()
                .chain(e.aliases.get(lang).into_iter().flatten());
            for name in names {
                let key = collapse_ws(&nfc(name));
                if key.is_empty() {
                    continue;
                }
                indexed = true;
                let bucket = catalog.name_index.entry(key).or_default();
                for cat in &cats {
                    bucket.push(CatalogEntry {
                        id: e.id.clone(),
                        language: lang.clone(),
                        category: *cat,
                        tf: entity_tf,
                    });
                }
            }
        }
        if !indexed {
            continue;
        }

        catalog.tf_index.insert(e.id.clone(), entity_tf);
        catalog.categories.insert(e.id.clone(), cats.clone());

        if cats.contains(&Category::Pro) || cats.contains(&Category::Org) {
            let mut langs: Vec<&str> = languages.iter().map(String::as_str).collect();
            langs.push("mul");
            for lang in langs {
                let mut list: Vec<String> = Vec::new();
                for alias in e.aliases.get(lang).into_iter().flatten() {
                    let alias = collapse_ws(&nfc(alias));
                    if !alias.is_empty() && !list.contains(&alias) {
                        list.push(alias);
                    }
                }
                for label in e.labels.get(lang).into_iter().flatten() {
                    if let Some(acr) = acronym(&collapse_ws(&nfc(label))) {
                        if !list.contains(&acr) {
                            list.push(acr);
                        }
                    }
                }
                if !list.is_empty() {
                    catalog
                        .alias_index
                        .entry(e.id.clone())
                        .or_default()
                        .insert(lang.to_string(), list);
                }
            }
        }
    }

    for bucket in catalog.name_index.values_mut() {
        bucket.sort_by(|a, b| {
            b.tf
                .cmp(&a.tf)
                .then_with(|| a.id.cmp(&b.id))
                .then_with(|| a.language.cmp(&b.language))
                .then_with(|| a.category.cmp(&b.category))
        });
        bucket.dedup();
    }
    catalog
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entity(id: &str) -> KbEntity {
        KbEntity {
            id: id.into(),
            labels: BTreeMap::new(),
            aliases: BTreeMap::new(),
            p31: Vec::new(),
            p279: Vec::new(),
        }
    }

    fn with_label(mut e: KbEntity, lang: &str, labels: &[&str]) -> KbEntity {
        e.labels
            .insert(lang.into(), labels.iter().map(|s| s.to_string()).collect());
        e
    }

    fn store_of(entities: Vec<KbEntity>) -> EntityStore {
        let mut store = EntityStore::default();
        for e in entities {
            store.insert(e);
        }
        store
    }

    #[test]
    fn ingest_reads_records_and_counts_bad_ones() {
        let input = concat!(
            r#"{"id":"Q5","labels":{"en":["human"]}}"#,
            "\n",
            r#"{"labels":{"en":["no id"]}}"#,
            "\n",
            "not json\n",
            r#"{"id":"Q5","labels":{"en":["human again"]}}"#,
            "\n",
        );
        let store = ingest_entities(input.as_bytes()).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.malformed, 2);
        assert_eq!(store.duplicates, 1);
        // Last record wins.
        assert_eq!(store.get("Q5").unwrap().labels["en"][0], "human again");
    }

    #[test]
    fn ingest_empty_stream() {
        let store = ingest_entities("".as_bytes()).unwrap();
        assert!(store.is_empty());
    }

    fn person_roots() -> CategoryRoots {
        let mut roots = CategoryRoots::default();
        roots.0.insert(Category::Per, vec!["Q5".into()]);
        roots
    }

    #[test]
    fn closure_includes_direct_instances() {
        let mut human = entity("Q42");
        human.p31.push("Q5".into());
        let store = store_of(vec![human]);
        let closure = descendant_closure(&store, &person_roots());
        let per = &closure[&Category::Per];
        assert!(per.contains("Q5"));
        assert!(per.contains("Q42"));
    }

    #[test]
    fn closure_follows_subclass_then_instance() {
        // Q5 ← P279 ← A ← P31 ← B
        let mut a = entity("Q100");
        a.p279.push("Q5".into());
        let mut b = entity("Q200");
        b.p31.push("Q100".into());
        let store = store_of(vec![a, b]);
        let closure = descendant_closure(&store, &person_roots());
        let per = &closure[&Category::Per];
        assert_eq!(
            per.iter().collect::<Vec<_>>(),
            vec!["Q100", "Q200", "Q5"]
        );
    }

    #[test]
    fn closure_tolerates_cycles() {
        let mut a = entity("Q100");
        a.p279.push("Q5".into());
        let mut b = entity("Q200");
        b.p279.push("Q100".into());
        let mut c = entity("Q300");
        c.p279.push("Q200".into());
        // Cycle back into the closure.
        let mut d = entity("Q100");
        d.p279 = vec!["Q5".into(), "Q300".into()];
        let store = store_of(vec![a, b, c, d]);
        let closure = descendant_closure(&store, &person_roots());
        assert!(closure[&Category::Per].contains("Q300"));
    }

    /// Brute-force reachability oracle: iterate to fixpoint instead of BFS.
    fn closure_oracle(store: &EntityStore, roots: &[String]) -> BTreeSet<String> {
        let mut subclasses: BTreeSet<String> = roots.iter().cloned().collect();
        loop {
            let before = subclasses.len();
            for e in store.iter() {
                if e.p279.iter().any(|t| subclasses.contains(t)) {
                    subclasses.insert(e.id.clone());
                }
            }
            if subclasses.len() == before {
                break;
            }
        }
        let mut closure = subclasses.clone();
        for e in store.iter() {
            if e.p31.iter().any(|t| subclasses.contains(t)) {
                closure.insert(e.id.clone());
            }
        }
        closure
    }

    #[test]
    fn closure_matches_oracle_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..60);
            let mut entities = Vec::new();
            for i in 0..n {
                let mut e = entity(&format!("Q{i}"));
                for j in 0..n {
                    if i != j && rng.gen_bool(0.08) {
                        e.p279.push(format!("Q{j}"));
                    }
                    if i != j && rng.gen_bool(0.04) {
                        e.p31.push(format!("Q{j}"));
                    }
                }
                entities.push(e);
            }
            let store = store_of(entities);
            let roots_vec = vec!["Q0".to_string()];
            let mut roots = CategoryRoots::default();
            roots.0.insert(Category::Per, roots_vec.clone());
            let closure = descendant_closure(&store, &roots);
            assert_eq!(closure[&Category::Per], closure_oracle(&store, &roots_vec));
        }
    }

    #[test]
    fn closure_is_monotone_in_the_store() {
        let mut a = entity("Q100");
        a.p279.push("Q5".into());
        let small = store_of(vec![a.clone()]);
        let mut b = entity("Q200");
        b.p31.push("Q100".into());
        let large = store_of(vec![a, b]);
        let roots = person_roots();
        let before = descendant_closure(&small, &roots);
        let after = descendant_closure(&large, &roots);
        for (cat, ids) in &before {
            assert!(after[cat].is_superset(ids));
        }
    }

    #[test]
    fn tf_counts_references_and_names() {
        let mut target = with_label(entity("Q5"), "en", &["human", "person"]);
        target.p279 = vec![];
        let mut referers = Vec::new();
        for i in 0..3 {
            let mut e = entity(&format!("Q10{i}"));
            e.p31.push("Q5".into());
            referers.push(e);
        }
        let mut entities = vec![target];
        entities.extend(referers);
        let store = store_of(entities);
        let tf = term_frequency(&store);
        assert_eq!(tf.get("Q5"), Some(&5)); // 3 references + 2 labels
    }

    #[test]
    fn tf_unreferenced_entity_counts_its_label() {
        let store = store_of(vec![with_label(entity("Q9"), "en", &["lonely"])]);
        assert_eq!(term_frequency(&store).get("Q9"), Some(&1));
    }

    fn trump_store() -> (EntityStore, CategoryRoots) {
        let mut trump = entity("Q22686");
        trump.p31.push("Q5".into());
        trump
            .labels
            .insert("en".into(), vec!["Donald Trump".into()]);
        trump
            .labels
            .insert("pl".into(), vec!["Donald Trump".into()]);
        trump.aliases.insert("en".into(), vec!["Trump".into()]);
        let mut jr = entity("Q3713655");
        jr.p31.push("Q5".into());
        jr.labels
            .insert("en".into(), vec!["Donald Trump Jr".into()]);
        (store_of(vec![trump, jr]), person_roots())
    }

    #[test]
    fn catalog_indexes_labels_per_language() {
        let (store, roots) = trump_store();
        let closure = descendant_closure(&store, &roots);
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en", "pl"]));
        let hits = catalog.lookup("Donald Trump");
        let langs_seen: Vec<&str> = hits.iter().map(|h| h.language.as_str()).collect();
        assert!(langs_seen.contains(&"en"));
        assert!(langs_seen.contains(&"pl"));
        assert!(hits.iter().all(|h| h.id == "Q22686"));
        assert_eq!(catalog.lookup("Donald Trump Jr")[0].id, "Q3713655");
    }

    fn langs(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unlabeled_entity_is_not_indexed() {
        let mut ghost = entity("Q77");
        ghost.p31.push("Q5".into());
        ghost.labels.insert("de".into(), vec!["Geist".into()]);
        let store = store_of(vec![ghost]);
        let closure = descendant_closure(&store, &person_roots());
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en"]));
        assert!(catalog.lookup("Geist").is_empty());
        assert_eq!(catalog.entities(), 0);
    }

    #[test]
    fn name_collision_sorts_by_descending_tf() {
        let mut popular = with_label(entity("Q1"), "en", &["Mercury"]);
        popular.p31.push("Q5".into());
        let mut obscure = with_label(entity("Q2"), "en", &["Mercury"]);
        obscure.p31.push("Q5".into());
        // Make Q1 more referenced.
        let mut referers = Vec::new();
        for i in 0..3 {
            let mut e = entity(&format!("Q5{i}"));
            e.p31.push("Q1".into());
            referers.push(e);
        }
        let mut entities = vec![popular, obscure];
        entities.extend(referers);
        let store = store_of(entities);
        let closure = descendant_closure(&store, &person_roots());
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en"]));
        let hits = catalog.lookup("Mercury");
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].id, "Q1");
        assert!(hits[0].tf > hits[1].tf);
    }

    fn org_roots() -> CategoryRoots {
        let mut roots = CategoryRoots::default();
        roots.0.insert(Category::Org, vec!["Q43229".into()]);
        roots
    }

    #[test]
    fn aliases_for_org_include_acronyms() {
        let mut sony = with_label(entity("Q65918"), "en", &["Sony Ericsson"]);
        sony.p31.push("Q43229".into());
        let store = store_of(vec![sony]);
        let closure = descendant_closure(&store, &org_roots());
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en"]));
        let aliases = catalog.aliases("Q65918", "en");
        assert!(aliases.contains(&"SE".to_string()));
    }

    #[test]
    fn aliases_empty_for_per_and_single_word_org() {
        let mut person = with_label(entity("Q42"), "en", &["Douglas Adams"]);
        person.p31.push("Q5".into());
        let mut org = with_label(entity("Q102673"), "en", &["Gazprom"]);
        org.p31.push("Q43229".into());
        let store = store_of(vec![person, org]);
        let mut roots = CategoryRoots::default();
        roots.0.insert(Category::Per, vec!["Q5".into()]);
        roots.0.insert(Category::Org, vec!["Q43229".into()]);
        let closure = descendant_closure(&store, &roots);
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en"]));
        assert!(catalog.aliases("Q42", "en").is_empty());
        assert!(catalog.aliases("Q102673", "en").is_empty());
        assert!(catalog.aliases("Q404", "en").is_empty());
    }

    #[test]
    fn catalog_serializes_deterministically() {
        let (store, roots) = trump_store();
        let closure = descendant_closure(&store, &roots);
        let tf = term_frequency(&store);
        let catalog = build_catalog(&store, &closure, &tf, &langs(&["en", "pl"]));
        let a = serde_json::to_string(&catalog).unwrap();
        let b = serde_json::to_string(&catalog).unwrap();
        assert_eq!(a, b);
        let reread: EntityCatalog = serde_json::from_str(&a).unwrap();
        assert_eq!(reread.lookup("Donald Trump"), catalog.lookup("Donald Trump"));
    }
}
