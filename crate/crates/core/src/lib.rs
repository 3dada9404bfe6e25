//! Lemmatization and knowledge-base linking of named-entity mentions in
//! inflected Slavic-language text.
//!
//! The crate covers the stages after entity recognition: mention and
//! annotation-file handling ([`corpus`]), suffix-rule induction from
//! treebanks and dictionaries ([`morpho`]), link-pair and stopper mining
//! from wikitext ([`wiki`]), the heuristic lemmatization cascade
//! ([`lemmatize`]), the entity catalog built from a Wikidata slice
//! ([`kb`]), identifier assignment and embedding-based refinement
//! ([`link`]), and shared-task style scoring ([`eval`]).
//!
//! All resources are immutable once built; lemmatization, linking and
//! scoring are pure functions over them and safe to run concurrently.

pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod kb;
pub mod lemmatize;
pub mod link;
pub mod morpho;
mod text;
pub mod wiki;

pub use corpus::{
    collapse_ws, is_wikidata_id, nfc, parse_annotation_file, parse_document_file, tokenize_phrase,
    word_count, write_annotation_file, Category, Document, LinkedMention, Mention,
};
pub use embed::{similarity, VectorTable};
pub use error::{Error, ParseCategoryError, Result};
pub use eval::{
    linking_f1, linking_f1_grouped, normalization_accuracy, strict_recognition_f1, EvalReport,
    EvalScores, NormReport, RecItem,
};
pub use kb::{
    build_catalog, descendant_closure, ingest_entities, term_frequency, CatalogEntry,
    CategoryRoots, EntityCatalog, EntityStore, KbEntity,
};
pub use lemmatize::{
    apply_agreement_rules, apply_schema, find_stopper_split, induce_schema, naturalness_score,
    AgreementRuleTable, CascadeToggles, Lemmatizer, LemmatizerResources, PhraseSchema, SchemaSet,
    SuffixInventory,
};
pub use link::{
    add_and_link, apply_overrides, best_id, get_identifiers, refine, same_entity, synthetic_id,
    Candidate, CandidateSource, DocEntities, LinkConfig, OverrideRule,
};
pub use morpho::{
    induce_word_rules, ingest_conllu, ingest_dict_tsv, merge_entries, possible_lemma, LemmaRule,
    LemmaRuleSet, MorphEntry, MorphLexicon,
};
pub use wiki::{
    count_lemma_frequencies, extract_link_pairs, mine_stopper_words, validate_pair, ExtractStats,
    LinkPair, StopperSet,
};
