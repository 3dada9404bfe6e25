//! Phrase lemmatization: suffix inventories, phrase schemas, agreement
//! rules, and the four-step heuristic cascade that ties them together.
//!
//! The cascade runs strictly in order; the first step that produces a
//! result wins:
//!
//! 1. stopper split — freeze the tail from the rightmost stopper word on
//!    and lemmatize the prefix (re-entering at step 2);
//! 2. agreement rules, when the table's language matches;
//! 3. the best applicable phrase schema, ranked by the naturalness of its
//!    output;
//! 4. word-by-word replacement with the most popular lemma, leaving
//!    unknown words unchanged.
//!
//! Every step preserves the word count.

mod agreement;
mod inventory;
mod schema;

pub use agreement::{apply_agreement_rules, parse_agreement_rules, AgreementRuleTable};
pub use inventory::{
    read_suffixes, write_suffixes, SuffixInventory, DEFAULT_INVENTORY_SIZE,
};
pub use schema::{
    apply_schema, induce_schema, read_schemas, write_schemas, PhraseSchema, SchemaSet,
};

use crate::corpus::tokenize_phrase;
use crate::morpho::MorphLexicon;
use crate::wiki::StopperSet;

/// Cascade switches: `s` stoppers, `a` agreement rules, `p` phrase
/// schemas, `w` word-level fallback. All off reproduces the identity
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CascadeToggles {
    pub stoppers: bool,
    pub agreement: bool,
    pub schemas: bool,
    pub words: bool,
}

impl Default for CascadeToggles {
    fn default() -> Self {
        CascadeToggles {
            stoppers: true,
            agreement: true,
            schemas: true,
            words: true,
        }
    }
}

impl CascadeToggles {
    pub fn baseline() -> Self {
        CascadeToggles {
            stoppers: false,
            agreement: false,
            schemas: false,
            words: false,
        }
    }
}

/// Everything the cascade needs for one language. Immutable after build;
/// `lemmatize` is a pure function over it.
#[derive(Debug, Clone, Default)]
pub struct LemmatizerResources {
    pub language: String,
    pub stoppers: StopperSet,
    pub agreement: Option<AgreementRuleTable>,
    pub schemas: SchemaSet,
    pub inventory: SuffixInventory,
    pub lexicon: MorphLexicon,
}

#[derive(Debug, Clone, Default)]
pub struct Lemmatizer {
    resources: LemmatizerResources,
    toggles: CascadeToggles,
}

/// The rightmost stopper word splits the phrase into (prefix, tail); the
/// tail starts at the stopper itself. A stopper in first position gives no
/// split, otherwise the whole phrase would freeze.
pub fn find_stopper_split<'a>(
    words: &'a [String],
    stoppers: &StopperSet,
) -> Option<(&'a [String], &'a [String])> {
    let idx = words.iter().rposition(|w| stoppers.contains(w))?;
    if idx == 0 {
        return None;
    }
    Some((&words[..idx], &words[idx..]))
}

/// Log-frequency naturalness of a candidate lemma: the sum over words of
/// `ln(1 + lemma_freq)` plus `ln(1 + corpus_freq)`. Prefers common words
/// and words that occur in lemmas; higher is more natural.
pub fn naturalness_score(candidate: &[String], lexicon: &MorphLexicon) -> f64 {
    candidate
        .iter()
        .map(|w| {
            (1.0 + lexicon.lemma_count(w) as f64).ln()
                + (1.0 + lexicon.corpus_count(w) as f64).ln()
        })
        .sum()
}

impl Lemmatizer {
    pub fn new(resources: LemmatizerResources, toggles: CascadeToggles) -> Self {
        Lemmatizer { resources, toggles }
    }

    pub fn resources(&self) -> &LemmatizerResources {
        &self.resources
    }

    pub fn toggles(&self) -> CascadeToggles {
        self.toggles
    }

    /// Lemmatizes a whitespace-tokenized phrase; the output always has the
    /// same word count as the input.
    pub fn lemmatize_words(&self, words: &[String]) -> Vec<String> {
        if words.is_empty() {
            return Vec::new();
        }
        if self.toggles.stoppers {
            if let Some((prefix, tail)) = find_stopper_split(words, &self.resources.stoppers) {
                // The rightmost stopper has been consumed: the prefix
                // re-enters the cascade below the stopper step.
                let mut out = self.from_step2(prefix);
                out.extend_from_slice(tail);
                return out;
            }
        }
        self.from_step2(words)
    }

    /// Convenience wrapper over strings.
    pub fn lemmatize(&self, phrase: &str) -> String {
        self.lemmatize_words(&tokenize_phrase(phrase)).join(" ")
    }

    fn from_step2(&self, words: &[String]) -> Vec<String> {
        if words.is_empty() {
            return Vec::new();
        }
        if self.toggles.agreement {
            if let Some(table) = &self.resources.agreement {
                if let Some(out) = apply_agreement_rules(
                    words,
                    table,
                    &self.resources.lexicon,
                    &self.resources.language,
                ) {
                    return out;
                }
            }
        }
        if self.toggles.schemas {
            if let Some(out) = self.best_schema_output(words) {
                return out;
            }
        }
        if self.toggles.words {
            return words
                .iter()
                .map(|w| self.resources.lexicon.most_popular_lemma(w))
                .collect();
        }
        words.to_vec()
    }

    /// All schemas keyed by this phrase's longest-match suffix tuple are
    /// applicable; the winner maximizes the naturalness score of its
    /// output, with ties broken by higher support, then by the
    /// lexicographically smallest output.
    fn best_schema_output(&self, words: &[String]) -> Option<Vec<String>> {
        if self.resources.schemas.is_empty() {
            return None;
        }
        let inv = &self.resources.inventory;
        let lhs: Vec<String> = words
            .iter()
            .map(|w| inv.longest_match(w).to_string())
            .collect();
        let mut best: Option<(Vec<String>, f64, u64)> = None;
        for (rhs, support) in self.resources.schemas.lookup(&lhs) {
            let out: Vec<String> = words
                .iter()
                .zip(&lhs)
                .zip(rhs)
                .map(|((word, suffix), replacement)| {
                    format!("{}{}", &word[..word.len() - suffix.len()], replacement)
                })
                .collect();
            let score = naturalness_score(&out, &self.resources.lexicon);
            let better = match &best {
                None => true,
                Some((best_out, best_score, best_support)) => {
                    match score.total_cmp(best_score) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => match support.cmp(best_support) {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Less => false,
                            std::cmp::Ordering::Equal => out < *best_out,
                        },
                    }
                }
            };
            if better {
                best = Some((out, score, support));
            }
        }
        best.map(|(out, _, _)| out)
    }
}
