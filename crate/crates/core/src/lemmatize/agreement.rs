//! Rule-based agreement phrase lemmatization (Polish in the default table).
//!
//! A rule is a fixed-arity trigger over the words' morphological readings
//! plus one action per word:
//!
//! ```text
//! NOUN:Case=Gen ADJ:Case=Gen<TAB>lemma agree(0)
//! ```
//!
//! Matchers are `*` (any word), `UPOS`, `UPOS:Feat=V,Feat=V` or `:Feat=V`;
//! feature conditions are substring matches against the raw FEATS string.
//! Actions are `keep`, `lemma` (replace with the most popular lemma of the
//! matched readings) and `agree(i)` (re-inflect this word's lemma to
//! nominative with the gender and number of word `i`'s result, found by
//! dictionary lookup rather than generation).

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::morpho::{MorphEntry, MorphLexicon};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMatcher {
    upos: Option<String>,
    feats: Vec<String>,
}

impl WordMatcher {
    fn any() -> Self {
        WordMatcher {
            upos: None,
            feats: Vec::new(),
        }
    }

    fn is_any(&self) -> bool {
        self.upos.is_none() && self.feats.is_empty()
    }

    fn matches(&self, entry: &MorphEntry) -> bool {
        if let Some(upos) = &self.upos {
            if &entry.upos != upos {
                return false;
            }
        }
        self.feats.iter().all(|f| entry.feats.contains(f.as_str()))
    }

    fn parse(token: &str, line: usize) -> Result<Self> {
        if token == "*" {
            return Ok(Self::any());
        }
        let (upos, feats) = match token.split_once(':') {
            Some((u, f)) => (u, f),
            None => (token, ""),
        };
        let upos = (!upos.is_empty()).then(|| upos.to_string());
        let feats: Vec<String> = feats
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if upos.is_none() && feats.is_empty() {
            return Err(Error::parse(line, format!("empty matcher `{token}`")));
        }
        Ok(WordMatcher { upos, feats })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordAction {
    Keep,
    Lemma,
    Agree(usize),
}

impl WordAction {
    fn parse(token: &str, line: usize) -> Result<Self> {
        match token {
            "keep" => Ok(WordAction::Keep),
            "lemma" => Ok(WordAction::Lemma),
            _ => {
                if let Some(inner) = token.strip_prefix("agree(").and_then(|s| s.strip_suffix(')'))
                {
                    let idx: usize = inner
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad agree index `{inner}`")))?;
                    Ok(WordAction::Agree(idx))
                } else {
                    Err(Error::parse(line, format!("unknown action `{token}`")))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementRule {
    matchers: Vec<WordMatcher>,
    actions: Vec<WordAction>,
}

/// Ordered rules for one language; the first rule whose trigger fires wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementRuleTable {
    pub language: String,
    rules: Vec<AgreementRule>,
}

impl AgreementRuleTable {
    pub fn new(language: &str) -> Self {
        AgreementRuleTable {
            language: language.to_string(),
            rules: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Appends another table's rules after this one's; earlier rules keep
    /// priority.
    pub fn append(&mut self, other: AgreementRuleTable) {
        self.rules.extend(other.rules);
    }

    /// The built-in Polish table: genitive noun + genitive adjective with
    /// re-agreement, a genitive chain that keeps its tail, and a bare
    /// genitive head noun.
    pub fn default_polish() -> Self {
        let text = "NOUN:Case=Gen ADJ:Case=Gen\tlemma agree(0)\n\
                    NOUN:Case=Gen NOUN:Case=Gen\tlemma keep\n\
                    NOUN:Case=Gen\tlemma\n";
        parse_agreement_rules(text.as_bytes(), "pl").expect("builtin table parses")
    }
}

/// Reads a rules file: `matchers<TAB>actions` per line, `#` comments
/// allowed. Matcher and action arity must agree; `agree(i)` must point at a
/// word whose own action is not `agree`.
pub fn parse_agreement_rules<R: BufRead>(reader: R, language: &str) -> Result<AgreementRuleTable> {
    let mut table = AgreementRuleTable::new(language);
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (matcher_part, action_part) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected `matchers<TAB>actions`"))?;
        let matchers: Vec<WordMatcher> = matcher_part
            .split_whitespace()
            .map(|t| WordMatcher::parse(t, line_no))
            .collect::<Result<_>>()?;
        let actions: Vec<WordAction> = action_part
            .split_whitespace()
            .map(|t| WordAction::parse(t, line_no))
            .collect::<Result<_>>()?;
        if matchers.is_empty() || matchers.len() != actions.len() {
            return Err(Error::parse(line_no, "matcher/action arity mismatch"));
        }
        for action in &actions {
            if let WordAction::Agree(i) = action {
                if *i >= actions.len() || matches!(actions[*i], WordAction::Agree(_)) {
                    return Err(Error::parse(line_no, "agree() must target a non-agree word"));
                }
            }
        }
        table.rules.push(AgreementRule { matchers, actions });
    }
    Ok(table)
}

fn feat_value<'a>(feats: &'a str, key: &str) -> Option<&'a str> {
    feats
        .split('|')
        .find_map(|kv| kv.split_once('=').filter(|(k, _)| *k == key).map(|(_, v)| v))
}

fn has_feat(feats: &str, key: &str, value: &str) -> bool {
    feat_value(feats, key) == Some(value)
}

/// Best lemma among readings: highest count, ties to the lexicographically
/// smaller lemma; also reports the UPOS of the winning reading.
fn best_lemma<'a>(readings: &[&'a MorphEntry]) -> Option<(&'a str, &'a str)> {
    readings
        .iter()
        .max_by(|a, b| {
            a.count
                .cmp(&b.count)
                .then_with(|| b.lemma.cmp(&a.lemma))
        })
        .map(|e| (e.lemma.as_str(), e.upos.as_str()))
}

/// Applies the first matching rule. Yields nothing when the table's
/// language differs from the document language, no trigger fires, or a
/// required dictionary reading is missing.
pub fn apply_agreement_rules(
    words: &[String],
    table: &AgreementRuleTable,
    lexicon: &MorphLexicon,
    doc_language: &str,
) -> Option<Vec<String>> {
    if table.language != doc_language {
        return None;
    }
    'rules: for rule in &table.rules {
        if rule.matchers.len() != words.len() {
            continue;
        }
        // Collect matching readings per word; a non-wildcard matcher with
        // no matching reading kills the rule.
        let mut matched: Vec<Vec<&MorphEntry>> = Vec::with_capacity(words.len());
        for (word, matcher) in words.iter().zip(&rule.matchers) {
            if matcher.is_any() {
                matched.push(lexicon.readings(word).collect());
                continue;
            }
            let mut readings: Vec<&MorphEntry> =
                lexicon.readings(word).filter(|e| matcher.matches(e)).collect();
            if readings.is_empty() {
                readings = lexicon
                    .readings_folded(word)
                    .filter(|e| matcher.matches(e))
                    .collect();
            }
            if readings.is_empty() {
                continue 'rules;
            }
            matched.push(readings);
        }

        let mut out: Vec<Option<String>> = vec![None; words.len()];
        for (i, action) in rule.actions.iter().enumerate() {
            match action {
                WordAction::Keep => out[i] = Some(words[i].clone()),
                WordAction::Lemma => {
                    let lemma = match best_lemma(&matched[i]) {
                        Some((lemma, _)) => lemma.to_string(),
                        None => lexicon.most_popular_lemma(&words[i]),
                    };
                    out[i] = Some(lemma);
                }
                WordAction::Agree(_) => {}
            }
        }
        for (i, action) in rule.actions.iter().enumerate() {
            let WordAction::Agree(head_idx) = action else {
                continue;
            };
            let head_word = out[*head_idx].clone()?;
            // The head's nominative reading supplies gender and number.
            let head_nom: Vec<&MorphEntry> = lexicon
                .readings(&head_word)
                .filter(|e| has_feat(&e.feats, "Case", "Nom"))
                .collect();
            let Some(head_reading) = head_nom
                .iter()
                .max_by(|a, b| a.count.cmp(&b.count).then_with(|| b.form.cmp(&a.form)))
            else {
                continue 'rules;
            };
            let gender = feat_value(&head_reading.feats, "Gender");
            let number = feat_value(&head_reading.feats, "Number");
            let Some((lemma, upos)) = best_lemma(&matched[i]) else {
                continue 'rules;
            };
            // Dictionary lookup of the agreeing nominative form.
            let candidate = lexicon
                .forms_of_lemma(lemma)
                .filter(|e| e.upos == upos && has_feat(&e.feats, "Case", "Nom"))
                .filter(|e| gender.map_or(true, |g| has_feat(&e.feats, "Gender", g)))
                .filter(|e| number.map_or(true, |n| has_feat(&e.feats, "Number", n)))
                .max_by(|a, b| a.count.cmp(&b.count).then_with(|| b.form.cmp(&a.form)));
            match candidate {
                Some(e) => out[i] = Some(e.form.clone()),
                None => continue 'rules,
            }
        }
        if out.iter().all(Option::is_some) {
            return Some(out.into_iter().flatten().collect());
        }
    }
    None
}
