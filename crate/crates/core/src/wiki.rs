//! Mining of (anchor, title) link pairs from wikitext, validation of pairs
//! as lemmatization evidence, stopper-word mining, and lemma-word counting.
//!
//! The wikitext scanner is deliberately lightweight: it understands
//! `[[target|anchor]]` links, `<nowiki>` spans and HTML comments, and the
//! `%%PAGE <title>` boundary marker used by the fixture format. It is not a
//! full MediaWiki parser; link pairs are the only artifact needed here.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use crate::corpus::{collapse_ws, nfc, tokenize_phrase};
use crate::error::{Error, Result};
use crate::morpho::LemmaRuleSet;

/// An anchor/title pair extracted from one wiki link.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinkPair {
    pub anchor: String,
    pub title: String,
    pub source_page: String,
}

/// Counters reported by the extraction pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub pages: usize,
    pub links: usize,
    pub skipped_malformed: usize,
    pub skipped_namespace: usize,
    pub duplicates: usize,
}

/// Scans wikitext for link pairs. `[[T|A]]` yields (A, T), `[[T]]` yields
/// (T, T). Section anchors after `#` are stripped from the target, targets
/// with a namespace colon are skipped, and only the first occurrence of an
/// (anchor, title) pair per page counts.
pub fn extract_link_pairs<R: Read>(mut reader: R) -> Result<(Vec<LinkPair>, ExtractStats)> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;

    let mut pairs = Vec::new();
    let mut stats = ExtractStats::default();
    let mut page = String::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut segment = String::new();

    for line in text.lines() {
        if let Some(title) = line.strip_prefix("%%PAGE") {
            if !segment.is_empty() {
                scan_segment(&segment, &page, &mut seen, &mut pairs, &mut stats);
                segment.clear();
            }
            page = collapse_ws(&nfc(title));
            seen.clear();
            stats.pages += 1;
            continue;
        }
        segment.push_str(line);
        segment.push('\n');
    }
    if !segment.is_empty() {
        scan_segment(&segment, &page, &mut seen, &mut pairs, &mut stats);
    }
    Ok((pairs, stats))
}

fn scan_segment(
    raw: &str,
    page: &str,
    seen: &mut HashSet<(String, String)>,
    pairs: &mut Vec<LinkPair>,
    stats: &mut ExtractStats,
) {
    let text = strip_suppressed(raw);
    let mut pos = 0;
    while let Some(rel) = text[pos..].find("[[") {
        let start = pos + rel + 2;
        let close = text[start..].find("]]");
        let open = text[start..].find("[[");
        match (close, open) {
            (None, _) => {
                // Unbalanced opener at end of input.
                stats.skipped_malformed += 1;
                break;
            }
            (Some(c), Some(o)) if o < c => {
                // Another opener before the closer: the outer link is
                // malformed, resume at the inner one.
                stats.skipped_malformed += 1;
                pos = start + o;
            }
            (Some(c), _) => {
                handle_link(&text[start..start + c], page, seen, pairs, stats);
                pos = start + c + 2;
            }
        }
    }
}

/// Blanks `<nowiki>...</nowiki>` spans and `<!-- ... -->` comments so links
/// inside them are not extracted.
fn strip_suppressed(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let comment = rest.find("<!--").map(|i| (i, "<!--", "-->"));
        let nowiki = rest.find("<nowiki>").map(|i| (i, "<nowiki>", "</nowiki>"));
        let first = match (comment, nowiki) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        match first {
            None => {
                out.push_str(rest);
                return out;
            }
            Some((at, open, end)) => {
                out.push_str(&rest[..at]);
                let after = &rest[at + open.len()..];
                match after.find(end) {
                    Some(e) => rest = &after[e + end.len()..],
                    None => return out, // unterminated: suppress to EOF
                }
            }
        }
    }
}

fn handle_link(
    inner: &str,
    page: &str,
    seen: &mut HashSet<(String, String)>,
    pairs: &mut Vec<LinkPair>,
    stats: &mut ExtractStats,
) {
    stats.links += 1;
    let parts: Vec<&str> = inner.split('|').collect();
    if parts.len() > 2 {
        stats.skipped_malformed += 1;
        return;
    }
    let target = parts[0];
    if target.contains(':') {
        stats.skipped_namespace += 1;
        return;
    }
    let target = target.split('#').next().unwrap_or("");
    let title = collapse_ws(&nfc(target));
    let anchor = if parts.len() == 2 {
        collapse_ws(&nfc(parts[1]))
    } else {
        title.clone()
    };
    if title.is_empty() || anchor.is_empty() {
        stats.skipped_malformed += 1;
        return;
    }
    if seen.insert((anchor.clone(), title.clone())) {
        pairs.push(LinkPair {
            anchor,
            title,
            source_page: page.to_string(),
        });
    } else {
        stats.duplicates += 1;
    }
}

/// A pair is accepted as lemmatization evidence when anchor and title have
/// the same number of words and each title word either equals the anchor
/// word at that position or is one of its possible lemmas.
pub fn validate_pair(pair: &LinkPair, rules: &LemmaRuleSet) -> bool {
    let anchor = tokenize_phrase(&pair.anchor);
    let title = tokenize_phrase(&pair.title);
    if anchor.is_empty() || anchor.len() != title.len() {
        return false;
    }
    anchor
        .iter()
        .zip(&title)
        .all(|(a, t)| a == t || rules.possible_lemma(a, t))
}

/// Words that freeze the tail of a phrase during lemmatization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopperSet {
    words: BTreeSet<String>,
    pub min_support: u32,
}

impl StopperSet {
    pub fn from_words(words: impl IntoIterator<Item = String>, min_support: u32) -> Self {
        StopperSet {
            words: words.into_iter().collect(),
            min_support,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Mines stopper words from validated pairs: a word is a candidate for a
/// pair when anchor and title agree on it and on everything after it.
/// Single-word pairs are excluded, otherwise every one-word pair would
/// trivially witness its own word. Candidates with at least `min_support`
/// distinct witnessing pairs are kept.
pub fn mine_stopper_words(pairs: &[LinkPair], min_support: u32) -> StopperSet {
    let distinct: BTreeSet<(&str, &str)> = pairs
        .iter()
        .map(|p| (p.anchor.as_str(), p.title.as_str()))
        .collect();

    let mut witnesses: HashMap<String, u32> = HashMap::new();
    for (anchor, title) in distinct {
        let a = tokenize_phrase(anchor);
        let t = tokenize_phrase(title);
        if a.len() != t.len() || a.len() < 2 {
            continue;
        }
        // tail_equal[i]: words i.. are identical in anchor and title.
        let mut tail_equal = true;
        let mut candidates = Vec::new();
        for i in (0..a.len()).rev() {
            tail_equal = tail_equal && a[i] == t[i];
            if tail_equal {
                candidates.push(a[i].clone());
            }
        }
        for word in candidates {
            *witnesses.entry(word).or_insert(0) += 1;
        }
    }

    StopperSet::from_words(
        witnesses
            .into_iter()
            .filter_map(|(word, n)| (n >= min_support).then_some(word)),
        min_support,
    )
}

/// Counts every word of every title and every training-data lemma; the
/// result merges into the lexicon's lemma-frequency table.
pub fn count_lemma_frequencies<'a>(
    titles: impl IntoIterator<Item = &'a str>,
    training_lemmas: impl IntoIterator<Item = &'a str>,
) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for phrase in titles.into_iter().chain(training_lemmas) {
        for word in tokenize_phrase(phrase) {
            *counts.entry(word).or_insert(0) += 1;
        }
    }
    counts
}

/// Pairs persisted as `anchor<TAB>title`.
pub fn write_pairs<W: Write>(writer: &mut W, pairs: &[LinkPair]) -> Result<()> {
    for p in pairs {
        writeln!(writer, "{}\t{}", p.anchor, p.title)?;
    }
    Ok(())
}

pub fn read_pairs<R: BufRead>(reader: R) -> Result<Vec<LinkPair>> {
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::parse(
                line_no,
                format!("expected 2 columns, found {}", cols.len()),
            ));
        }
        pairs.push(LinkPair {
            anchor: collapse_ws(&nfc(cols[0])),
            title: collapse_ws(&nfc(cols[1])),
            source_page: String::new(),
        });
    }
    Ok(pairs)
}

/// Stoppers persisted one word per line.
pub fn write_stoppers<W: Write>(writer: &mut W, stoppers: &StopperSet) -> Result<()> {
    for word in stoppers.iter() {
        writeln!(writer, "{word}")?;
    }
    Ok(())
}

pub fn read_stoppers<R: BufRead>(reader: R, min_support: u32) -> Result<StopperSet> {
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let word = line.trim();
        if !word.is_empty() {
            words.push(nfc(word));
        }
    }
    Ok(StopperSet::from_words(words, min_support))
}

/// Word→count tables persisted as `word<TAB>count`.
pub fn write_word_counts<W: Write>(writer: &mut W, counts: &BTreeMap<String, u64>) -> Result<()> {
    for (word, count) in counts {
        writeln!(writer, "{word}\t{count}")?;
    }
    Ok(())
}

pub fn read_word_counts<R: BufRead>(reader: R) -> Result<BTreeMap<String, u64>> {
    let mut counts = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let (word, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected 2 columns"))?;
        let count: u64 = count
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad count `{count}`")))?;
        *counts.entry(nfc(word)).or_insert(0) += count;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morpho::{induce_word_rules, MorphEntry};

    fn extract(text: &str) -> (Vec<LinkPair>, ExtractStats) {
        extract_link_pairs(text.as_bytes()).unwrap()
    }

    #[test]
    fn piped_link_yields_anchor_title() {
        let (pairs, _) = extract("Setkání s [[Václav Havel|Václavem Havlem]] v Praze.");
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].anchor, "Václavem Havlem");
        assert_eq!(pairs[0].title, "Václav Havel");
    }

    #[test]
    fn unpiped_link_duplicates_title() {
        let (pairs, _) = extract("Hlavní město [[Praha]] leží na Vltavě.");
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].anchor, "Praha");
        assert_eq!(pairs[0].title, "Praha");
    }

    #[test]
    fn namespace_links_are_skipped() {
        let (pairs, stats) = extract("[[Soubor:Mapa.png|mapa]] a [[Praha]]");
        assert_eq!(pairs.len(), 1);
        assert_eq!(stats.skipped_namespace, 1);
    }

    #[test]
    fn section_anchor_is_stripped_from_title() {
        let (pairs, _) = extract("[[Praha#Historie|Prahy]]");
        assert_eq!(pairs[0].title, "Praha");
        assert_eq!(pairs[0].anchor, "Prahy");
    }

    #[test]
    fn suppressed_regions_hide_links() {
        let (pairs, _) =
            extract("<!-- [[Skrytý]] --> text <nowiki>[[Také skrytý]]</nowiki> [[Viditelný]]");
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].title, "Viditelný");
    }

    #[test]
    fn unbalanced_link_is_counted_not_fatal() {
        let (pairs, stats) = extract("[[Rozbitý odkaz a [[Praha]] dál");
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].title, "Praha");
        assert!(stats.skipped_malformed >= 1);
    }

    #[test]
    fn first_occurrence_per_page_counts() {
        let (pairs, stats) = extract("[[Praha]] i [[Praha]]\n%%PAGE Druhá\n[[Praha]]");
        assert_eq!(pairs.len(), 2);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(pairs[1].source_page, "Druhá");
    }

    fn rules_for_validation() -> LemmaRuleSet {
        let entries: Vec<MorphEntry> = [("Václavem", "Václav"), ("Havlem", "Havel")]
            .iter()
            .map(|(f, l)| MorphEntry {
                form: f.to_string(),
                lemma: l.to_string(),
                upos: "PROPN".into(),
                feats: "_".into(),
                count: 1,
            })
            .collect();
        induce_word_rules(&entries, 1, 6)
    }

    fn pair(anchor: &str, title: &str) -> LinkPair {
        LinkPair {
            anchor: anchor.into(),
            title: title.into(),
            source_page: String::new(),
        }
    }

    #[test]
    fn validation_accepts_per_word_lemmas() {
        let rules = rules_for_validation();
        assert!(validate_pair(&pair("Václavem Havlem", "Václav Havel"), &rules));
        assert!(validate_pair(&pair("Praha", "Praha"), &rules));
        assert!(!validate_pair(&pair("prezident Havel", "Václav Havel"), &rules));
        assert!(!validate_pair(&pair("Václavem Havlem", "Václav"), &rules));
    }

    #[test]
    fn stopper_mining_finds_shared_mid_word() {
        let pairs = vec![pair(
            "Bazylikę św. Pawła za Murami",
            "Bazylika św. Pawła za Murami",
        )];
        let stoppers = mine_stopper_words(&pairs, 1);
        assert!(stoppers.contains("św."));
        // The inflected head is not a candidate.
        assert!(!stoppers.contains("Bazylikę"));
        assert!(!stoppers.contains("Bazylika"));
    }

    #[test]
    fn single_word_pairs_are_excluded() {
        let stoppers = mine_stopper_words(&[pair("Praha", "Praha")], 1);
        assert!(stoppers.is_empty());
    }

    #[test]
    fn support_threshold_counts_distinct_pairs() {
        let pairs = vec![
            pair("Bazylikę św. Pawła", "Bazylika św. Pawła"),
            pair("Kościoła św. Marka", "Kościół św. Marka"),
            pair("Katedrę św. Jana", "Katedra św. Jana"),
        ];
        let stoppers = mine_stopper_words(&pairs, 3);
        assert!(stoppers.contains("św."));
        // Tail words appear in one pair each and miss the threshold.
        assert!(!stoppers.contains("Pawła"));
        assert_eq!(stoppers.len(), 1);
    }

    #[test]
    fn mining_is_order_independent() {
        let mut pairs = vec![
            pair("Bazylikę św. Pawła", "Bazylika św. Pawła"),
            pair("Kościoła św. Marka", "Kościół św. Marka"),
            pair("Zamku za Odrą", "Zamek za Odrą"),
        ];
        let a = mine_stopper_words(&pairs, 2);
        pairs.reverse();
        let b = mine_stopper_words(&pairs, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn lemma_frequency_counting() {
        let counts = count_lemma_frequencies(["Václav Havel", "Václav Klaus"], []);
        assert_eq!(counts.get("Václav"), Some(&2));
        assert_eq!(counts.get("Havel"), Some(&1));
        assert_eq!(counts.get("Klaus"), Some(&1));
        assert!(count_lemma_frequencies([], []).is_empty());
    }

    #[test]
    fn pairs_round_trip() {
        let pairs = vec![pair("Václavem Havlem", "Václav Havel"), pair("Praha", "Praha")];
        let mut buf = Vec::new();
        write_pairs(&mut buf, &pairs).unwrap();
        let reread = read_pairs(buf.as_slice()).unwrap();
        assert_eq!(pairs, reread);
    }
}
