//! The suffix inventory: the most frequent word suffixes over a pair
//! corpus, queried by longest match during schema induction and
//! application.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::corpus::{nfc, tokenize_phrase};
use crate::error::Result;
use crate::text::{char_count, char_suffix};
use crate::wiki::LinkPair;

pub const DEFAULT_INVENTORY_SIZE: usize = 2000;

/// Ranked suffix list with a set for longest-match queries. The empty
/// suffix is always a member, so every word matches something.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuffixInventory {
    ranked: Vec<String>,
    set: HashSet<String>,
    max_len: usize,
}

impl SuffixInventory {
    /// Counts all suffixes (lengths 1..=`max_suffix_len`) of all words on
    /// both sides of the pairs and keeps the `size` most frequent. Ties
    /// break shorter-first, then lexicographically.
    pub fn build_from_pairs(pairs: &[LinkPair], size: usize, max_suffix_len: usize) -> Self {
        Self::from_words(
            pairs
                .iter()
                .flat_map(|p| [p.anchor.as_str(), p.title.as_str()])
                .flat_map(tokenize_phrase),
            size,
            max_suffix_len,
        )
    }

    pub fn from_words(
        words: impl IntoIterator<Item = String>,
        size: usize,
        max_suffix_len: usize,
    ) -> Self {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for word in words {
            let len = char_count(&word);
            for k in 1..=len.min(max_suffix_len) {
                *counts.entry(char_suffix(&word, k).to_string()).or_insert(0) += 1;
            }
        }
        let mut scored: Vec<(String, u64)> = counts.into_iter().collect();
        scored.sort_by(|(sa, ca), (sb, cb)| {
            cb.cmp(ca)
                .then_with(|| char_count(sa).cmp(&char_count(sb)))
                .then_with(|| sa.cmp(sb))
        });
        scored.truncate(size);
        Self::from_suffixes(scored.into_iter().map(|(s, _)| s))
    }

    /// Assembles an inventory from an explicit ranked list; the empty
    /// suffix is added implicitly.
    pub fn from_suffixes(suffixes: impl IntoIterator<Item = String>) -> Self {
        let mut inv = SuffixInventory::default();
        inv.set.insert(String::new());
        for s in suffixes {
            if s.is_empty() || inv.set.contains(&s) {
                continue;
            }
            inv.max_len = inv.max_len.max(char_count(&s));
            inv.set.insert(s.clone());
            inv.ranked.push(s);
        }
        inv
    }

    /// The longest member that is a suffix of `word`; the empty suffix when
    /// nothing longer matches.
    pub fn longest_match<'a>(&self, word: &'a str) -> &'a str {
        let len = char_count(word);
        for k in (1..=len.min(self.max_len)).rev() {
            let suffix = char_suffix(word, k);
            if self.set.contains(suffix) {
                return suffix;
            }
        }
        ""
    }

    pub fn contains(&self, suffix: &str) -> bool {
        self.set.contains(suffix)
    }

    /// Number of non-empty members.
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.ranked.iter().map(String::as_str)
    }
}

/// One suffix per line, rank order. The empty suffix is implicit and not
/// written.
pub fn write_suffixes<W: Write>(writer: &mut W, inv: &SuffixInventory) -> Result<()> {
    for s in inv.iter() {
        writeln!(writer, "{s}")?;
    }
    Ok(())
}

pub fn read_suffixes<R: BufRead>(reader: R) -> Result<SuffixInventory> {
    let mut suffixes = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let s = line.trim();
        if !s.is_empty() {
            suffixes.push(nfc(s));
        }
    }
    Ok(SuffixInventory::from_suffixes(suffixes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_prefers_frequency_then_shortness() {
        let mut words = vec!["tem".to_string(); 100];
        words.extend(vec!["om".to_string(); 20]);
        // Counts: m=120, em=100, tem=100, om=20.
        let inv = SuffixInventory::from_words(words.clone(), 1, 6);
        assert_eq!(inv.iter().collect::<Vec<_>>(), vec!["m"]);
        assert!(inv.contains(""));

        let inv2 = SuffixInventory::from_words(words, 2, 6);
        // "em" and "tem" tie at 100; shorter first.
        assert_eq!(inv2.iter().collect::<Vec<_>>(), vec!["m", "em"]);
    }

    #[test]
    fn empty_corpus_has_only_the_empty_suffix() {
        let inv = SuffixInventory::from_words(Vec::<String>::new(), 2000, 6);
        assert!(inv.is_empty());
        assert!(inv.contains(""));
        assert_eq!(inv.longest_match("Václavem"), "");
    }

    #[test]
    fn longest_match_semantics() {
        let inv = SuffixInventory::from_suffixes(
            ["m", "em", "vem"].map(String::from),
        );
        assert_eq!(inv.longest_match("Václavem"), "vem");
        assert_eq!(inv.longest_match("Praha"), "");
        // A member equal to the whole word matches too.
        let inv2 = SuffixInventory::from_suffixes(["za".to_string()]);
        assert_eq!(inv2.longest_match("za"), "za");
    }

    #[test]
    fn suffix_file_round_trip() {
        let inv = SuffixInventory::from_suffixes(["vem", "vlem", "a"].map(String::from));
        let mut buf = Vec::new();
        write_suffixes(&mut buf, &inv).unwrap();
        let reread = read_suffixes(buf.as_slice()).unwrap();
        assert_eq!(inv, reread);
    }
}
