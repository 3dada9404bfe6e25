//! Word and phrase embeddings for the refinement pass.
//!
//! Vectors come from a pretrained table in the common text interchange
//! format when one is configured. Out-of-vocabulary words (and test setups
//! without any model file) fall back to a deterministic hashed character
//! n-gram embedder: the word is wrapped in boundary markers, its 3..5-grams
//! are hashed to pseudo-random basis vectors, and the sum is L2-normalized.
//! Refinement only depends on relative similarity, which shared n-grams
//! induce, so the fallback keeps multi-gigabyte models out of the test loop.

use std::collections::HashMap;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::tokenize_phrase;
use crate::error::{Error, Result};

/// Parameters of the hashed n-gram fallback embedder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallbackParams {
    pub dimension: usize,
    pub seed: u64,
    pub min_n: usize,
    pub max_n: usize,
}

impl FallbackParams {
    pub fn new(dimension: usize, seed: u64) -> Self {
        FallbackParams {
            dimension,
            seed,
            min_n: 3,
            max_n: 5,
        }
    }
}

/// Word-vector table with an n-gram fallback of the same dimension.
#[derive(Debug, Clone)]
pub struct VectorTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f32>>,
    fallback: FallbackParams,
}

impl VectorTable {
    /// A table with no stored vectors; every word goes through the fallback.
    pub fn fallback_only(dimension: usize, seed: u64) -> Self {
        VectorTable {
            dimension,
            vectors: HashMap::new(),
            fallback: FallbackParams::new(dimension, seed),
        }
    }

    /// Loads the text format: a `<count> <dim>` header line, then one
    /// `word v1 v2 ... vdim` line per word. A count mismatch is tolerated
    /// and reported in the returned warnings.
    pub fn load<R: BufRead>(reader: R, seed: u64) -> Result<(Self, Vec<String>)> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header line"))??;
        let mut parts = header.split_whitespace();
        let declared: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, "bad vector count in header"))?;
        let dimension: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(1, "bad dimension in header"))?;
        if dimension == 0 {
            return Err(Error::parse(1, "zero dimension"));
        }

        let mut vectors = HashMap::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts
                .next()
                .ok_or_else(|| Error::parse(line_no, "missing word"))?
                .to_string();
            let components: Vec<f32> = parts
                .map(|c| {
                    c.parse::<f32>()
                        .map_err(|_| Error::parse(line_no, format!("non-numeric component `{c}`")))
                })
                .collect::<Result<_>>()?;
            if components.len() != dimension {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "expected {dimension} components, found {}",
                        components.len()
                    ),
                ));
            }
            vectors.insert(word, components);
        }

        let mut warnings = Vec::new();
        if vectors.len() != declared {
            warnings.push(format!(
                "header declares {declared} vectors, loaded {}",
                vectors.len()
            ));
        }
        Ok((
            VectorTable {
                dimension,
                vectors,
                fallback: FallbackParams::new(dimension, seed),
            },
            warnings,
        ))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn stored_words(&self) -> usize {
        self.vectors.len()
    }

    /// The stored vector when present, otherwise the n-gram fallback.
    pub fn embed_word(&self, word: &str) -> Vec<f32> {
        match self.vectors.get(word) {
            Some(v) => v.clone(),
            None => fallback_vector(word, &self.fallback),
        }
    }

    /// Component-wise sum of the word embeddings; no normalization.
    pub fn embed_phrase(&self, phrase: &str) -> Result<Vec<f32>> {
        let words = tokenize_phrase(phrase);
        if words.is_empty() {
            return Err(Error::EmptyPhrase);
        }
        let mut acc = vec![0.0f32; self.dimension];
        for word in &words {
            for (a, c) in acc.iter_mut().zip(self.embed_word(word)) {
                *a += c;
            }
        }
        Ok(acc)
    }
}

/// Standard dot product.
pub fn similarity(u: &[f32], v: &[f32]) -> Result<f32> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
}

fn fallback_vector(word: &str, params: &FallbackParams) -> Vec<f32> {
    let decorated: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    let mut acc = vec![0.0f32; params.dimension];
    let mut any = false;
    for n in params.min_n..=params.max_n {
        if decorated.len() < n {
            break;
        }
        for window in decorated.windows(n) {
            any = true;
            let gram: String = window.iter().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(hash_gram(&gram, params.seed));
            for a in acc.iter_mut() {
                *a += rng.gen_range(-1.0f32..1.0);
            }
        }
    }
    if !any {
        return acc;
    }
    let norm: f32 = acc.iter().map(|a| a * a).sum::<f32>().sqrt();
    if norm > 0.0 {
        for a in acc.iter_mut() {
            *a /= norm;
        }
    }
    acc
}

/// FNV-1a over the n-gram bytes, mixed with the table seed. Fixed basis and
/// prime keep the fallback identical across platforms and runs.
fn hash_gram(gram: &str, seed: u64) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
    for b in gram.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEED: u64 = 42;

    #[test]
    fn loads_small_table() {
        let (table, warnings) = VectorTable::load("2 3\na 1 0 0\nb 0 1 0\n".as_bytes(), SEED).unwrap();
        assert_eq!(table.dimension(), 3);
        assert_eq!(table.stored_words(), 2);
        assert!(warnings.is_empty());
        assert_eq!(table.embed_word("a"), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn wrong_component_count_is_an_error() {
        let err = VectorTable::load("1 3\na 1 0\n".as_bytes(), SEED).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn count_mismatch_is_a_warning() {
        let (_, warnings) = VectorTable::load("5 3\na 1 0 0\n".as_bytes(), SEED).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn reload_is_identical() {
        let text = "2 3\na 1 0 0\nb 0 0.5 -0.5\n";
        let (t1, _) = VectorTable::load(text.as_bytes(), SEED).unwrap();
        let (t2, _) = VectorTable::load(text.as_bytes(), SEED).unwrap();
        assert_eq!(t1.embed_word("b"), t2.embed_word("b"));
    }

    #[test]
    fn fallback_is_deterministic() {
        let t1 = VectorTable::fallback_only(64, SEED);
        let t2 = VectorTable::fallback_only(64, SEED);
        assert_eq!(t1.embed_word("Trumpa"), t2.embed_word("Trumpa"));
        // Unit norm after normalization.
        let norm: f32 = t1.embed_word("Trumpa").iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-5);
    }

    #[test]
    fn shared_ngrams_raise_similarity() {
        let table = VectorTable::fallback_only(64, SEED);
        let related = similarity(&table.embed_word("Trumpa"), &table.embed_word("Trumpem")).unwrap();
        let unrelated =
            similarity(&table.embed_word("Trumpa"), &table.embed_word("Kowalski")).unwrap();
        assert!(
            related > unrelated,
            "related {related} <= unrelated {unrelated}"
        );
    }

    #[test]
    fn phrase_embedding_is_a_sum() {
        let table = VectorTable::fallback_only(32, SEED);
        let sum = table.embed_phrase("Donald Trump").unwrap();
        let manual: Vec<f32> = table
            .embed_word("Donald")
            .iter()
            .zip(table.embed_word("Trump"))
            .map(|(a, b)| a + b)
            .collect();
        assert_eq!(sum, manual);
        // Commutative.
        assert_eq!(sum, table.embed_phrase("Trump Donald").unwrap());
        // Single word phrase is just the word.
        assert_eq!(table.embed_phrase("Donald").unwrap(), table.embed_word("Donald"));
    }

    #[test]
    fn empty_phrase_is_an_error() {
        let table = VectorTable::fallback_only(8, SEED);
        assert!(matches!(table.embed_phrase("  "), Err(Error::EmptyPhrase)));
    }

    #[test]
    fn inflected_phrase_pair_clears_default_threshold() {
        let table = VectorTable::fallback_only(64, SEED);
        let a = table.embed_phrase("Donald Trump").unwrap();
        let b = table.embed_phrase("Donalda Trumpa").unwrap();
        let sim = similarity(&a, &b).unwrap();
        assert!(sim > 0.5, "similarity {sim} not above threshold");
    }

    #[test]
    fn similarity_basics() {
        assert_eq!(similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        // Bilinearity in the first argument.
        let u = [0.5, -1.0, 2.0];
        let v = [1.0, 0.25, -0.5];
        let doubled: Vec<f32> = u.iter().map(|x| x * 2.0).collect();
        let s = similarity(&u, &v).unwrap();
        assert!((similarity(&doubled, &v).unwrap() - 2.0 * s).abs() < 1e-6);
        assert!(matches!(
            similarity(&[1.0], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
