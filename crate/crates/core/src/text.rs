//! Char-level string helpers. Suffix rules operate on code points, so every
//! split in this crate goes through these instead of byte arithmetic.

/// Number of chars in `s`.
pub(crate) fn char_count(s: &str) -> usize {
    s.chars().count()
}

/// Byte offset where the suffix consisting of the last `k` chars starts.
/// `k` larger than the char count clamps to the whole string.
pub(crate) fn suffix_start(s: &str, k: usize) -> usize {
    if k == 0 {
        return s.len();
    }
    s.char_indices()
        .rev()
        .nth(k - 1)
        .map(|(idx, _)| idx)
        .unwrap_or(0)
}

/// The suffix made of the last `k` chars.
pub(crate) fn char_suffix(s: &str, k: usize) -> &str {
    &s[suffix_start(s, k)..]
}

/// Splits `s` into (stem, suffix) where the suffix holds the last `k` chars.
pub(crate) fn split_char_suffix(s: &str, k: usize) -> (&str, &str) {
    let at = suffix_start(s, k);
    (&s[..at], &s[at..])
}

/// Byte length of the longest common char prefix of `a` and `b`. Identical
/// char prefixes have identical UTF-8 encodings, so one offset serves both.
pub(crate) fn common_prefix_bytes(a: &str, b: &str) -> usize {
    let mut end = 0;
    for ((ia, ca), (_, cb)) in a.char_indices().zip(b.char_indices()) {
        if ca != cb {
            return ia;
        }
        end = ia + ca.len_utf8();
    }
    end
}
