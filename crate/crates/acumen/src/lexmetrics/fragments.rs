//! Extractive fragment statistics of a candidate against its source
//! document: coverage, density, compression, and novel/repeated n-gram
//! fractions.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ngrams;
use super::tokenize::tokenize;
use super::LexError;

/// How much of a candidate is copied from the source, and how the rest
/// relates to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractiveStats {
    /// Fraction of candidate tokens inside some extractive fragment.
    pub coverage: f64,
    /// Mean squared fragment length per candidate token: long verbatim spans
    /// push this up quadratically.
    pub density: f64,
    /// Source token count over candidate token count.
    pub compression: f64,
    /// n -> fraction of candidate n-gram occurrences absent from the source.
    pub novel_ngram_fraction: BTreeMap<usize, f64>,
    /// n -> fraction of candidate n-gram occurrences that repeat an earlier
    /// occurrence within the candidate itself.
    pub repeated_ngram_fraction: BTreeMap<usize, f64>,
}

const NGRAM_ORDERS: std::ops::RangeInclusive<usize> = 1..=3;

pub fn extractive_stats(source: &str, candidate: &str) -> Result<ExtractiveStats, LexError> {
    let source_tokens = tokenize(source);
    let cand_tokens = tokenize(candidate);
    if source_tokens.is_empty() {
        return Err(LexError::EmptySource);
    }
    if cand_tokens.is_empty() {
        return Err(LexError::EmptyCandidate);
    }

    let fragments = extractive_fragments(&source_tokens, &cand_tokens);
    let covered: usize = fragments.iter().map(|(_, len)| len).sum();
    let squared: usize = fragments.iter().map(|(_, len)| len * len).sum();
    let c = cand_tokens.len() as f64;

    let mut novel = BTreeMap::new();
    let mut repeated = BTreeMap::new();
    for n in NGRAM_ORDERS {
        let total = ngrams::total(cand_tokens.len(), n);
        if total == 0 {
            novel.insert(n, 0.0);
            repeated.insert(n, 0.0);
            continue;
        }
        let source_grams: HashSet<&[String]> =
            ngrams::counts(&source_tokens, n).into_keys().collect();
        let cand_counts: HashMap<&[String], usize> = ngrams::counts(&cand_tokens, n);
        let novel_occurrences: usize = cand_counts
            .iter()
            .filter(|(gram, _)| !source_grams.contains(*gram))
            .map(|(_, &count)| count)
            .sum();
        let distinct = cand_counts.len();
        novel.insert(n, novel_occurrences as f64 / total as f64);
        repeated.insert(n, (total - distinct) as f64 / total as f64);
    }

    Ok(ExtractiveStats {
        coverage: covered as f64 / c,
        density: squared as f64 / c,
        compression: source_tokens.len() as f64 / c,
        novel_ngram_fraction: novel,
        repeated_ngram_fraction: repeated,
    })
}

/// Greedy left-to-right decomposition of the candidate into maximal spans
/// shared with the source. Returns (candidate start index, length) pairs.
///
/// At each candidate position the longest match over every source start is
/// taken (a token-position index keeps this cheap); the cursor then jumps
/// past it, so fragments never overlap.
pub fn extractive_fragments(
    source_tokens: &[String],
    cand_tokens: &[String],
) -> Vec<(usize, usize)> {
    let mut starts_by_token: HashMap<&String, Vec<usize>> = HashMap::new();
    for (j, tok) in source_tokens.iter().enumerate() {
        starts_by_token.entry(tok).or_default().push(j);
    }
    let mut fragments = Vec::new();
    let mut i = 0;
    while i < cand_tokens.len() {
        let mut best = 0;
        if let Some(starts) = starts_by_token.get(&cand_tokens[i]) {
            for &j in starts {
                let mut k = 1;
                while i + k < cand_tokens.len()
                    && j + k < source_tokens.len()
                    && cand_tokens[i + k] == source_tokens[j + k]
                {
                    k += 1;
                }
                best = best.max(k);
            }
        }
        if best > 0 {
            fragments.push((i, best));
            i += best;
        } else {
            i += 1;
        }
    }
    fragments
}
