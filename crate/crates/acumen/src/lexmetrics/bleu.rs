//! Sentence-level BLEU with brevity penalty and add-one smoothing.

use std::collections::HashMap;

use super::ngrams;
use super::tokenize::tokenize;

const MAX_ORDER: usize = 4;

/// Geometric mean of clipped 1-4-gram precisions times the brevity penalty.
///
/// Orders where the candidate has no n-grams are skipped; orders with zero
/// clipped matches are smoothed to (0+1)/(total+1) so short summaries do not
/// collapse to an exact zero.
///
/// Panics if `references` is empty.
pub fn bleu(references: &[&str], candidate: &str) -> f64 {
    assert!(!references.is_empty(), "bleu needs at least one reference");
    let ref_tokens: Vec<Vec<String>> = references.iter().map(|r| tokenize(r)).collect();
    let cand_tokens = tokenize(candidate);
    let c = cand_tokens.len();
    if c == 0 {
        let all_refs_empty = ref_tokens.iter().all(|r| r.is_empty());
        return if all_refs_empty { 1.0 } else { 0.0 };
    }

    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=MAX_ORDER {
        let total = ngrams::total(c, n);
        if total == 0 {
            continue;
        }
        let cand_counts = ngrams::counts(&cand_tokens, n);
        let mut max_ref_counts: HashMap<&[String], usize> = HashMap::new();
        for r in &ref_tokens {
            for (gram, count) in ngrams::counts(r, n) {
                let entry = max_ref_counts.entry(gram).or_insert(0);
                *entry = (*entry).max(count);
            }
        }
        let matched: usize = cand_counts
            .iter()
            .map(|(gram, &count)| count.min(max_ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        let precision = if matched == 0 {
            1.0 / (total as f64 + 1.0)
        } else {
            matched as f64 / total as f64
        };
        log_sum += precision.ln();
        orders += 1;
    }
    let geo_mean = (log_sum / orders as f64).exp();

    let r = effective_reference_length(&ref_tokens, c);
    let brevity = if c < r {
        (1.0 - r as f64 / c as f64).exp()
    } else {
        1.0
    };
    brevity * geo_mean
}

/// Reference length closest to the candidate length; ties go to the shorter.
fn effective_reference_length(ref_tokens: &[Vec<String>], c: usize) -> usize {
    ref_tokens
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| (len.abs_diff(c), len))
        .expect("at least one reference")
}
